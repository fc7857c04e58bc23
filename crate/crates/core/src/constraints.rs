//! Must-link / cannot-link pair constraints and their logical closure.
//!
//! Closure applies two rules until nothing changes:
//!
//! * must-link is transitive: `ML(i,t) ∧ ML(i,k) ⇒ ML(t,k)`;
//! * must-link carries cannot-link: `ML(i,t) ∧ CL(i,k) ⇒ CL(t,k)`.
//!
//! The fixpoint is computed at class level: must-link classes come from a
//! disjoint-set forest, and a single cannot-link pair between two classes
//! separates every member of one from every member of the other. Two
//! cannot-links imply nothing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;

use crate::dsu::DisjointSet;
use crate::error::{Error, Result};
use crate::graph::{Edge, GroundTruth};

fn ordered(u: usize, v: usize) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConstraintSet {
    n: usize,
    ml: BTreeSet<Edge>,
    cl: BTreeSet<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    MustLink,
    CannotLink,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ConstraintKind::MustLink => "ML",
            ConstraintKind::CannotLink => "CL",
        })
    }
}

impl FromStr for ConstraintKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ML" | "ml" => Ok(ConstraintKind::MustLink),
            "CL" | "cl" => Ok(ConstraintKind::CannotLink),
            other => Err(format!("unknown constraint type {other:?}")),
        }
    }
}

/// Which constraint types survive [`ConstraintSet::filter`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FilterMode {
    Both,
    MlOnly,
    ClOnly,
}

impl ConstraintSet {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            ml: BTreeSet::new(),
            cl: BTreeSet::new(),
        }
    }

    /// Builds a set from 0-based pairs.
    pub fn from_pairs<I, J>(n: usize, ml: I, cl: J) -> Result<Self>
    where
        I: IntoIterator<Item = Edge>,
        J: IntoIterator<Item = Edge>,
    {
        let mut s = Self::new(n);
        for (u, v) in ml {
            s.insert(ConstraintKind::MustLink, u, v)?;
        }
        for (u, v) in cl {
            s.insert(ConstraintKind::CannotLink, u, v)?;
        }
        Ok(s)
    }

    /// Adds a pair. The same pair may be recorded under both kinds; that is
    /// what [`ConstraintSet::check_consistency`] reports.
    pub fn insert(&mut self, kind: ConstraintKind, u: usize, v: usize) -> Result<bool> {
        if u == v {
            return Err(Error::InvalidParameter(format!(
                "constraint pair on a single node {}",
                u + 1
            )));
        }
        for node in [u, v] {
            if node >= self.n {
                return Err(Error::NodeOutOfRange {
                    node: node + 1,
                    n: self.n,
                });
            }
        }
        let pair = ordered(u, v);
        Ok(match kind {
            ConstraintKind::MustLink => self.ml.insert(pair),
            ConstraintKind::CannotLink => self.cl.insert(pair),
        })
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn ml(&self) -> &BTreeSet<Edge> {
        &self.ml
    }

    pub fn cl(&self) -> &BTreeSet<Edge> {
        &self.cl
    }

    pub fn len(&self) -> usize {
        self.ml.len() + self.cl.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ml.is_empty() && self.cl.is_empty()
    }

    pub fn is_ml(&self, u: usize, v: usize) -> bool {
        self.ml.contains(&ordered(u, v))
    }

    pub fn is_cl(&self, u: usize, v: usize) -> bool {
        self.cl.contains(&ordered(u, v))
    }

    /// Constraints touching `node`, as `(must-link partners, cannot-link partners)`.
    pub fn partners(&self, node: usize) -> (Vec<usize>, Vec<usize>) {
        let other = |&(a, b): &Edge| -> Option<usize> {
            if a == node {
                Some(b)
            } else if b == node {
                Some(a)
            } else {
                None
            }
        };
        (
            self.ml.iter().filter_map(other).collect(),
            self.cl.iter().filter_map(other).collect(),
        )
    }

    pub fn filter(&self, mode: FilterMode) -> Self {
        let mut out = Self::new(self.n);
        if mode != FilterMode::ClOnly {
            out.ml = self.ml.clone();
        }
        if mode != FilterMode::MlOnly {
            out.cl = self.cl.clone();
        }
        out
    }

    /// Every cannot-link pair that must-link closure would place inside one
    /// class. Empty means the set is consistent.
    pub fn check_consistency(&self) -> Vec<Conflict> {
        let classes = MlClasses::build(self);
        let mut conflicts = Vec::new();
        for &(a, b) in &self.cl {
            if classes.root_of[a] == classes.root_of[b] {
                conflicts.push(Conflict {
                    pivot: classes.representative(a),
                    a,
                    b,
                });
            }
        }
        conflicts
    }

    pub fn is_consistent(&self) -> bool {
        self.check_consistency().is_empty()
    }

    /// Least fixpoint of the two inference rules.
    pub fn enhance(&self) -> Result<(ConstraintSet, ClosureReport)> {
        let conflicts = self.check_consistency();
        if !conflicts.is_empty() {
            return Err(Error::Contradiction(conflicts));
        }

        let classes = MlClasses::build(self);
        // Index the classes touched by any constraint, ordered by smallest member.
        let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let touched: BTreeSet<usize> = self
            .ml
            .iter()
            .chain(self.cl.iter())
            .flat_map(|&(a, b)| [a, b])
            .collect();
        for &node in &touched {
            members.entry(classes.root_of[node]).or_default().push(node);
        }
        let mut ml_classes: Vec<Vec<usize>> = members.into_values().collect();
        ml_classes.sort_by_key(|c| c[0]);
        let mut class_of = vec![usize::MAX; self.n];
        for (idx, class) in ml_classes.iter().enumerate() {
            for &node in class {
                class_of[node] = idx;
            }
        }

        let class_cl: BTreeSet<(usize, usize)> = self
            .cl
            .iter()
            .map(|&(a, b)| ordered(class_of[a], class_of[b]))
            .collect();

        let mut out = Self::new(self.n);
        for class in &ml_classes {
            for (i, &p) in class.iter().enumerate() {
                for &q in &class[i + 1..] {
                    out.ml.insert(ordered(p, q));
                }
            }
        }
        for &(cp, cq) in &class_cl {
            for &p in &ml_classes[cp] {
                for &q in &ml_classes[cq] {
                    out.cl.insert(ordered(p, q));
                }
            }
        }

        let report = ClosureReport {
            added_ml: out.ml.len() - self.ml.len(),
            added_cl: out.cl.len() - self.cl.len(),
            ml_classes,
            class_cl,
        };
        Ok((out, report))
    }

    /// Reads `i<TAB>j<TAB>ML|CL` rows with 1-based ids. Without `n`, the
    /// universe is the largest id seen.
    pub fn load<R: BufRead>(reader: R, n: Option<usize>) -> Result<Self> {
        let mut rows = Vec::new();
        let mut max_id = 0;
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = trimmed.split_whitespace().collect();
            if tokens.len() != 3 {
                return Err(Error::parse(lineno, "expected i<TAB>j<TAB>ML|CL"));
            }
            let mut ids = [0usize; 2];
            for (slot, token) in ids.iter_mut().zip(&tokens[..2]) {
                *slot = token
                    .parse()
                    .ok()
                    .filter(|&id| id >= 1)
                    .ok_or_else(|| Error::parse(lineno, format!("bad node id {token:?}")))?;
            }
            let kind: ConstraintKind = tokens[2].parse().map_err(|m| Error::parse(lineno, m))?;
            if ids[0] == ids[1] {
                return Err(Error::parse(lineno, "constraint pair on a single node"));
            }
            max_id = max_id.max(ids[0]).max(ids[1]);
            rows.push((kind, ids[0] - 1, ids[1] - 1));
        }
        let mut s = Self::new(n.unwrap_or(max_id));
        for (kind, u, v) in rows {
            s.insert(kind, u, v)?;
        }
        Ok(s)
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (kind, pairs) in [
            (ConstraintKind::MustLink, &self.ml),
            (ConstraintKind::CannotLink, &self.cl),
        ] {
            for &(u, v) in pairs {
                writeln!(out, "{}\t{}\t{}", u + 1, v + 1, kind)?;
            }
        }
        Ok(())
    }
}

struct MlClasses {
    root_of: Vec<usize>,
    smallest: BTreeMap<usize, usize>,
}

impl MlClasses {
    fn build(s: &ConstraintSet) -> Self {
        let mut dsu = DisjointSet::new(s.n);
        for &(a, b) in &s.ml {
            dsu.union(a, b);
        }
        let root_of: Vec<usize> = (0..s.n).map(|i| dsu.find(i)).collect();
        let mut smallest = BTreeMap::new();
        for (node, &root) in root_of.iter().enumerate() {
            smallest.entry(root).or_insert(node);
        }
        Self { root_of, smallest }
    }

    fn representative(&self, node: usize) -> usize {
        self.smallest[&self.root_of[node]]
    }
}

/// A cannot-link pair `(a, b)` whose endpoints share the must-link class of `pivot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Conflict {
    pub pivot: usize,
    pub a: usize,
    pub b: usize,
}

impl fmt::Display for Conflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "nodes {} and {} are cannot-link but share the must-link class of node {}",
            self.a + 1,
            self.b + 1,
            self.pivot + 1
        )
    }
}

/// Class-level view of a closure.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClosureReport {
    /// Must-link classes over the nodes that appear in any constraint,
    /// ordered by smallest member (singletons included).
    pub ml_classes: Vec<Vec<usize>>,
    /// Pairs of class indices separated by cannot-link.
    pub class_cl: BTreeSet<(usize, usize)>,
    pub added_ml: usize,
    pub added_cl: usize,
}

/// Samples `round(fraction · m(m−1)/2)` distinct pairs of labeled nodes
/// uniformly without replacement. Same-label pairs become must-link, the
/// rest cannot-link.
pub fn sample_constraints<R: Rng + ?Sized>(
    gt: &GroundTruth,
    n: usize,
    fraction: f64,
    rng: &mut R,
) -> Result<ConstraintSet> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!(
            "constraint fraction {fraction} outside [0, 1]"
        )));
    }
    gt.check_range(n)?;
    let nodes = gt.labeled_nodes();
    let total = pair_count(nodes.len());
    let count = sample_size(fraction, total);
    let mut s = ConstraintSet::new(n);
    if count == 0 {
        return Ok(s);
    }
    for index in rand::seq::index::sample(rng, total, count) {
        let (i, j) = decode_pair(index);
        let (u, v) = (nodes[i], nodes[j]);
        let kind = if gt.label(u) == gt.label(v) {
            ConstraintKind::MustLink
        } else {
            ConstraintKind::CannotLink
        };
        s.insert(kind, u, v)?;
    }
    Ok(s)
}

pub fn pair_count(m: usize) -> usize {
    m * m.saturating_sub(1) / 2
}

/// Round-half-up of `fraction · total`.
pub fn sample_size(fraction: f64, total: usize) -> usize {
    ((fraction * total as f64 + 0.5).floor() as usize).min(total)
}

/// Maps `0..m(m-1)/2` onto pairs `(i, j)`, `i < j`, in colexicographic order.
fn decode_pair(index: usize) -> (usize, usize) {
    let mut j = ((1.0 + (1.0 + 8.0 * index as f64).sqrt()) / 2.0).floor() as usize;
    while j * (j - 1) / 2 > index {
        j -= 1;
    }
    while (j + 1) * j / 2 <= index {
        j += 1;
    }
    (index - j * (j - 1) / 2, j)
}
