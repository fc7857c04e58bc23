use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::graph::GroundTruth;

/// Total assignment of nodes `0..n` to community indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Partition {
    assign: Vec<usize>,
}

impl Partition {
    pub fn new(assign: Vec<usize>) -> Self {
        Self { assign }
    }

    pub fn single(n: usize) -> Self {
        Self { assign: vec![0; n] }
    }

    pub fn len(&self) -> usize {
        self.assign.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assign.is_empty()
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assign[node]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.assign
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.assign
    }

    /// Number of distinct community indices actually used.
    pub fn community_count(&self) -> usize {
        self.assign.iter().collect::<BTreeSet<_>>().len()
    }

    /// Relabels communities to `0..c` in order of first appearance.
    pub fn canonical(&self) -> Self {
        let mut ids = HashMap::new();
        let assign = self
            .assign
            .iter()
            .map(|&c| {
                let next = ids.len();
                *ids.entry(c).or_insert(next)
            })
            .collect();
        Self { assign }
    }

    /// Assignments of the labeled nodes, paired with their true labels.
    pub fn restrict_to(&self, gt: &GroundTruth) -> Result<(Vec<usize>, Vec<usize>)> {
        let mut truth = Vec::with_capacity(gt.labeled_count());
        let mut found = Vec::with_capacity(gt.labeled_count());
        for (node, label) in gt.iter() {
            let c = *self
                .assign
                .get(node)
                .ok_or(Error::Coverage { node: node + 1 })?;
            truth.push(label);
            found.push(c);
        }
        Ok((truth, found))
    }

    /// Reads `node<TAB>community` rows (1-based ids). Community tokens are
    /// arbitrary and mapped to indices by first appearance.
    ///
    /// With `n = Some(count)` every node in `1..=count` must be listed;
    /// otherwise the partition spans `1..=max id`, which must be contiguous.
    pub fn load<R: BufRead>(reader: R, n: Option<usize>) -> Result<Self> {
        let mut rows: BTreeMap<usize, usize> = BTreeMap::new();
        let mut ids: HashMap<String, usize> = HashMap::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut tokens = trimmed.split_whitespace();
            let node: usize = tokens
                .next()
                .and_then(|t| t.parse().ok())
                .filter(|&id| id >= 1)
                .ok_or_else(|| Error::parse(lineno, "expected a 1-based node id"))?;
            let community = tokens
                .next()
                .ok_or_else(|| Error::parse(lineno, "missing community"))?;
            if tokens.next().is_some() {
                return Err(Error::parse(lineno, "expected node<TAB>community"));
            }
            let next = ids.len();
            let c = *ids.entry(community.to_string()).or_insert(next);
            if rows.insert(node - 1, c).is_some() {
                return Err(Error::DuplicateLabel { node });
            }
        }
        let count = n.unwrap_or_else(|| rows.keys().next_back().map_or(0, |&m| m + 1));
        if let Some((&node, _)) = rows.range(count..).next() {
            return Err(Error::NodeOutOfRange {
                node: node + 1,
                n: count,
            });
        }
        let mut assign = Vec::with_capacity(count);
        for node in 0..count {
            match rows.get(&node) {
                Some(&c) => assign.push(c),
                None => return Err(Error::Coverage { node: node + 1 }),
            }
        }
        Ok(Self { assign })
    }

    pub fn write<W: Write>(&self, mut out: W) -> Result<()> {
        for (node, c) in self.assign.iter().enumerate() {
            writeln!(out, "{}\t{}", node + 1, c + 1)?;
        }
        Ok(())
    }
}

impl From<Vec<usize>> for Partition {
    fn from(assign: Vec<usize>) -> Self {
        Self::new(assign)
    }
}
