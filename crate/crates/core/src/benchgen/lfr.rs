//! LFR-style benchmark: power-law degrees and community sizes, a fixed
//! mixing parameter, configuration-model wiring repaired by edge swaps.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::powerlaw::DiscretePowerLaw;
use crate::error::{Error, GenerationDiagnostics, Result};
use crate::graph::{Edge, Graph, GroundTruth};
use crate::seed;

#[derive(Debug, Clone, PartialEq)]
pub struct LfrParams {
    pub n: usize,
    pub avg_deg: f64,
    pub max_deg: usize,
    /// Degree exponent.
    pub gamma: f64,
    /// Community-size exponent.
    pub beta: f64,
    /// Fraction of each node's neighbors outside its community.
    pub mu: f64,
    /// Defaults to `max(10, ⌈(1−mu)·avg_deg⌉ + 1)`.
    pub min_comm: Option<usize>,
    /// Defaults to `min(100, n)`.
    pub max_comm: Option<usize>,
    /// Rewiring sweeps allowed per wiring stage.
    pub max_sweeps: usize,
}

impl Default for LfrParams {
    fn default() -> Self {
        Self {
            n: 1000,
            avg_deg: 20.0,
            max_deg: 50,
            gamma: 2.0,
            beta: 1.0,
            mu: 0.9,
            min_comm: None,
            max_comm: None,
            max_sweeps: 100,
        }
    }
}

impl LfrParams {
    pub fn community_bounds(&self) -> (usize, usize) {
        let min = self.min_comm.unwrap_or_else(|| {
            let internal = ((1.0 - self.mu) * self.avg_deg).ceil().max(0.0) as usize;
            10.max(internal + 1)
        });
        let max = self.max_comm.unwrap_or_else(|| 100.min(self.n));
        (min, max)
    }

    fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::InvalidParameter(m));
        if !(0.0..=1.0).contains(&self.mu) {
            return fail(format!("mu = {} outside [0, 1]", self.mu));
        }
        if self.n < 2 {
            return fail("LFR needs at least two nodes".into());
        }
        if !(self.avg_deg >= 1.0 && self.avg_deg <= self.max_deg as f64) {
            return fail(format!(
                "average degree {} must lie in [1, max_deg = {}]",
                self.avg_deg, self.max_deg
            ));
        }
        if self.max_deg >= self.n {
            return fail(format!(
                "max_deg {} must be below n = {}",
                self.max_deg, self.n
            ));
        }
        let (min, max) = self.community_bounds();
        if min == 0 || min > max || max > self.n {
            return fail(format!(
                "community sizes [{min}, {max}] incompatible with n = {}",
                self.n
            ));
        }
        Ok(())
    }
}

pub fn generate_lfr(p: &LfrParams, seed: u64) -> Result<(Graph, GroundTruth)> {
    p.validate()?;
    let mut rng = seed::rng(seed);
    let n = p.n;

    let degree_law = DiscretePowerLaw::calibrated(p.avg_deg, p.max_deg, p.gamma)?;
    let mut degree: Vec<usize> = (0..n).map(|_| degree_law.sample(&mut rng)).collect();
    if degree.iter().sum::<usize>() % 2 == 1 {
        let candidates: Vec<usize> = (0..n).filter(|&i| degree[i] < p.max_deg).collect();
        let &i = candidates
            .choose(&mut rng)
            .expect("max_deg exceeds the minimum degree");
        degree[i] += 1;
    }

    let mut internal: Vec<usize> = degree
        .iter()
        .map(|&k| ((1.0 - p.mu) * k as f64).round() as usize)
        .collect();

    let (min_comm, max_comm) = p.community_bounds();
    let sizes = community_sizes(n, min_comm, max_comm, p.beta, &mut rng)?;
    let community = assign_communities(&internal, &sizes, &mut rng)?;

    let mut members = vec![Vec::new(); sizes.len()];
    for (node, &c) in community.iter().enumerate() {
        members[c].push(node);
    }
    fix_internal_parity(
        &mut internal,
        &mut degree,
        &members,
        p.mu,
        p.max_deg,
        &mut rng,
    );

    // Internal edges, one configuration model per community.
    let mut internal_edges = HashSet::new();
    for group in &members {
        let stubs: Vec<usize> = group
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, internal[v]))
            .collect();
        let mut edges = pair_stubs(stubs, &mut rng);
        rewire(
            &mut edges,
            |u, v| u != v,
            &HashSet::new(),
            p.max_sweeps,
            "internal",
            &mut rng,
        )?;
        internal_edges.extend(edges.into_iter().map(ordered));
    }

    let stubs: Vec<usize> = (0..n)
        .flat_map(|v| std::iter::repeat_n(v, degree[v] - internal[v]))
        .collect();
    let mut external = pair_stubs(stubs, &mut rng);
    rewire(
        &mut external,
        |u, v| community[u] != community[v],
        &internal_edges,
        p.max_sweeps,
        "external",
        &mut rng,
    )?;

    let graph = Graph::from_edges(n, internal_edges.into_iter().chain(external))?;
    Ok((graph, GroundTruth::from_assignment(&community)))
}

fn ordered((u, v): Edge) -> Edge {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Power-law sizes in `[min, max]` summing to exactly `n`.
fn community_sizes(
    n: usize,
    min: usize,
    max: usize,
    beta: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let law = DiscretePowerLaw::new(min as f64, max, beta)?;
    let mut sizes: Vec<usize> = Vec::new();
    let mut total = 0;
    for _ in 0..10_000 {
        while total < n {
            let s = law.sample(rng);
            sizes.push(s);
            total += s;
        }
        let excess = total - n;
        let slack: usize = sizes.iter().map(|&s| s - min).sum();
        if excess <= slack {
            for _ in 0..excess {
                let shrinkable: Vec<usize> = (0..sizes.len()).filter(|&i| sizes[i] > min).collect();
                let &i = shrinkable.choose(rng).expect("slack covers the excess");
                sizes[i] -= 1;
            }
            return Ok(sizes);
        }
        total -= sizes.pop().expect("non-empty when over n");
    }
    Err(Error::GenerationFailure(GenerationDiagnostics {
        stage: "community size",
        sweeps: 10_000,
        bad_edges: 0,
        total_edges: 0,
    }))
}

/// Places nodes, largest internal degree first, into communities that can
/// host all their internal neighbors, choosing proportionally to free slots.
fn assign_communities(
    internal: &[usize],
    sizes: &[usize],
    rng: &mut ChaCha8Rng,
) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..internal.len()).collect();
    order.sort_by_key(|&v| std::cmp::Reverse(internal[v]));
    let mut free = sizes.to_vec();
    let mut community = vec![0; internal.len()];
    for (placed, &v) in order.iter().enumerate() {
        let feasible: Vec<usize> = (0..sizes.len())
            .filter(|&c| free[c] > 0 && sizes[c] > internal[v])
            .collect();
        let slots: usize = feasible.iter().map(|&c| free[c]).sum();
        if slots == 0 {
            return Err(Error::GenerationFailure(GenerationDiagnostics {
                stage: "community assignment",
                sweeps: 0,
                bad_edges: internal.len() - placed,
                total_edges: internal.len(),
            }));
        }
        let mut pick = rng.gen_range(0..slots);
        let mut chosen = feasible[0];
        for &c in &feasible {
            if pick < free[c] {
                chosen = c;
                break;
            }
            pick -= free[c];
        }
        free[chosen] -= 1;
        community[v] = chosen;
    }
    Ok(community)
}

/// Makes every community's internal stub total even by moving one stub
/// between the internal and external side of a random member. With `mu = 0`
/// there is no external side, so that member's degree changes by one instead.
fn fix_internal_parity(
    internal: &mut [usize],
    degree: &mut [usize],
    members: &[Vec<usize>],
    mu: f64,
    max_deg: usize,
    rng: &mut ChaCha8Rng,
) {
    for group in members {
        if group.iter().map(|&v| internal[v]).sum::<usize>() % 2 == 0 {
            continue;
        }
        let mut shuffled = group.clone();
        shuffled.shuffle(rng);
        for &v in &shuffled {
            let room = internal[v] + 1 < group.len();
            if mu == 0.0 {
                if degree[v] < max_deg && room {
                    degree[v] += 1;
                    internal[v] += 1;
                    break;
                } else if degree[v] > 1 {
                    degree[v] -= 1;
                    internal[v] -= 1;
                    break;
                }
                continue;
            }
            let target = (1.0 - mu) * degree[v] as f64;
            let can_grow = internal[v] < degree[v] && room;
            let can_shrink = internal[v] > 0;
            let grow = if can_grow && can_shrink {
                target >= internal[v] as f64
            } else {
                can_grow
            };
            if grow {
                internal[v] += 1;
                break;
            } else if can_shrink {
                internal[v] -= 1;
                break;
            }
        }
    }
}

fn pair_stubs(mut stubs: Vec<usize>, rng: &mut ChaCha8Rng) -> Vec<Edge> {
    stubs.shuffle(rng);
    stubs.chunks_exact(2).map(|c| (c[0], c[1])).collect()
}

/// Degree-preserving double-edge swaps until every edge satisfies `valid`,
/// appears once, and avoids `forbidden`.
fn rewire<F>(
    edges: &mut [Edge],
    valid: F,
    forbidden: &HashSet<Edge>,
    max_sweeps: usize,
    stage: &'static str,
    rng: &mut ChaCha8Rng,
) -> Result<()>
where
    F: Fn(usize, usize) -> bool,
{
    let mut w = Wiring {
        counts: HashMap::new(),
        valid,
        forbidden,
    };
    for &e in edges.iter() {
        w.adjust(e, true);
    }

    let m = edges.len();
    for sweep in 0..=max_sweeps {
        let bad: Vec<usize> = (0..m).filter(|&i| w.is_bad(edges[i])).collect();
        if bad.is_empty() {
            return Ok(());
        }
        if sweep == max_sweeps || m < 2 {
            return Err(Error::GenerationFailure(GenerationDiagnostics {
                stage,
                sweeps: sweep,
                bad_edges: bad.len(),
                total_edges: m,
            }));
        }
        for i in bad {
            if !w.is_bad(edges[i]) {
                continue;
            }
            // Random partners first, then every partner from a random offset.
            let offset = rng.gen_range(0..m);
            let candidates: Vec<usize> = (0..50)
                .map(|_| rng.gen_range(0..m))
                .chain((0..m).map(|t| (offset + t) % m))
                .collect();
            let fixed = candidates
                .into_iter()
                .any(|j| j != i && w.swap(edges, i, j, rng.gen(), false));
            if !fixed {
                // Dense groups can trap strict moves; drift sideways instead.
                for _ in 0..50 {
                    let j = rng.gen_range(0..m);
                    if j != i && w.swap(edges, i, j, rng.gen(), true) {
                        break;
                    }
                }
            }
        }
    }
    unreachable!("loop returns on its last sweep")
}

struct Wiring<'a, F> {
    counts: HashMap<Edge, usize>,
    valid: F,
    forbidden: &'a HashSet<Edge>,
}

impl<F: Fn(usize, usize) -> bool> Wiring<'_, F> {
    fn multiplicity(&self, e: Edge) -> usize {
        self.counts.get(&ordered(e)).copied().unwrap_or(0)
    }

    fn is_bad(&self, e: Edge) -> bool {
        !(self.valid)(e.0, e.1) || self.forbidden.contains(&ordered(e)) || self.multiplicity(e) > 1
    }

    fn adjust(&mut self, e: Edge, up: bool) {
        let key = ordered(e);
        if up {
            *self.counts.entry(key).or_default() += 1;
        } else {
            let c = self.counts.get_mut(&key).expect("edge is counted");
            *c -= 1;
            if *c == 0 {
                self.counts.remove(&key);
            }
        }
    }

    /// Swaps the endpoints of edges `i` and `j`. A strict swap must leave both
    /// new edges valid; a neutral one must not raise the number of bad edges
    /// among the two.
    fn swap(&mut self, edges: &mut [Edge], i: usize, j: usize, cross: bool, neutral: bool) -> bool {
        let (a, b) = edges[i];
        let (c, d) = edges[j];
        let (e1, e2) = if cross {
            ((a, d), (b, c))
        } else {
            ((a, c), (b, d))
        };
        let before = self.is_bad(edges[i]) as usize + self.is_bad(edges[j]) as usize;
        self.adjust(edges[i], false);
        self.adjust(edges[j], false);
        let after = if ordered(e1) == ordered(e2) {
            2
        } else {
            let bad = |w: &Self, e: Edge| {
                (!(w.valid)(e.0, e.1) || w.forbidden.contains(&ordered(e)) || w.multiplicity(e) > 0)
                    as usize
            };
            bad(self, e1) + bad(self, e2)
        };
        let accept = if neutral { after <= before } else { after == 0 };
        if accept {
            self.adjust(e1, true);
            self.adjust(e2, true);
            edges[i] = e1;
            edges[j] = e2;
        } else {
            self.adjust(edges[i], true);
            self.adjust(edges[j], true);
        }
        accept
    }
}
