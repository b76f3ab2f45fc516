use std::sync::{Arc, Mutex};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matroid::Subset;
use crate::oracle::Objective;

use super::graph::BoostedGraph;

/// How one realization treats an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeState {
    /// Live regardless of boosting (`u < p0`).
    AlwaysLive,
    /// Live only when the head node is boosted (`p0 ≤ u < p1`).
    BoostLive,
    Dead,
}

impl EdgeState {
    pub fn classify(u: f64, p0: f64, p1: f64) -> Self {
        if u < p0 {
            Self::AlwaysLive
        } else if u < p1 {
            Self::BoostLive
        } else {
            Self::Dead
        }
    }

    pub fn is_live(self, head_boosted: bool) -> bool {
        match self {
            Self::AlwaysLive => true,
            Self::BoostLive => head_boosted,
            Self::Dead => false,
        }
    }
}

/// Pre-sampled uniforms `u ∈ [0,1)` addressed by `(seed, sample, edge)`.
///
/// Sample `s` reads ChaCha8 stream `s`; edge `e` takes the 64-bit word pair
/// starting at word `2e`, so any single draw can be regenerated directly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RealizationSet {
    seed: u64,
    samples: usize,
}

impl RealizationSet {
    pub fn new(seed: u64, samples: usize) -> Self {
        Self { seed, samples }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    fn stream(&self, sample: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(sample as u64);
        rng
    }

    pub fn draw(&self, sample: usize, edge: usize) -> f64 {
        let mut rng = self.stream(sample);
        rng.set_word_pos(2 * edge as u128);
        rng.gen()
    }

    /// Draws for edges `0..edges` of one sample.
    pub fn draws(&self, sample: usize, edges: usize) -> Vec<f64> {
        let mut rng = self.stream(sample);
        (0..edges).map(|_| rng.gen()).collect()
    }
}

type Bits = Vec<u64>;

fn bit(bits: &[u64], i: usize) -> bool {
    bits[i / 64] >> (i % 64) & 1 == 1
}

fn set_bit(bits: &mut [u64], i: usize) {
    bits[i / 64] |= 1 << (i % 64);
}

struct BaseReach {
    member: Vec<bool>,
    elements: Vec<usize>,
    reach: Vec<Bits>,
    counts: Vec<u32>,
}

/// Mean number of nodes reached from the seeds over a fixed set of
/// realizations, with the boost set choosing which boost-live edges are live.
///
/// After [`Objective::rebase`] with a set `B`, queries on supersets of `B`
/// only explore what the extra boosted nodes open up.
pub struct MonteCarloOracle {
    graph: Arc<BoostedGraph>,
    samples: usize,
    states: Arc<[EdgeState]>,
    base: Mutex<Option<BaseReach>>,
}

impl MonteCarloOracle {
    pub fn new(graph: impl Into<Arc<BoostedGraph>>, realizations: &RealizationSet) -> Self {
        let graph = graph.into();
        let m = graph.edges().len();
        let mut states = Vec::with_capacity(realizations.samples() * m);
        for s in 0..realizations.samples() {
            for (u, e) in realizations.draws(s, m).into_iter().zip(graph.edges()) {
                states.push(EdgeState::classify(u, e.p0, e.p1));
            }
        }
        Self {
            graph,
            samples: realizations.samples(),
            states: states.into(),
            base: Mutex::new(None),
        }
    }

    /// Same realizations, separate incremental cache; for use on another thread.
    pub fn fork(&self) -> Self {
        Self {
            graph: Arc::clone(&self.graph),
            samples: self.samples,
            states: Arc::clone(&self.states),
            base: Mutex::new(None),
        }
    }

    pub fn graph(&self) -> &BoostedGraph {
        &self.graph
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn state(&self, sample: usize, edge: usize) -> EdgeState {
        self.states[sample * self.graph.edges().len() + edge]
    }

    /// Reach of every sample, from scratch.
    pub fn sample_reach(&self, boosted: &Subset) -> Vec<u32> {
        let mut stack = Vec::new();
        (0..self.samples)
            .map(|s| {
                let mut reached = self.empty_bits();
                self.full_reach(s, boosted, &mut reached, &mut stack)
            })
            .collect()
    }

    /// Sample mean and its standard error.
    pub fn value_with_stderr(&self, boosted: &Subset) -> (f64, f64) {
        let counts = self.sample_reach(boosted);
        let n = counts.len() as f64;
        let mean = counts.iter().map(|&c| c as f64).sum::<f64>() / n;
        if counts.len() < 2 {
            return (mean, 0.0);
        }
        let var = counts
            .iter()
            .map(|&c| (c as f64 - mean).powi(2))
            .sum::<f64>()
            / (n - 1.0);
        (mean, (var / n).sqrt())
    }

    fn empty_bits(&self) -> Bits {
        vec![0; self.graph.nodes().div_ceil(64)]
    }

    fn full_reach(
        &self,
        sample: usize,
        boosted: &Subset,
        reached: &mut Bits,
        stack: &mut Vec<usize>,
    ) -> u32 {
        stack.clear();
        let mut count = 0;
        for &v in self.graph.seeds() {
            set_bit(reached, v);
            stack.push(v);
            count += 1;
        }
        count + self.explore(sample, boosted, reached, stack)
    }

    /// Depth-first expansion from `stack`; returns the number of new nodes.
    fn explore(
        &self,
        sample: usize,
        boosted: &Subset,
        reached: &mut Bits,
        stack: &mut Vec<usize>,
    ) -> u32 {
        let m = self.graph.edges().len();
        let states = &self.states[sample * m..(sample + 1) * m];
        let mut count = 0;
        while let Some(u) = stack.pop() {
            for &ei in self.graph.out_edges(u) {
                let v = self.graph.edge(ei).dst;
                if bit(reached, v) || !states[ei].is_live(boosted.contains(v)) {
                    continue;
                }
                set_bit(reached, v);
                stack.push(v);
                count += 1;
            }
        }
        count
    }

    /// Those of `extra` (boosted, outside the base) that a boost-live edge
    /// from the current reach opens. Any path that escapes a base reach must
    /// start this way.
    fn openings(&self, sample: usize, extra: &[usize], reached: &Bits, out: &mut Vec<usize>) {
        let m = self.graph.edges().len();
        let states = &self.states[sample * m..(sample + 1) * m];
        out.clear();
        for &v in extra {
            if bit(reached, v) {
                continue;
            }
            let opened = self.graph.in_edges(v).iter().any(|&ei| {
                states[ei] == EdgeState::BoostLive && bit(reached, self.graph.edge(ei).src)
            });
            if opened {
                out.push(v);
            }
        }
    }

    /// Grows `reached` (the closed reach of the base) to the reach of `boosted`.
    fn extend_in_place(
        &self,
        sample: usize,
        extra: &[usize],
        reached: &mut Bits,
        boosted: &Subset,
        stack: &mut Vec<usize>,
    ) -> u32 {
        self.openings(sample, extra, reached, stack);
        for &v in stack.iter() {
            set_bit(reached, v);
        }
        stack.len() as u32 + self.explore(sample, boosted, reached, stack)
    }
}

impl Objective for MonteCarloOracle {
    fn ground_size(&self) -> usize {
        self.graph.nodes()
    }

    fn value(&self, set: &Subset) -> f64 {
        let guard = self.base.lock().expect("base cache poisoned");
        let mut stack = Vec::new();
        let covered = guard
            .as_ref()
            .filter(|base| base.elements.iter().all(|&e| set.contains(e)));
        let total: u64 = if let Some(base) = covered {
            let extra: Vec<usize> = set.iter().filter(|&e| !base.member[e]).collect();
            (0..self.samples)
                .map(|s| {
                    self.openings(s, &extra, &base.reach[s], &mut stack);
                    let count = base.counts[s] as u64;
                    if stack.is_empty() {
                        return count;
                    }
                    let mut reached = base.reach[s].clone();
                    for &v in &stack {
                        set_bit(&mut reached, v);
                    }
                    count
                        + stack.len() as u64
                        + self.explore(s, set, &mut reached, &mut stack) as u64
                })
                .sum()
        } else {
            drop(guard);
            self.sample_reach(set).iter().map(|&c| c as u64).sum()
        };
        total as f64 / self.samples.max(1) as f64
    }

    fn rebase(&self, base: &Subset) {
        let mut guard = self.base.lock().expect("base cache poisoned");
        let mut stack = Vec::new();
        match guard.as_mut() {
            Some(old) if old.elements.iter().all(|&e| base.contains(e)) => {
                let extra: Vec<usize> = base.iter().filter(|&e| !old.member[e]).collect();
                for s in 0..self.samples {
                    let grown =
                        self.extend_in_place(s, &extra, &mut old.reach[s], base, &mut stack);
                    old.counts[s] += grown;
                }
                old.member.copy_from_slice(base.membership());
                old.elements = base.iter().collect();
            }
            _ => {
                let mut reach = Vec::with_capacity(self.samples);
                let mut counts = Vec::with_capacity(self.samples);
                for s in 0..self.samples {
                    let mut reached = self.empty_bits();
                    counts.push(self.full_reach(s, base, &mut reached, &mut stack));
                    reach.push(reached);
                }
                *guard = Some(BaseReach {
                    member: base.membership().to_vec(),
                    elements: base.iter().collect(),
                    reach,
                    counts,
                });
            }
        }
    }
}

pub const MAX_EXACT_EDGES: usize = 12;

/// Exact expected reach: the sum over all `3^|E|` edge-state assignments of
/// the assignment's probability times the reach it yields.
pub struct ExactOracle {
    graph: BoostedGraph,
    /// (probability, always-live mask, boost-live mask), zero-mass entries dropped
    assignments: Vec<(f64, u32, u32)>,
    /// reach for every live-edge mask
    reach: Vec<f64>,
    /// edges entering each node, as a mask
    heads: Vec<u32>,
}

impl ExactOracle {
    pub fn new(graph: BoostedGraph) -> Result<Self> {
        let m = graph.edges().len();
        if m > MAX_EXACT_EDGES {
            return Err(Error::InstanceTooLarge {
                what: "3^|E| edge-state assignments",
                size: 3u128.pow(m as u32),
                cap: 3u128.pow(MAX_EXACT_EDGES as u32),
            });
        }
        let mut assignments = vec![(1.0, 0u32, 0u32)];
        for (i, e) in graph.edges().iter().enumerate() {
            let options = [
                (e.p0, 1u32 << i, 0),
                (e.p1 - e.p0, 0, 1u32 << i),
                (1.0 - e.p1, 0, 0),
            ];
            assignments = assignments
                .iter()
                .flat_map(|&(p, a, b)| {
                    options
                        .iter()
                        .map(move |&(q, da, db)| (p * q, a | da, b | db))
                })
                .filter(|&(p, _, _)| p > 0.0)
                .collect();
        }
        let mut heads = vec![0u32; graph.nodes()];
        for (i, e) in graph.edges().iter().enumerate() {
            heads[e.dst] |= 1 << i;
        }
        let reach = (0..1u32 << m)
            .map(|live| reach_count(&graph, live) as f64)
            .collect();
        Ok(Self {
            graph,
            assignments,
            reach,
            heads,
        })
    }

    pub fn graph(&self) -> &BoostedGraph {
        &self.graph
    }

    /// Total probability mass of the enumerated assignments.
    pub fn total_probability(&self) -> f64 {
        self.assignments.iter().map(|a| a.0).sum()
    }
}

fn reach_count(graph: &BoostedGraph, live: u32) -> usize {
    let mut reached = vec![false; graph.nodes()];
    let mut stack = Vec::new();
    for &v in graph.seeds() {
        reached[v] = true;
        stack.push(v);
    }
    let mut count = stack.len();
    while let Some(u) = stack.pop() {
        for &ei in graph.out_edges(u) {
            let v = graph.edge(ei).dst;
            if live >> ei & 1 == 1 && !reached[v] {
                reached[v] = true;
                stack.push(v);
                count += 1;
            }
        }
    }
    count
}

impl Objective for ExactOracle {
    fn ground_size(&self) -> usize {
        self.graph.nodes()
    }

    fn value(&self, set: &Subset) -> f64 {
        let open = set.iter().fold(0u32, |acc, v| acc | self.heads[v]);
        self.assignments
            .iter()
            .map(|&(p, always, boost)| p * self.reach[(always | (boost & open)) as usize])
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::influence::graph::WeightedEdge;
    use crate::rng::rng_from_seed;

    fn edge(src: usize, dst: usize, p0: f64, p1: f64) -> WeightedEdge {
        WeightedEdge { src, dst, p0, p1 }
    }

    fn set(n: usize, xs: &[usize]) -> Subset {
        Subset::from_elements(n, xs).unwrap()
    }

    #[test]
    fn classification_partitions_unit_interval() {
        assert_eq!(EdgeState::classify(0.1, 0.25, 0.5), EdgeState::AlwaysLive);
        assert_eq!(EdgeState::classify(0.3, 0.25, 0.5), EdgeState::BoostLive);
        assert_eq!(EdgeState::classify(0.5, 0.25, 0.5), EdgeState::Dead);
        assert_eq!(EdgeState::classify(0.0, 0.0, 0.0), EdgeState::Dead);
    }

    #[test]
    fn draws_are_addressable() {
        let r = RealizationSet::new(77, 3);
        let seq = r.draws(2, 10);
        for (e, &u) in seq.iter().enumerate() {
            assert_eq!(r.draw(2, e), u);
            assert!((0.0..1.0).contains(&u));
        }
        assert_ne!(r.draws(1, 10), seq);
    }

    #[test]
    fn single_edge_exact() {
        let g = BoostedGraph::new(2, vec![edge(0, 1, 0.25, 0.5)], vec![0]).unwrap();
        let f = ExactOracle::new(g).unwrap();
        assert!((f.value(&set(2, &[])) - 1.25).abs() < 1e-12);
        assert!((f.value(&set(2, &[1])) - 1.5).abs() < 1e-12);
        assert!((f.total_probability() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_weights_ignore_boosting() {
        let g = BoostedGraph::new(
            3,
            vec![
                edge(0, 1, 0.4, 0.4),
                edge(1, 2, 0.7, 0.7),
                edge(0, 2, 0.1, 0.1),
            ],
            vec![0],
        )
        .unwrap();
        let f = ExactOracle::new(g).unwrap();
        let base = f.value(&set(3, &[]));
        assert!((f.value(&set(3, &[0, 1, 2])) - base).abs() < 1e-12);
    }

    #[test]
    fn path_hand_trace() {
        // p0 = 0, p1 = 1: each edge is boost-live whatever the draw
        let g = BoostedGraph::new(3, vec![edge(0, 1, 0.0, 1.0), edge(1, 2, 0.0, 1.0)], vec![0])
            .unwrap();
        let f = MonteCarloOracle::new(g, &RealizationSet::new(1, 1));
        let empty = f.value(&set(3, &[]));
        assert_eq!(empty, 1.0);
        assert_eq!(f.value(&set(3, &[1, 2])) - empty, 2.0);
        assert_eq!(f.value(&set(3, &[1])) - empty, 1.0);
        assert_eq!(f.value(&set(3, &[2])) - empty, 0.0);
    }

    #[test]
    fn full_boost_with_certain_edges_reaches_component() {
        let g = BoostedGraph::new(
            5,
            vec![
                edge(0, 1, 0.1, 1.0),
                edge(1, 2, 0.0, 1.0),
                edge(3, 4, 0.5, 1.0),
            ],
            vec![0],
        )
        .unwrap();
        let f = MonteCarloOracle::new(g, &RealizationSet::new(3, 20));
        assert_eq!(f.value(&set(5, &[0, 1, 2, 3, 4])), 3.0);
    }

    fn random_instance(seed: u64, nodes: usize, edges: usize) -> BoostedGraph {
        let mut rng = rng_from_seed(seed);
        let es = (0..edges)
            .map(|_| {
                let src = rng.gen_range(0..nodes);
                let dst = (src + rng.gen_range(1..nodes)) % nodes;
                let p0: f64 = rng.gen_range(0.0..0.6);
                let p1 = (p0 + rng.gen_range(0.0..0.4)).min(1.0);
                edge(src, dst, p0, p1)
            })
            .collect();
        BoostedGraph::new(nodes, es, vec![0]).unwrap()
    }

    #[test]
    fn incremental_matches_scratch() {
        let g = random_instance(11, 30, 90);
        let f = MonteCarloOracle::new(g, &RealizationSet::new(5, 40));
        let mut rng = rng_from_seed(12);
        let mut s = Subset::empty(30);
        for _ in 0..12 {
            f.rebase(&s);
            let e = loop {
                let e = rng.gen_range(0..30);
                if !s.contains(e) {
                    break e;
                }
            };
            let probe = s.with(e).unwrap();
            let scratch: u32 = f.sample_reach(&probe).iter().sum();
            assert_eq!(f.value(&probe), scratch as f64 / 40.0);
            s.insert(e).unwrap();
        }
        // rebasing onto a smaller set starts over
        f.rebase(&Subset::from_elements(30, &[s.iter().next().unwrap()]).unwrap());
        let scratch: u32 = f.sample_reach(&s).iter().sum();
        assert_eq!(f.value(&s), scratch as f64 / 40.0);
        // a non-superset falls back to the full computation
        let other = Subset::from_elements(30, &[29]).unwrap();
        let scratch: u32 = f.sample_reach(&other).iter().sum();
        assert_eq!(f.value(&other), scratch as f64 / 40.0);
    }

    #[test]
    fn pathwise_monotone() {
        let g = random_instance(21, 15, 40);
        let f = MonteCarloOracle::new(g, &RealizationSet::new(8, 30));
        let mut rng = rng_from_seed(22);
        let mut s = Subset::empty(15);
        let mut prev = f.sample_reach(&s);
        for e in (0..15).filter(|_| rng.gen_bool(0.7)) {
            s.insert(e).unwrap();
            let next = f.sample_reach(&s);
            assert!(prev.iter().zip(&next).all(|(a, b)| a <= b));
            assert!(next.iter().all(|&c| c >= 1 && c <= 15));
            prev = next;
        }
    }

    #[test]
    fn exact_rejects_large_graphs() {
        let g = random_instance(1, 6, 13);
        assert!(matches!(
            ExactOracle::new(g),
            Err(Error::InstanceTooLarge { .. })
        ));
    }

    #[test]
    fn monte_carlo_tracks_exact() {
        let g = random_instance(31, 5, 8);
        let exact = ExactOracle::new(g.clone()).unwrap();
        let mc = MonteCarloOracle::new(g, &RealizationSet::new(9, 100_000));
        for members in [vec![], vec![1, 3], vec![0, 1, 2, 3, 4]] {
            let s = set(5, &members);
            let (mean, se) = mc.value_with_stderr(&s);
            assert!((mean - exact.value(&s)).abs() <= 4.0 * se + 1e-12);
        }
    }
}
