use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matroid::PartitionMatroid;

/// Directed edge with its base and boosted activation probabilities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedEdge {
    pub src: usize,
    pub dst: usize,
    pub p0: f64,
    pub p1: f64,
}

/// Unweighted directed graph as read from an edge list.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedGraph {
    pub nodes: usize,
    pub arcs: Vec<(usize, usize)>,
    /// `original_ids[v]` is the id node `v` had in the input.
    pub original_ids: Vec<u64>,
    pub self_loops_dropped: usize,
}

impl DirectedGraph {
    /// Builds a graph on `0..nodes`, dropping self-loops and repeated arcs.
    pub fn from_arcs(nodes: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut kept = Vec::new();
        let mut self_loops_dropped = 0;
        for (u, v) in arcs {
            for node in [u, v] {
                if node >= nodes {
                    return Err(Error::NodeOutOfRange { node, nodes });
                }
            }
            if u == v {
                self_loops_dropped += 1;
            } else if seen.insert((u, v)) {
                kept.push((u, v));
            }
        }
        Ok(Self {
            nodes,
            arcs: kept,
            original_ids: (0..nodes as u64).collect(),
            self_loops_dropped,
        })
    }

    pub fn in_degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes];
        for &(_, v) in &self.arcs {
            d[v] += 1;
        }
        d
    }

    /// In-degree plus out-degree.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.nodes];
        for &(u, v) in &self.arcs {
            d[u] += 1;
            d[v] += 1;
        }
        d
    }

    /// Node of largest total degree, lowest id on ties.
    pub fn highest_degree_node(&self) -> Option<usize> {
        let d = self.degrees();
        (0..self.nodes).rev().max_by_key(|&v| d[v])
    }

    /// Attaches the degree-based weights and a seed set.
    pub fn with_degree_weights(&self, seeds: Vec<usize>) -> Result<BoostedGraph> {
        BoostedGraph::new(self.nodes, assign_degree_weights(self), seeds)
    }
}

/// Parses a whitespace separated edge list. Lines starting with `#` and blank
/// lines are skipped; ids are remapped densely in ascending order of the
/// input ids.
pub fn parse_snap_edgelist(text: &str, treat_undirected: bool) -> Result<DirectedGraph> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let malformed = || Error::MalformedLine {
            line: i + 1,
            content: line.to_string(),
        };
        let mut tokens = trimmed.split_whitespace();
        let (Some(a), Some(b), None) = (tokens.next(), tokens.next(), tokens.next()) else {
            return Err(malformed());
        };
        let a: u64 = a.parse().map_err(|_| malformed())?;
        let b: u64 = b.parse().map_err(|_| malformed())?;
        pairs.push((a, b));
    }

    let mut ids = BTreeMap::new();
    for &(a, b) in &pairs {
        ids.insert(a, 0);
        ids.insert(b, 0);
    }
    for (dense, slot) in ids.values_mut().enumerate() {
        *slot = dense;
    }
    let arcs = pairs.iter().flat_map(|&(a, b)| {
        let (u, v) = (ids[&a], ids[&b]);
        let back = treat_undirected.then_some((v, u));
        std::iter::once((u, v)).chain(back)
    });
    let mut graph = DirectedGraph::from_arcs(ids.len(), arcs)?;
    if treat_undirected {
        // each undirected self-loop was emitted twice
        graph.self_loops_dropped /= 2;
    }
    graph.original_ids = ids.into_keys().collect();
    Ok(graph)
}

pub fn load_snap_edgelist(path: &Path, treat_undirected: bool) -> Result<DirectedGraph> {
    parse_snap_edgelist(&fs::read_to_string(path)?, treat_undirected)
}

/// `p0 = 1/d_v`, `p1 = min(2/d_v, 1)` for every edge into `v`.
pub fn assign_degree_weights(graph: &DirectedGraph) -> Vec<WeightedEdge> {
    let d = graph.in_degrees();
    graph
        .arcs
        .iter()
        .map(|&(src, dst)| {
            let dv = d[dst] as f64;
            WeightedEdge {
                src,
                dst,
                p0: 1.0 / dv,
                p1: (2.0 / dv).min(1.0),
            }
        })
        .collect()
}

/// Random undirected graph with edge probability `avg_degree/(nodes−1)`,
/// each edge stored as two arcs.
pub fn random_graph<R: Rng + ?Sized>(nodes: usize, avg_degree: f64, rng: &mut R) -> DirectedGraph {
    let p = if nodes > 1 {
        (avg_degree / (nodes - 1) as f64).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut arcs = Vec::new();
    for u in 0..nodes {
        for v in u + 1..nodes {
            if rng.gen_bool(p) {
                arcs.push((u, v));
                arcs.push((v, u));
            }
        }
    }
    DirectedGraph::from_arcs(nodes, arcs).expect("ids in range")
}

/// Directed graph with two-weight edges and a seed set `I`, stored with
/// both out- and in-adjacency.
#[derive(Debug, Clone)]
pub struct BoostedGraph {
    nodes: usize,
    edges: Vec<WeightedEdge>,
    seeds: Vec<usize>,
    out_offsets: Vec<usize>,
    out_index: Vec<usize>,
    in_offsets: Vec<usize>,
    in_index: Vec<usize>,
}

impl BoostedGraph {
    pub fn new(nodes: usize, edges: Vec<WeightedEdge>, mut seeds: Vec<usize>) -> Result<Self> {
        for (i, e) in edges.iter().enumerate() {
            for node in [e.src, e.dst] {
                if node >= nodes {
                    return Err(Error::NodeOutOfRange { node, nodes });
                }
            }
            if !(0.0 <= e.p0 && e.p0 <= e.p1 && e.p1 <= 1.0) {
                return Err(Error::InvalidProbability {
                    edge: i,
                    p0: e.p0,
                    p1: e.p1,
                });
            }
        }
        if seeds.is_empty() {
            return Err(Error::EmptySeedSet);
        }
        if let Some(&node) = seeds.iter().find(|&&s| s >= nodes) {
            return Err(Error::NodeOutOfRange { node, nodes });
        }
        seeds.sort_unstable();
        seeds.dedup();
        let (out_offsets, out_index) = bucket(nodes, edges.iter().map(|e| e.src));
        let (in_offsets, in_index) = bucket(nodes, edges.iter().map(|e| e.dst));
        Ok(Self {
            nodes,
            edges,
            seeds,
            out_offsets,
            out_index,
            in_offsets,
            in_index,
        })
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn edges(&self) -> &[WeightedEdge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> &WeightedEdge {
        &self.edges[i]
    }

    pub fn seeds(&self) -> &[usize] {
        &self.seeds
    }

    /// Indices of the edges leaving `u`.
    pub fn out_edges(&self, u: usize) -> &[usize] {
        &self.out_index[self.out_offsets[u]..self.out_offsets[u + 1]]
    }

    /// Indices of the edges entering `v`.
    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_index[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn max_in_degree(&self) -> usize {
        (0..self.nodes)
            .map(|v| self.in_degree(v))
            .max()
            .unwrap_or(0)
    }
}

/// CSR layout: edge indices grouped by `key`, in edge order within a bucket.
fn bucket(nodes: usize, keys: impl Iterator<Item = usize> + Clone) -> (Vec<usize>, Vec<usize>) {
    let mut offsets = vec![0; nodes + 1];
    for k in keys.clone() {
        offsets[k + 1] += 1;
    }
    for v in 0..nodes {
        offsets[v + 1] += offsets[v];
    }
    let mut fill = offsets.clone();
    let mut index = vec![0; offsets[nodes]];
    for (i, k) in keys.enumerate() {
        index[fill[k]] = i;
        fill[k] += 1;
    }
    (offsets, index)
}

/// JSON instance: explicit weights, seeds and an optional partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceInstance {
    pub nodes: usize,
    pub edges: Vec<WeightedEdge>,
    pub seeds: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub groups: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budgets: Option<Vec<usize>>,
}

impl InfluenceInstance {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Parse(e.to_string()))?;
        fs::write(path, text)?;
        Ok(())
    }

    pub fn graph(&self) -> Result<BoostedGraph> {
        BoostedGraph::new(self.nodes, self.edges.clone(), self.seeds.clone())
    }

    /// The stored partition, if both groups and budgets are present.
    pub fn matroid(&self) -> Option<Result<PartitionMatroid>> {
        match (&self.groups, &self.budgets) {
            (Some(g), Some(b)) => Some(PartitionMatroid::new(g.clone(), b.clone())),
            _ => None,
        }
    }
}
