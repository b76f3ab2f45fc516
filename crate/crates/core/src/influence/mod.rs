//! Boosted influence spread.
//!
//! Each edge `(u, v)` activates with probability `p0`, or `p1 ≥ p0` when `v`
//! is boosted. The objective of a boost set `S` is the expected number of
//! nodes reachable from the seed set `I`, estimated over pre-sampled live-edge
//! realizations or computed exactly on small graphs.

mod bounds;
mod graph;
mod spread;

pub use bounds::{lemma3_bounds, Lemma3Options};
pub use graph::{
    assign_degree_weights, load_snap_edgelist, parse_snap_edgelist, random_graph, BoostedGraph,
    DirectedGraph, InfluenceInstance, WeightedEdge,
};
pub use spread::{EdgeState, ExactOracle, MonteCarloOracle, RealizationSet, MAX_EXACT_EDGES};
