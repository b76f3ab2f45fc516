use crate::quantify::NonSubmodParams;

use super::graph::BoostedGraph;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Lemma3Options {
    /// Factor used for edges with `p0 = 0 < p1`, whose ratio `p1/p0` is
    /// unbounded. `None` leaves them out of the product and sets `α′ = 1`.
    pub zero_p0_cap: Option<f64>,
}

/// Parameter bounds for the boosted spread from per-edge probability ratios.
///
/// With `Δ` the largest in-degree and `L = min(bΔ, |E|)`, `γ′` is the product
/// of the `L` smallest factors `(1−p1)/(1−p0)` and `α′ = 1 − 1/Π` where `Π`
/// is the product of the `L` largest factors `p1/p0`. Edges with `p0 = p1`
/// contribute factor 1 to both.
pub fn lemma3_bounds(graph: &BoostedGraph, b: usize, options: Lemma3Options) -> NonSubmodParams {
    let edges = graph.edges();
    let take = b.saturating_mul(graph.max_in_degree()).min(edges.len());

    let mut down: Vec<f64> = edges
        .iter()
        .map(|e| {
            if e.p0 == e.p1 {
                1.0
            } else {
                (1.0 - e.p1) / (1.0 - e.p0)
            }
        })
        .collect();
    down.sort_by(f64::total_cmp);
    let gamma: f64 = down[..take].iter().product();

    let mut unbounded = false;
    let mut up: Vec<f64> = edges
        .iter()
        .filter_map(|e| {
            if e.p0 == e.p1 {
                Some(1.0)
            } else if e.p0 == 0.0 {
                match options.zero_p0_cap {
                    Some(cap) => Some(cap),
                    None => {
                        unbounded = true;
                        None
                    }
                }
            } else {
                Some(e.p1 / e.p0)
            }
        })
        .collect();
    up.sort_by(|a, b| b.total_cmp(a));
    let alpha = if unbounded {
        1.0
    } else {
        let product: f64 = up[..take.min(up.len())].iter().product();
        1.0 - 1.0 / product
    };
    NonSubmodParams::bound(gamma, alpha).with_degenerate(unbounded)
}
