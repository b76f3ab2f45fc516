use rand::Rng;

use crate::matroid::{ElementId, PartitionMatroid};
use crate::oracle::{CountingOracle, Objective};

use super::{finish, RunResult, TraceStep};

/// Residual random greedy baseline.
///
/// Each step scores every addable element, builds the max-weight residual
/// base (the `b_i − |S_t ∩ V_i|` best elements of every open group, ties to
/// the lowest id) and adds one base element chosen uniformly at random.
pub fn residual_greedy<O: Objective + ?Sized, R: Rng + ?Sized>(
    m: &PartitionMatroid,
    oracle: &O,
    rng: &mut R,
) -> RunResult {
    let counter = CountingOracle::new(oracle);
    let mut s = m.empty_set();
    let mut current = 0.0;
    let mut trace = Vec::with_capacity(m.total_budget());

    loop {
        let open: Vec<usize> = (0..m.k()).filter(|&i| m.residual(&s, i) > 0).collect();
        if open.is_empty() {
            break;
        }
        counter.rebase(&s);
        let mut probe = s.clone();
        let mut base: Vec<(ElementId, f64, f64)> = Vec::new();
        let mut candidates = 0;
        for &i in &open {
            let mut scored: Vec<(ElementId, f64, f64)> = m
                .group(i)
                .iter()
                .copied()
                .filter(|&e| !s.contains(e))
                .map(|e| {
                    probe.insert(e).expect("candidate not in set");
                    let v = counter.value(&probe);
                    probe.pop();
                    (e, v - current, v)
                })
                .collect();
            candidates += scored.len();
            scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
            scored.truncate(m.residual(&s, i));
            base.extend(scored);
        }
        base.sort_by_key(|&(e, _, _)| e);
        let (e, gain, value) = base[rng.gen_range(0..base.len())];
        s.insert(e).expect("candidate not in set");
        current = value;
        trace.push(TraceStep {
            step: trace.len(),
            element: e,
            group: m.group_of(e),
            gain,
            candidates,
        });
    }
    let queries = counter.count();
    finish(oracle, s, queries, trace, None)
}
