use crate::error::{Error, Result};
use crate::matroid::{ElementId, PartitionMatroid};
use crate::oracle::{CountingOracle, Objective};

use super::{finish, RunResult, TraceStep};

/// Adds the globally best addable element until every group is full.
///
/// Ties go to the lowest element id. Each step queries every addable element
/// once, so the tally is at most `n·b`.
pub fn greedy<O: Objective + ?Sized>(m: &PartitionMatroid, oracle: &O) -> RunResult {
    let counter = CountingOracle::new(oracle);
    let mut s = m.empty_set();
    let mut current = 0.0;
    let mut active = vec![true; m.k()];
    let mut trace = Vec::with_capacity(m.total_budget());

    while active.iter().any(|&a| a) {
        counter.rebase(&s);
        let mut probe = s.clone();
        let mut best: Option<(f64, ElementId, f64)> = None;
        let mut candidates = 0;
        for e in 0..m.n() {
            if s.contains(e) || !active[m.group_of(e)] {
                continue;
            }
            probe.insert(e).expect("candidate not in set");
            let value = counter.value(&probe);
            probe.pop();
            candidates += 1;
            let gain = value - current;
            if best.is_none_or(|(g, _, _)| gain > g) {
                best = Some((gain, e, value));
            }
        }
        let Some((gain, e, value)) = best else { break };
        let group = m.group_of(e);
        s.insert(e).expect("candidate not in set");
        current = value;
        trace.push(TraceStep {
            step: trace.len(),
            element: e,
            group,
            gain,
            candidates,
        });
        if s.occupancy(group) >= m.budget(group) {
            active[group] = false;
        }
    }
    let queries = counter.count();
    finish(oracle, s, queries, trace, None)
}

/// Upper bound on threshold rounds: `⌈ln(b/(ε(1−ε))) / −ln(1−ε)⌉ + 1`.
pub fn threshold_round_bound(b: usize, epsilon: f64) -> usize {
    let b = b.max(1) as f64;
    let rounds = ((b / (epsilon * (1.0 - epsilon))).ln() / -(1.0 - epsilon).ln()).ceil();
    rounds.max(0.0) as usize + 1
}

/// Decreasing-threshold greedy.
///
/// `τ` starts at the best singleton gain and decays by `1−ε` per round until
/// it drops below `ε(1−ε)τ₀/b` or the set is maximal. Within a round,
/// candidates are scanned once in ascending (group, element) order against
/// the live set. A gain computed against the current set is reused until the
/// set changes.
pub fn threshold_greedy<O: Objective + ?Sized>(
    m: &PartitionMatroid,
    oracle: &O,
    epsilon: f64,
) -> Result<RunResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let counter = CountingOracle::new(oracle);
    let n = m.n();
    let b = m.total_budget();
    let mut s = m.empty_set();
    let mut current = 0.0;
    // (|S| when computed, gain); S only grows, so its size names its state
    let mut cached: Vec<Option<(usize, f64)>> = vec![None; n];

    let mut gain_of = |e: ElementId, s: &crate::matroid::Subset, current: f64| -> f64 {
        if let Some((version, g)) = cached[e] {
            if version == s.len() {
                return g;
            }
        }
        let mut probe = s.clone();
        probe.insert(e).expect("candidate not in set");
        let g = counter.value(&probe) - current;
        cached[e] = Some((s.len(), g));
        g
    };

    counter.rebase(&s);
    let tau0 = (0..n)
        .map(|e| gain_of(e, &s, current))
        .fold(0.0f64, f64::max);
    let floor = epsilon * (1.0 - epsilon) * tau0 / b.max(1) as f64;
    let mut tau = tau0;
    let mut active = vec![true; m.k()];
    let mut trace = Vec::new();
    let mut rounds = 0;

    while active.iter().any(|&a| a) && tau >= floor {
        rounds += 1;
        for i in 0..m.k() {
            for &e in m.group(i) {
                if !active[i] {
                    break;
                }
                if s.contains(e) {
                    continue;
                }
                let gain = gain_of(e, &s, current);
                if gain >= tau {
                    s.insert(e).expect("candidate not in set");
                    current += gain;
                    counter.rebase(&s);
                    trace.push(TraceStep {
                        step: trace.len(),
                        element: e,
                        group: i,
                        gain,
                        candidates: 0,
                    });
                    if s.occupancy(i) >= m.budget(i) {
                        active[i] = false;
                    }
                }
            }
        }
        tau *= 1.0 - epsilon;
    }
    let queries = counter.count();
    Ok(finish(oracle, s, queries, trace, Some(rounds)))
}
