//! Randomized power-law selection: `prob` and its pool-sampling variant `fast_prob`.
//!
//! Both visit the unfilled groups round-robin in ascending index order. At
//! each step one element of the current group is drawn with probability
//! proportional to `Δ_e f(S_t)^a`, where the exponent `a` grows with the
//! candidate count and with how close `f` is to submodular.

use rand::distributions::Open01;
use rand::seq::index;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matroid::{ElementId, PartitionMatroid, Subset};
use crate::oracle::{CountingOracle, Objective};

use super::{finish, RunResult, TraceStep};

/// Below this value of `1 − γ′(1−α′)` the exponent is treated as infinite.
pub const DEGENERATE_EXPONENT_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerExponent {
    Finite(u64),
    /// The `a → ∞` limit: deterministic argmax.
    Argmax,
}

/// `a = ⌈(m+1) / (1 − γ′(1−α′))⌉ − 1` for a pool of `m` candidates.
pub fn power_exponent(pool: usize, gamma: f64, alpha: f64) -> PowerExponent {
    let denom = 1.0 - gamma * (1.0 - alpha);
    if denom < DEGENERATE_EXPONENT_THRESHOLD {
        return PowerExponent::Argmax;
    }
    let x = (pool as f64 + 1.0) / denom;
    // shave rounding noise so exact integers do not ceil upward
    let a = (x * (1.0 - 1e-12)).ceil() - 1.0;
    if a >= u64::MAX as f64 {
        PowerExponent::Argmax
    } else {
        PowerExponent::Finite(a.max(0.0) as u64)
    }
}

/// Draws index `j` with probability `gains[j]^a / Σ_u gains[u]^a`.
///
/// Negative gains are clamped to zero. If every gain is zero the draw is
/// uniform; `0⁰` is taken as 1. Finite exponents use the Gumbel-max trick on
/// `a·ln(gain)` so large `a` cannot overflow.
pub fn sample_power_index<R: Rng + ?Sized>(
    gains: &[f64],
    exponent: PowerExponent,
    rng: &mut R,
) -> Result<usize> {
    if gains.is_empty() {
        return Err(Error::EmptyCandidatePool);
    }
    let clamped = |g: f64| if g > 0.0 { g } else { 0.0 };
    if gains.iter().all(|&g| clamped(g) == 0.0) {
        return Ok(rng.gen_range(0..gains.len()));
    }
    match exponent {
        PowerExponent::Argmax => {
            let mut best = 0;
            for (j, &g) in gains.iter().enumerate() {
                if clamped(g) > clamped(gains[best]) {
                    best = j;
                }
            }
            Ok(best)
        }
        PowerExponent::Finite(0) => Ok(rng.gen_range(0..gains.len())),
        PowerExponent::Finite(a) => {
            let a = a as f64;
            let mut best: Option<(f64, usize)> = None;
            for (j, &g) in gains.iter().enumerate() {
                let g = clamped(g);
                if g == 0.0 {
                    continue;
                }
                let u: f64 = rng.sample(Open01);
                let key = a * g.ln() - (-u.ln()).ln();
                if best.is_none_or(|(k, _)| key > k) {
                    best = Some((key, j));
                }
            }
            Ok(best.map(|(_, j)| j).expect("at least one positive gain"))
        }
    }
}

fn validate_params(gamma: f64, alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::ParameterOutOfRange {
            name: "gamma'",
            value: gamma,
        });
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::ParameterOutOfRange {
            name: "alpha'",
            value: alpha,
        });
    }
    Ok(())
}

/// `m_t = min(⌈((n_i−s)/(b_i−s))·ln(b/δ)⌉, n_i−s)` with `s = |S_t ∩ V_i|`.
pub fn fast_prob_pool_size(
    group_size: usize,
    occupied: usize,
    group_budget: usize,
    total_budget: usize,
    delta: f64,
) -> usize {
    let remaining = group_size - occupied;
    let open = group_budget.saturating_sub(occupied).max(1);
    let raw = (remaining as f64 / open as f64) * (total_budget as f64 / delta).ln();
    let m = raw.ceil();
    if !(m < remaining as f64) {
        remaining
    } else {
        (m.max(1.0)) as usize
    }
}

/// Uniform sample of `m` candidates without replacement, returned in
/// ascending id order. Taking the whole pool consumes no randomness.
pub fn sample_pool<R: Rng + ?Sized>(
    rng: &mut R,
    candidates: &[ElementId],
    m: usize,
) -> Vec<ElementId> {
    if m >= candidates.len() {
        return candidates.to_vec();
    }
    let mut pool: Vec<ElementId> = index::sample(rng, candidates.len(), m)
        .into_iter()
        .map(|j| candidates[j])
        .collect();
    pool.sort_unstable();
    pool
}

enum PoolRule {
    Full,
    Sampled { delta: f64 },
}

fn run_power_selection<O: Objective + ?Sized, R: Rng + ?Sized>(
    m: &PartitionMatroid,
    oracle: &O,
    gamma: f64,
    alpha: f64,
    pool_rule: PoolRule,
    rng: &mut R,
) -> Result<RunResult> {
    validate_params(gamma, alpha)?;
    let counter = CountingOracle::new(oracle);
    let b = m.total_budget();
    let mut s = m.empty_set();
    let mut current = 0.0;
    let mut active: Vec<usize> = (0..m.k()).collect();
    let mut trace = Vec::with_capacity(b);

    while !active.is_empty() {
        for &i in &active {
            let remaining: Vec<ElementId> = m
                .group(i)
                .iter()
                .copied()
                .filter(|&e| !s.contains(e))
                .collect();
            let pool = match pool_rule {
                PoolRule::Full => remaining,
                PoolRule::Sampled { delta } => {
                    let size =
                        fast_prob_pool_size(m.group_size(i), s.occupancy(i), m.budget(i), b, delta);
                    sample_pool(rng, &remaining, size)
                }
            };
            counter.rebase(&s);
            let values = evaluate_pool(&counter, &s, &pool);
            let gains: Vec<f64> = values.iter().map(|v| v - current).collect();
            let exponent = power_exponent(pool.len(), gamma, alpha);
            let pick = sample_power_index(&gains, exponent, rng)?;
            let e = pool[pick];
            s.insert(e)?;
            current = values[pick];
            trace.push(TraceStep {
                step: trace.len(),
                element: e,
                group: i,
                gain: gains[pick],
                candidates: pool.len(),
            });
        }
        active.retain(|&i| s.occupancy(i) < m.budget(i));
    }
    let queries = counter.count();
    Ok(finish(oracle, s, queries, trace, None))
}

fn evaluate_pool<O: Objective + ?Sized>(oracle: &O, s: &Subset, pool: &[ElementId]) -> Vec<f64> {
    let mut probe = s.clone();
    pool.iter()
        .map(|&e| {
            probe.insert(e).expect("candidate not in set");
            let v = oracle.value(&probe);
            probe.pop();
            v
        })
        .collect()
}

/// Power-law selection over the whole remaining group at each step.
pub fn prob<O: Objective + ?Sized, R: Rng + ?Sized>(
    m: &PartitionMatroid,
    oracle: &O,
    gamma: f64,
    alpha: f64,
    rng: &mut R,
) -> Result<RunResult> {
    run_power_selection(m, oracle, gamma, alpha, PoolRule::Full, rng)
}

/// Power-law selection over a uniformly sampled pool of size
/// [`fast_prob_pool_size`]. The query tally equals `Σ_t |R_t|`.
pub fn fast_prob<O: Objective + ?Sized, R: Rng + ?Sized>(
    m: &PartitionMatroid,
    oracle: &O,
    gamma: f64,
    alpha: f64,
    delta: f64,
    rng: &mut R,
) -> Result<RunResult> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidDelta(delta));
    }
    run_power_selection(m, oracle, gamma, alpha, PoolRule::Sampled { delta }, rng)
}
