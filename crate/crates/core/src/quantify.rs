//! How far an objective is from submodular, and what that costs.
//!
//! The partition-matroid DR-ratio `γ` is the largest value in `[0,1]` with
//! `Δ_e f(T) ≤ Δ_e f(S)/γ`, and the curvature `α` the smallest value in
//! `[0,1]` with `Δ_e f(T) ≥ (1−α) Δ_e f(S)`, both over every `S ⊆ T` whose
//! difference fits inside the group budgets and every `e ∉ T`.
//! [`exact_gamma_alpha`] enumerates those triples; the ratio functions turn
//! `(γ, α)` into approximation guarantees.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matroid::{PartitionMatroid, Subset};
use crate::oracle::Objective;

pub const DEFAULT_TRIPLE_CAP: u128 = 1_000_000;

/// Below this curvature the `r₂` terms use their `α → 0` limit.
const ALPHA_LIMIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ExactEnumeration,
    Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonSubmodParams {
    pub gamma: f64,
    pub alpha: f64,
    pub provenance: Provenance,
    /// Set when a bound fell back to a default because its formula degenerated.
    pub degenerate: bool,
}

impl NonSubmodParams {
    pub fn exact(gamma: f64, alpha: f64) -> Self {
        Self {
            gamma: clamp_unit(gamma),
            alpha: clamp_unit(alpha),
            provenance: Provenance::ExactEnumeration,
            degenerate: false,
        }
    }

    /// A lower bound on `γ` and an upper bound on `α`, clamped into `[0,1]`.
    pub fn bound(gamma: f64, alpha: f64) -> Self {
        Self {
            gamma: clamp_unit(gamma),
            alpha: clamp_unit(alpha),
            provenance: Provenance::Bound,
            degenerate: false,
        }
    }

    pub fn with_degenerate(mut self, degenerate: bool) -> Self {
        self.degenerate = degenerate;
        self
    }
}

pub fn clamp_unit(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

/// `f` on every subset of `0..n`, indexed by bitmask.
pub fn subset_values<O: Objective + ?Sized>(oracle: &O, n: usize) -> Vec<f64> {
    let mut values = Vec::with_capacity(1 << n);
    for mask in 0u64..1 << n {
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let s = Subset::from_elements(n, &members).expect("dense ids");
        values.push(oracle.value(&s));
    }
    values
}

pub fn exact_gamma_alpha<O: Objective + ?Sized>(
    m: &PartitionMatroid,
    oracle: &O,
) -> Result<NonSubmodParams> {
    exact_gamma_alpha_with_cap(m, oracle, DEFAULT_TRIPLE_CAP)
}

/// Exact `(γ, α)` by enumerating every qualifying `(S, T, e)`.
///
/// Gains within `1e-12·max(1, max|f|)` of zero count as zero. A triple with
/// `Δ_e f(T) = 0` does not constrain `γ`; one with `Δ_e f(S) = 0` does not
/// constrain `α`; `Δ_e f(S) > 0 = Δ_e f(T)` forces `α = 1`.
pub fn exact_gamma_alpha_with_cap<O: Objective + ?Sized>(
    m: &PartitionMatroid,
    oracle: &O,
    cap: u128,
) -> Result<NonSubmodParams> {
    let n = m.n();
    let work = 3u128.saturating_pow(n as u32).saturating_mul(n as u128);
    if n > 24 || work > cap {
        return Err(Error::InstanceTooLarge {
            what: "3^n·n triples",
            size: work,
            cap,
        });
    }
    let f = subset_values(oracle, n);
    let scale = f.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let tol = 1e-12 * scale;

    let group_masks: Vec<u64> = (0..m.k())
        .map(|i| m.group(i).iter().fold(0u64, |acc, &e| acc | 1 << e))
        .collect();
    let fits = |diff: u64| {
        group_masks
            .iter()
            .zip(m.budgets())
            .all(|(g, &b)| (diff & g).count_ones() as usize <= b)
    };

    let full = (1u64 << n) - 1;
    let mut gamma = 1.0f64;
    let mut alpha = 0.0f64;
    for t in 0..=full {
        let outside = full & !t;
        if outside == 0 {
            continue;
        }
        // walk the submasks S of T
        let mut s = t;
        loop {
            if fits(t & !s) {
                let mut rest = outside;
                while rest != 0 {
                    let e = rest & rest.wrapping_neg();
                    rest &= rest - 1;
                    let gs = f[(s | e) as usize] - f[s as usize];
                    let gt = f[(t | e) as usize] - f[t as usize];
                    let gs_pos = gs > tol;
                    let gt_pos = gt > tol;
                    if gt_pos {
                        gamma = gamma.min(if gs_pos { gs / gt } else { 0.0 });
                    }
                    if gs_pos {
                        alpha = alpha.max(if gt_pos { 1.0 - gt / gs } else { 1.0 });
                    }
                }
            }
            if s == 0 {
                break;
            }
            s = (s - 1) & t;
        }
    }
    Ok(NonSubmodParams::exact(gamma, alpha))
}

/// `β + 1` with `β = (1/γ′ + α′ − 1)(1 − 1/(n̄+2))`; `+∞` when `γ′ = 0`.
pub fn prob_ratio(gamma: f64, alpha: f64, max_group_size: usize) -> f64 {
    prob_beta(gamma, alpha, max_group_size) + 1.0
}

pub fn prob_beta(gamma: f64, alpha: f64, max_group_size: usize) -> f64 {
    if gamma <= 0.0 {
        return f64::INFINITY;
    }
    (1.0 / gamma + alpha - 1.0) * (1.0 - 1.0 / (max_group_size as f64 + 2.0))
}

/// `(γ/(1+γα), (1/α)[1 − (1 − αγ/b)^b̂])`.
pub fn greedy_ratios(gamma: f64, alpha: f64, b: usize, b_hat: usize) -> Result<(f64, f64)> {
    thresholded_ratios(gamma, alpha, 1.0, b, b_hat)
}

/// `(γ(1−ε)²/(1+γα(1−ε)), (1/α)[1 − (1 − αγ(1−ε)/b)^b̂])`.
pub fn thrgreedy_ratios(
    gamma: f64,
    alpha: f64,
    epsilon: f64,
    b: usize,
    b_hat: usize,
) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    thresholded_ratios(gamma, alpha, 1.0 - epsilon, b, b_hat)
}

/// Shared form with `σ = 1` for greedy and `σ = 1−ε` for the threshold variant.
fn thresholded_ratios(
    gamma: f64,
    alpha: f64,
    sigma: f64,
    b: usize,
    b_hat: usize,
) -> Result<(f64, f64)> {
    if gamma <= 0.0 {
        return Err(Error::GammaZero);
    }
    let b = b.max(1) as f64;
    let b_hat = b_hat as f64;
    let r1 = gamma * sigma * sigma / (1.0 + gamma * alpha * sigma);
    let r2 = if alpha.abs() < ALPHA_LIMIT {
        gamma * sigma * b_hat / b
    } else {
        (1.0 - (1.0 - alpha * gamma * sigma / b).powf(b_hat)) / alpha
    };
    Ok((r1, r2))
}

/// Approximation factors (`≥ 1`) and the terms they come from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioReport {
    pub beta: f64,
    pub prob_ratio: f64,
    pub greedy_r1: f64,
    pub greedy_r2: f64,
    pub greedy_ratio: f64,
    pub thr_r1: f64,
    pub thr_r2: f64,
    pub thrgreedy_ratio: f64,
}

impl RatioReport {
    /// `gamma == 0` yields infinite ratios and zero `r` terms.
    pub fn new(params: &NonSubmodParams, m: &PartitionMatroid, epsilon: f64) -> Result<Self> {
        let (b, b_hat, n_bar) = (m.total_budget(), m.min_budget(), m.max_group_size());
        let beta = prob_beta(params.gamma, params.alpha, n_bar);
        let (g1, g2) = match greedy_ratios(params.gamma, params.alpha, b, b_hat) {
            Ok(r) => r,
            Err(Error::GammaZero) => (0.0, 0.0),
            Err(e) => return Err(e),
        };
        let (t1, t2) = match thrgreedy_ratios(params.gamma, params.alpha, epsilon, b, b_hat) {
            Ok(r) => r,
            Err(Error::GammaZero) => (0.0, 0.0),
            Err(e) => return Err(e),
        };
        Ok(Self {
            beta,
            prob_ratio: beta + 1.0,
            greedy_r1: g1,
            greedy_r2: g2,
            greedy_ratio: 1.0 / g1.max(g2),
            thr_r1: t1,
            thr_r2: t2,
            thrgreedy_ratio: 1.0 / t1.max(t2),
        })
    }
}
