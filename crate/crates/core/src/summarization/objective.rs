use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::matroid::{PartitionMatroid, Subset};
use crate::oracle::Objective;
use crate::quantify::NonSubmodParams;

use super::features::GramMatrix;
use super::linalg::{
    cholesky, extend_cholesky, symmetric_eigenvalues, SymMatrix, DEFAULT_JACOBI_TOL,
};

struct BaseFactor {
    elements: Vec<usize>,
    member: Vec<bool>,
    l: Vec<f64>,
    log_det: f64,
}

/// `f(S) = det(I + X_S)`, from a Cholesky factor accumulated in the log
/// domain. Overflow shows up as `+∞`.
///
/// In log mode the oracle returns `ln det(I + X_S)` instead, which is a
/// different set function with its own parameters.
pub struct DetObjective {
    a: SymMatrix,
    log_mode: bool,
    base: Mutex<Option<BaseFactor>>,
}

impl DetObjective {
    /// Fails if `I + X` is not numerically positive definite.
    pub fn new(gram: &GramMatrix) -> Result<Self> {
        let a = gram.a();
        let all: Vec<usize> = (0..a.n()).collect();
        cholesky(&a, &all)?;
        Ok(Self {
            a,
            log_mode: false,
            base: Mutex::new(None),
        })
    }

    /// Same matrix, separate incremental cache; for use on another thread.
    pub fn fork(&self) -> Self {
        Self {
            a: self.a.clone(),
            log_mode: self.log_mode,
            base: Mutex::new(None),
        }
    }

    pub fn log_mode(mut self, on: bool) -> Self {
        self.log_mode = on;
        self
    }

    pub fn is_log_mode(&self) -> bool {
        self.log_mode
    }

    /// `ln det(I + X_S)`; NaN if the factorization breaks down.
    pub fn log_det(&self, set: &Subset) -> f64 {
        let guard = self.base.lock().expect("factor cache poisoned");
        let covered = guard
            .as_ref()
            .filter(|base| base.elements.iter().all(|&e| set.contains(e)));
        if let Some(base) = covered {
            let fresh: Vec<usize> = set.iter().filter(|&e| !base.member[e]).collect();
            let k = base.elements.len();
            let size = k + fresh.len();
            let mut l = vec![0.0; size * size];
            for r in 0..k {
                l[r * size..r * size + r + 1].copy_from_slice(&base.l[r * k..r * k + r + 1]);
            }
            let mut order = base.elements.clone();
            let mut log_det = base.log_det;
            for e in fresh {
                match extend_cholesky(&self.a, &order, &mut l, size, e) {
                    Ok(pivot) => log_det += 2.0 * pivot.ln(),
                    Err(_) => return f64::NAN,
                }
                order.push(e);
            }
            return log_det;
        }
        drop(guard);
        match cholesky(&self.a, &set.sorted()) {
            Ok(l) => diagonal_log_det(&l, set.len()),
            Err(_) => f64::NAN,
        }
    }
}

fn diagonal_log_det(l: &[f64], k: usize) -> f64 {
    (0..k).map(|r| 2.0 * l[r * k + r].ln()).sum()
}

impl Objective for DetObjective {
    fn ground_size(&self) -> usize {
        self.a.n()
    }

    fn value(&self, set: &Subset) -> f64 {
        let log_det = self.log_det(set);
        if self.log_mode {
            log_det
        } else {
            log_det.exp()
        }
    }

    fn rebase(&self, base: &Subset) {
        let elements: Vec<usize> = base.iter().collect();
        let Ok(l) = cholesky(&self.a, &elements) else {
            *self.base.lock().expect("factor cache poisoned") = None;
            return;
        };
        let log_det = diagonal_log_det(&l, elements.len());
        *self.base.lock().expect("factor cache poisoned") = Some(BaseFactor {
            member: base.membership().to_vec(),
            elements,
            l,
            log_det,
        });
    }
}

/// Lower bound on the DR-ratio of `det(I + X_S)` from the spectrum of
/// `A = I + X`:
/// `γ′ = (λ_n − 1)/(λ_1 − 1) · ∏_{i=1..min(b,n)} 1/λ_i`, `α = 0`.
///
/// When `λ_1 ≤ 1 + 1e-12` the ratio is 0/0; the objective is then
/// `1` on every set and `γ′ = 1` is returned, flagged as degenerate.
pub fn lemma4_gamma_bound(gram: &GramMatrix, b: usize) -> Result<NonSubmodParams> {
    let lambda = symmetric_eigenvalues(&gram.a(), DEFAULT_JACOBI_TOL)?;
    Ok(lemma4_from_spectrum(&lambda, b))
}

/// [`lemma4_gamma_bound`] from the descending eigenvalues of `A`.
pub fn lemma4_from_spectrum(lambda: &[f64], b: usize) -> NonSubmodParams {
    let (Some(&top), Some(&bottom)) = (lambda.first(), lambda.last()) else {
        return NonSubmodParams::bound(1.0, 0.0).with_degenerate(true);
    };
    if top <= 1.0 + 1e-12 {
        return NonSubmodParams::bound(1.0, 0.0).with_degenerate(true);
    }
    let spread = (bottom - 1.0).max(0.0) / (top - 1.0);
    let product: f64 = lambda.iter().take(b).map(|l| 1.0 / l).product();
    NonSubmodParams::bound(spread * product, 0.0)
}

/// `k` contiguous segments of `0..n`, sizes differing by at most one with
/// the longer segments first, each with budget `per_segment_budget`.
pub fn segment_partition(
    n: usize,
    k: usize,
    per_segment_budget: usize,
) -> Result<PartitionMatroid> {
    if k == 0 || k > n {
        return Err(Error::TooManySegments { n, k });
    }
    if per_segment_budget > n / k {
        return Err(Error::BudgetExceedsSegment {
            budget: per_segment_budget,
            segment: n / k,
        });
    }
    let mut groups = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = n / k + usize::from(i < n % k);
        groups.push((start..start + size).collect());
        start += size;
    }
    PartitionMatroid::new(groups, vec![per_segment_budget; k])
}
