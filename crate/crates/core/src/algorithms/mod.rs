//! Maximization algorithms under a partition matroid.
//!
//! All algorithms expect a normalized oracle (`f(∅) = 0`); wrap raw
//! objectives with [`crate::oracle::normalize`]. Each run counts its own
//! queries; the final `objective` is evaluated once more on the uncounted
//! oracle and is not part of the tally.

mod exhaustive;
mod greedy;
mod probabilistic;
mod residual;

pub use exhaustive::{brute_force, brute_force_with_cap, DEFAULT_ENUMERATION_CAP};
pub use greedy::{greedy, threshold_greedy, threshold_round_bound};
pub use probabilistic::{
    fast_prob, fast_prob_pool_size, power_exponent, prob, sample_pool, sample_power_index,
    PowerExponent, DEGENERATE_EXPONENT_THRESHOLD,
};
pub use residual::residual_greedy;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::matroid::{ElementId, Subset};
use crate::oracle::Objective;

/// One accepted element.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceStep {
    pub step: usize,
    pub element: ElementId,
    pub group: usize,
    /// `Δ_e f(S_t)` at acceptance time.
    pub gain: f64,
    /// Candidates whose gains were looked at for this step (`|R_t|` for fast_prob).
    pub candidates: usize,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub solution: Subset,
    pub objective: f64,
    pub queries: u64,
    pub trace: Vec<TraceStep>,
    /// Threshold rounds executed (threshold greedy only).
    pub rounds: Option<usize>,
}

fn finish<O: Objective + ?Sized>(
    oracle: &O,
    solution: Subset,
    queries: u64,
    trace: Vec<TraceStep>,
    rounds: Option<usize>,
) -> RunResult {
    let objective = oracle.value(&solution);
    RunResult {
        solution,
        objective,
        queries,
        trace,
        rounds,
    }
}

/// The algorithms selectable from configuration and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Thr,
    Prob,
    FastProb,
    ResGreedy,
    Brute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Greedy,
        Algorithm::Thr,
        Algorithm::Prob,
        Algorithm::FastProb,
        Algorithm::ResGreedy,
        Algorithm::Brute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Thr => "thr",
            Algorithm::Prob => "prob",
            Algorithm::FastProb => "fastprob",
            Algorithm::ResGreedy => "resgreedy",
            Algorithm::Brute => "brute",
        }
    }

    pub fn is_randomized(self) -> bool {
        matches!(
            self,
            Algorithm::Prob | Algorithm::FastProb | Algorithm::ResGreedy
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .iter()
            .copied()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}
