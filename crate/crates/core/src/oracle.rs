//! Black-box objectives, query counting and normalization.
//!
//! Every algorithm in this crate talks to `f` only through [`Objective::value`].
//! One call is one query. Callers cache `f(S_t)`, so a marginal gain costs a
//! single query.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matroid::{ElementId, Subset};

/// A monotone set function over the ground set `0..ground_size()`.
pub trait Objective: Send + Sync {
    fn ground_size(&self) -> usize;

    fn value(&self, set: &Subset) -> f64;

    /// Hint that upcoming queries will be supersets of `base`. Not a query;
    /// oracles with incremental evaluation may precompute state here.
    fn rebase(&self, _base: &Subset) {}
}

impl<T: Objective + ?Sized> Objective for &T {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &Subset) -> f64 {
        (**self).value(set)
    }
    fn rebase(&self, base: &Subset) {
        (**self).rebase(base)
    }
}

impl<T: Objective + ?Sized> Objective for Box<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &Subset) -> f64 {
        (**self).value(set)
    }
    fn rebase(&self, base: &Subset) {
        (**self).rebase(base)
    }
}

impl<T: Objective + ?Sized> Objective for Arc<T> {
    fn ground_size(&self) -> usize {
        (**self).ground_size()
    }
    fn value(&self, set: &Subset) -> f64 {
        (**self).value(set)
    }
    fn rebase(&self, base: &Subset) {
        (**self).rebase(base)
    }
}

/// Counts `value()` calls on the wrapped oracle.
#[derive(Debug)]
pub struct CountingOracle<O> {
    inner: O,
    count: AtomicU64,
}

impl<O: Objective> CountingOracle<O> {
    pub fn new(inner: O) -> Self {
        Self {
            inner,
            count: AtomicU64::new(0),
        }
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.count.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }

    pub fn into_inner(self) -> O {
        self.inner
    }
}

impl<O: Objective> Objective for CountingOracle<O> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn value(&self, set: &Subset) -> f64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.value(set)
    }

    fn rebase(&self, base: &Subset) {
        self.inner.rebase(base)
    }
}

/// `f(S) - f(∅)`, with `f(∅)` evaluated once at construction.
#[derive(Debug)]
pub struct Normalized<O> {
    inner: O,
    offset: f64,
}

impl<O: Objective> Normalized<O> {
    pub fn new(inner: O) -> Self {
        let offset = inner.value(&Subset::empty(inner.ground_size()));
        Self { inner, offset }
    }

    /// The subtracted `f(∅)`.
    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Objective> Objective for Normalized<O> {
    fn ground_size(&self) -> usize {
        self.inner.ground_size()
    }

    fn value(&self, set: &Subset) -> f64 {
        self.inner.value(set) - self.offset
    }

    fn rebase(&self, base: &Subset) {
        self.inner.rebase(base)
    }
}

pub fn normalize<O: Objective>(oracle: O) -> Normalized<O> {
    Normalized::new(oracle)
}

/// `Δ_e f(S) = f(S ∪ {e}) - f(S)` given the cached `f(S)`. Costs one query.
pub fn marginal_gain<O: Objective + ?Sized>(
    oracle: &O,
    e: ElementId,
    set: &Subset,
    cached_value: f64,
) -> Result<f64> {
    if set.contains(e) {
        return Err(Error::ElementAlreadyInSet(e));
    }
    let extended = set.with(e)?;
    Ok(oracle.value(&extended) - cached_value)
}

/// `f(S) = Σ_{e∈S} w_e`.
#[derive(Debug, Clone)]
pub struct Modular {
    weights: Vec<f64>,
}

impl Modular {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((element, &weight)) = weights.iter().enumerate().find(|(_, w)| !(**w >= 0.0)) {
            return Err(Error::NegativeWeight { element, weight });
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Objective for Modular {
    fn ground_size(&self) -> usize {
        self.weights.len()
    }

    fn value(&self, set: &Subset) -> f64 {
        // ascending id order so equal sets always round identically
        set.membership()
            .iter()
            .zip(&self.weights)
            .filter(|(&present, _)| present)
            .map(|(_, w)| w)
            .sum()
    }
}

pub fn make_modular(weights: Vec<f64>) -> Result<Modular> {
    Modular::new(weights)
}

/// `f(S) = |∪_{e∈S} cover(e)|`.
#[derive(Debug, Clone)]
pub struct Coverage {
    covers: Vec<Vec<usize>>,
    universe: usize,
}

impl Coverage {
    pub fn new(covers: Vec<Vec<usize>>) -> Self {
        let universe = covers.iter().flatten().copied().max().map_or(0, |m| m + 1);
        Self { covers, universe }
    }

    pub fn covers(&self) -> &[Vec<usize>] {
        &self.covers
    }
}

impl Objective for Coverage {
    fn ground_size(&self) -> usize {
        self.covers.len()
    }

    fn value(&self, set: &Subset) -> f64 {
        let mut seen = vec![false; self.universe];
        let mut covered = 0usize;
        for e in set.iter() {
            for &item in &self.covers[e] {
                if !seen[item] {
                    seen[item] = true;
                    covered += 1;
                }
            }
        }
        covered as f64
    }
}

pub fn make_coverage(covers: Vec<Vec<usize>>) -> Coverage {
    Coverage::new(covers)
}

/// `f(S) = |S|²`, monotone and supermodular.
#[derive(Debug, Clone, Copy)]
pub struct CardinalitySquared {
    n: usize,
}

impl CardinalitySquared {
    pub fn new(n: usize) -> Self {
        Self { n }
    }
}

impl Objective for CardinalitySquared {
    fn ground_size(&self) -> usize {
        self.n
    }

    fn value(&self, set: &Subset) -> f64 {
        let s = set.len() as f64;
        s * s
    }
}

pub fn make_cardinality_squared(n: usize) -> CardinalitySquared {
    CardinalitySquared::new(n)
}
