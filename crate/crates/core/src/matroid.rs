//! Partition matroid constraints and the subsets they govern.
//!
//! The ground set is always the dense range `0..n`. A [`PartitionMatroid`]
//! splits it into disjoint groups `V_1, ..., V_k` with per-group budgets
//! `b_1, ..., b_k`; a set is feasible when it takes at most `b_i` elements
//! from each group and maximal when it takes exactly `b_i`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

/// Dense element index in `[0, n)`.
pub type ElementId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionMatroid {
    groups: Vec<Vec<ElementId>>,
    budgets: Vec<usize>,
    group_of: Arc<[usize]>,
}

impl PartitionMatroid {
    /// Validates the groups and budgets. Each group is stored sorted by id.
    pub fn new(groups: Vec<Vec<ElementId>>, budgets: Vec<usize>) -> Result<Self> {
        if groups.len() != budgets.len() {
            return Err(Error::BudgetCountMismatch {
                groups: groups.len(),
                budgets: budgets.len(),
            });
        }
        if groups.is_empty() {
            return Err(Error::EmptyGroup(0));
        }
        let span = groups.iter().flatten().copied().max().map_or(0, |m| m + 1);
        let mut group_of = vec![usize::MAX; span];
        let mut groups = groups;
        for (i, group) in groups.iter_mut().enumerate() {
            if group.is_empty() {
                return Err(Error::EmptyGroup(i));
            }
            group.sort_unstable();
            for &e in group.iter() {
                if group_of[e] != usize::MAX {
                    return Err(Error::OverlappingGroups(e));
                }
                group_of[e] = i;
            }
        }
        if let Some(missing) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::SparseElementIds(missing));
        }
        for (i, (group, &budget)) in groups.iter().zip(&budgets).enumerate() {
            if budget < 1 || budget > group.len() {
                return Err(Error::BudgetOutOfRange {
                    group: i,
                    budget,
                    size: group.len(),
                });
            }
        }
        Ok(Self {
            groups,
            budgets,
            group_of: group_of.into(),
        })
    }

    /// Assigns each element of `0..n` to the group named by `assignment[e]`.
    pub fn from_assignment(assignment: &[usize], budgets: Vec<usize>) -> Result<Self> {
        let mut groups = vec![Vec::new(); budgets.len()];
        for (e, &g) in assignment.iter().enumerate() {
            if g >= groups.len() {
                return Err(Error::BudgetCountMismatch {
                    groups: g + 1,
                    budgets: budgets.len(),
                });
            }
            groups[g].push(e);
        }
        Self::new(groups, budgets)
    }

    /// A single group holding every element (the cardinality constraint).
    pub fn uniform(n: usize, budget: usize) -> Result<Self> {
        Self::new(vec![(0..n).collect()], vec![budget])
    }

    pub fn n(&self) -> usize {
        self.group_of.len()
    }

    pub fn k(&self) -> usize {
        self.groups.len()
    }

    pub fn groups(&self) -> &[Vec<ElementId>] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> &[ElementId] {
        &self.groups[i]
    }

    pub fn budgets(&self) -> &[usize] {
        &self.budgets
    }

    pub fn budget(&self, i: usize) -> usize {
        self.budgets[i]
    }

    pub fn group_size(&self, i: usize) -> usize {
        self.groups[i].len()
    }

    pub fn group_of(&self, e: ElementId) -> usize {
        self.group_of[e]
    }

    /// `b`, the sum of all budgets (the size of every maximal set).
    pub fn total_budget(&self) -> usize {
        self.budgets.iter().sum()
    }

    /// `b̂`, the smallest budget.
    pub fn min_budget(&self) -> usize {
        self.budgets.iter().copied().min().unwrap_or(0)
    }

    /// `n̄`, the largest group size.
    pub fn max_group_size(&self) -> usize {
        self.groups.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn empty_set(&self) -> Subset {
        Subset {
            present: vec![false; self.n()],
            order: Vec::new(),
            counts: vec![0; self.k()],
            group_of: Arc::clone(&self.group_of),
        }
    }

    /// Builds a subset bound to this matroid's groups. Feasibility is not checked.
    pub fn subset(&self, elements: &[ElementId]) -> Result<Subset> {
        let mut s = self.empty_set();
        for &e in elements {
            s.insert(e)?;
        }
        Ok(s)
    }

    fn occupancy_of(&self, s: &Subset) -> Result<Vec<usize>> {
        if Arc::ptr_eq(&s.group_of, &self.group_of) {
            return Ok(s.counts.clone());
        }
        let mut counts = vec![0; self.k()];
        for e in s.iter() {
            if e >= self.n() {
                return Err(Error::UnknownElement(e));
            }
            counts[self.group_of[e]] += 1;
        }
        Ok(counts)
    }

    pub fn is_feasible(&self, s: &Subset) -> Result<bool> {
        let counts = self.occupancy_of(s)?;
        Ok(counts.iter().zip(&self.budgets).all(|(c, b)| c <= b))
    }

    pub fn is_maximal(&self, s: &Subset) -> Result<bool> {
        let counts = self.occupancy_of(s)?;
        if counts.iter().zip(&self.budgets).any(|(c, b)| c > b) {
            return Err(Error::InfeasibleInput);
        }
        Ok(counts == self.budgets)
    }

    /// Remaining capacity `b_i - |S ∩ V_i|` of group `i`.
    pub fn residual(&self, s: &Subset, i: usize) -> usize {
        self.budgets[i].saturating_sub(s.occupancy(i))
    }

    /// Whether `e` could be added to `s` without violating its group budget.
    pub fn can_add(&self, s: &Subset, e: ElementId) -> bool {
        !s.contains(e) && self.residual(s, self.group_of[e]) > 0
    }

    /// Number of maximal sets, `∏ C(n_i, b_i)`, saturating at `u128::MAX`.
    pub fn maximal_set_count(&self) -> u128 {
        self.groups
            .iter()
            .zip(&self.budgets)
            .fold(1u128, |acc, (g, &b)| {
                acc.saturating_mul(binomial(g.len() as u128, b as u128))
            })
    }
}

pub(crate) fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// `b` split over `k` groups as `⌊b/k⌋` each, the remainder going one apiece
/// to the lowest-indexed groups.
pub fn split_budget(b: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| b / k + usize::from(i < b % k)).collect()
}

/// Splits `0..n` into `k` random groups whose sizes differ by at most one
/// (larger groups first) and shares `b` out with [`split_budget`].
pub fn random_partition<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    b: usize,
    rng: &mut R,
) -> Result<PartitionMatroid> {
    if k == 0 || k > n {
        return Err(Error::TooManySegments { n, k });
    }
    let mut order: Vec<ElementId> = (0..n).collect();
    order.shuffle(rng);
    let mut groups = Vec::with_capacity(k);
    let mut rest = order.as_slice();
    for i in 0..k {
        let size = n / k + usize::from(i < n % k);
        let (head, tail) = rest.split_at(size);
        groups.push(head.to_vec());
        rest = tail;
    }
    PartitionMatroid::new(groups, split_budget(b, k))
}

/// A set of elements with per-group occupancy counters.
///
/// Elements remember their insertion order, which algorithms use to undo a
/// tentative insertion with [`Subset::pop`].
#[derive(Debug, Clone)]
pub struct Subset {
    present: Vec<bool>,
    order: Vec<ElementId>,
    counts: Vec<usize>,
    group_of: Arc<[usize]>,
}

impl PartialEq for Subset {
    fn eq(&self, other: &Self) -> bool {
        self.present == other.present
    }
}

impl Eq for Subset {}

impl Subset {
    /// A subset of `0..n` with no group structure (every element in group 0).
    pub fn empty(n: usize) -> Self {
        Self {
            present: vec![false; n],
            order: Vec::new(),
            counts: vec![0],
            group_of: vec![0; n].into(),
        }
    }

    pub fn from_elements(n: usize, elements: &[ElementId]) -> Result<Self> {
        let mut s = Self::empty(n);
        for &e in elements {
            s.insert(e)?;
        }
        Ok(s)
    }

    pub fn ground_size(&self) -> usize {
        self.present.len()
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    pub fn contains(&self, e: ElementId) -> bool {
        self.present.get(e).copied().unwrap_or(false)
    }

    /// Elements in insertion order.
    pub fn iter(&self) -> impl Iterator<Item = ElementId> + '_ {
        self.order.iter().copied()
    }

    pub fn last(&self) -> Option<ElementId> {
        self.order.last().copied()
    }

    /// Elements in ascending id order.
    pub fn sorted(&self) -> Vec<ElementId> {
        let mut v = self.order.clone();
        v.sort_unstable();
        v
    }

    pub fn membership(&self) -> &[bool] {
        &self.present
    }

    pub fn occupancy(&self, group: usize) -> usize {
        self.counts.get(group).copied().unwrap_or(0)
    }

    pub fn insert(&mut self, e: ElementId) -> Result<()> {
        if e >= self.present.len() {
            return Err(Error::UnknownElement(e));
        }
        if self.present[e] {
            return Err(Error::ElementAlreadyInSet(e));
        }
        self.present[e] = true;
        self.order.push(e);
        self.counts[self.group_of[e]] += 1;
        Ok(())
    }

    /// Removes and returns the most recently inserted element.
    pub fn pop(&mut self) -> Option<ElementId> {
        let e = self.order.pop()?;
        self.present[e] = false;
        self.counts[self.group_of[e]] -= 1;
        Some(e)
    }

    /// A copy of `self` with `e` added.
    pub fn with(&self, e: ElementId) -> Result<Self> {
        let mut s = self.clone();
        s.insert(e)?;
        Ok(s)
    }

    /// True when every element of `self` is also in `other`.
    pub fn is_subset_of(&self, other: &Subset) -> bool {
        self.order.iter().all(|&e| other.contains(e))
    }
}
