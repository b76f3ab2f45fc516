use crate::error::{Error, Result};
use crate::matroid::{ElementId, PartitionMatroid, Subset};
use crate::oracle::{CountingOracle, Objective};

use super::{finish, RunResult};

pub const DEFAULT_ENUMERATION_CAP: u128 = 1_000_000;

/// Exact optimum by enumerating every maximal set.
///
/// Monotonicity makes some maximal set optimal. Ties go to the
/// lexicographically smallest sorted solution.
pub fn brute_force<O: Objective + ?Sized>(m: &PartitionMatroid, oracle: &O) -> Result<RunResult> {
    brute_force_with_cap(m, oracle, DEFAULT_ENUMERATION_CAP)
}

pub fn brute_force_with_cap<O: Objective + ?Sized>(
    m: &PartitionMatroid,
    oracle: &O,
    cap: u128,
) -> Result<RunResult> {
    let count = m.maximal_set_count();
    if count > cap {
        return Err(Error::InstanceTooLarge {
            what: "maximal sets",
            size: count,
            cap,
        });
    }
    let counter = CountingOracle::new(oracle);
    let mut best: Option<(f64, Vec<ElementId>)> = None;
    let mut s = m.empty_set();
    enumerate(m, 0, 0, &mut s, &mut |set: &Subset| {
        let v = counter.value(set);
        let better = match &best {
            None => true,
            Some((bv, bs)) => v > *bv || (v == *bv && set.sorted() < *bs),
        };
        if better {
            best = Some((v, set.sorted()));
        }
    });
    let (_, elements) = best.expect("at least one maximal set");
    let solution = m.subset(&elements)?;
    let queries = counter.count();
    Ok(finish(oracle, solution, queries, Vec::new(), None))
}

/// Visits every maximal set: groups in order, combinations within a group
/// in lexicographic order.
fn enumerate(
    m: &PartitionMatroid,
    group: usize,
    from: usize,
    s: &mut Subset,
    visit: &mut dyn FnMut(&Subset),
) {
    if group == m.k() {
        visit(s);
        return;
    }
    if s.occupancy(group) == m.budget(group) {
        enumerate(m, group + 1, 0, s, visit);
        return;
    }
    let members = m.group(group);
    let needed = m.budget(group) - s.occupancy(group);
    for j in from..=members.len() - needed {
        s.insert(members[j]).expect("fresh element");
        enumerate(m, group, j + 1, s, visit);
        s.pop();
    }
}
