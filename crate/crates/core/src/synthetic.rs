//! Random instances built from the closed-form oracles.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::matroid::PartitionMatroid;
use crate::oracle::{CardinalitySquared, Coverage, Modular, Objective};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SyntheticKind {
    Modular,
    Coverage,
    Squared,
}

impl SyntheticKind {
    pub const ALL: [SyntheticKind; 3] = [Self::Modular, Self::Coverage, Self::Squared];

    pub fn name(self) -> &'static str {
        match self {
            Self::Modular => "modular",
            Self::Coverage => "coverage",
            Self::Squared => "squared",
        }
    }

    pub fn oracle<R: Rng + ?Sized>(self, n: usize, rng: &mut R) -> Box<dyn Objective> {
        match self {
            Self::Modular => Box::new(random_modular(n, rng)),
            Self::Coverage => Box::new(random_coverage(n, 2 * n, rng)),
            Self::Squared => Box::new(CardinalitySquared::new(n)),
        }
    }
}

impl std::str::FromStr for SyntheticKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown synthetic kind `{s}` (modular, coverage, squared)"))
    }
}

/// Weights uniform in `[0, 10)`.
pub fn random_modular<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Modular {
    Modular::new((0..n).map(|_| rng.gen_range(0.0..10.0)).collect()).expect("valid weights")
}

/// Each element covers 1 to 4 random items of `0..universe`.
pub fn random_coverage<R: Rng + ?Sized>(n: usize, universe: usize, rng: &mut R) -> Coverage {
    let universe = universe.max(1);
    Coverage::new(
        (0..n)
            .map(|_| {
                let size = rng.gen_range(1..=4);
                (0..size).map(|_| rng.gen_range(0..universe)).collect()
            })
            .collect(),
    )
}

/// Random assignment of `0..n` to between 1 and `max_groups` non-empty
/// groups, with budgets uniform in `[1, n_i]`.
pub fn random_matroid<R: Rng + ?Sized>(
    n: usize,
    max_groups: usize,
    rng: &mut R,
) -> Result<PartitionMatroid> {
    let k = rng.gen_range(1..=max_groups.clamp(1, n.max(1)));
    // first k elements seed the groups so none is empty
    let mut assignment: Vec<usize> = (0..n)
        .map(|e| if e < k { e } else { rng.gen_range(0..k) })
        .collect();
    for i in (1..n).rev() {
        assignment.swap(i, rng.gen_range(0..=i));
    }
    let mut sizes = vec![0; k];
    for &g in &assignment {
        sizes[g] += 1;
    }
    let budgets = sizes.iter().map(|&s| rng.gen_range(1..=s)).collect();
    PartitionMatroid::from_assignment(&assignment, budgets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng_from_seed;

    #[test]
    fn random_matroids_are_valid() {
        let mut rng = rng_from_seed(1);
        for n in 1..12 {
            let m = random_matroid(n, 4, &mut rng).unwrap();
            assert_eq!(m.n(), n);
            assert!(m.k() <= 4);
        }
    }

    #[test]
    fn kinds_parse() {
        for k in SyntheticKind::ALL {
            assert_eq!(k.name().parse::<SyntheticKind>().unwrap(), k);
        }
        assert!("cube".parse::<SyntheticKind>().is_err());
    }
}
