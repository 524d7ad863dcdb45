use rand::seq::SliceRandom;

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

/// Assignment of instances to `k` disjoint folds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

/// Shuffle `0..n` with `seed` and deal instances round-robin into `k` folds.
pub fn kfold(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "{k} folds requested for {n} instances"
        )));
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng_from_seed(seed));
    let mut assignments = vec![0; n];
    for (pos, &i) in perm.iter().enumerate() {
        assignments[i] = pos % k;
    }
    Ok(FoldPlan {
        k,
        assignments,
        seed,
    })
}

impl FoldPlan {
    /// A plan from explicit assignments; every fold must be non-empty.
    pub fn from_assignments(k: usize, assignments: Vec<usize>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 folds, got {k}"
            )));
        }
        let mut seen = vec![false; k];
        for &a in &assignments {
            if a >= k {
                return Err(Error::InvalidArgument(format!(
                    "fold index {a} out of range"
                )));
            }
            seen[a] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidArgument(
                "every fold needs an instance".into(),
            ));
        }
        Ok(Self {
            k,
            assignments,
            seed: 0,
        })
    }

    pub fn n_instances(&self) -> usize {
        self.assignments.len()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &a in &self.assignments {
            sizes[a] += 1;
        }
        sizes
    }

    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn one_instance_per_fold() {
        let p = kfold(10, 10, 1).unwrap();
        assert_eq!(p.fold_sizes(), vec![1; 10]);
    }

    #[test]
    fn eleven_into_ten() {
        let mut sizes = kfold(11, 10, 1).unwrap().fold_sizes();
        sizes.sort_unstable();
        assert_eq!(sizes, [vec![1; 9], vec![2]].concat());
    }

    #[test]
    fn deterministic() {
        assert_eq!(kfold(57, 10, 9).unwrap(), kfold(57, 10, 9).unwrap());
        assert_ne!(kfold(57, 10, 9).unwrap(), kfold(57, 10, 10).unwrap());
    }

    #[test]
    fn rejects_bad_k() {
        assert!(kfold(3, 4, 0).is_err());
        assert!(kfold(3, 1, 0).is_err());
    }

    proptest! {
        #[test]
        fn plan_invariants(n in 2usize..1000, kf in 0.0f64..1.0, seed in any::<u64>()) {
            let k = 2 + ((n - 2) as f64 * kf) as usize;
            let p = kfold(n, k, seed).unwrap();
            let sizes = p.fold_sizes();
            prop_assert_eq!(sizes.iter().sum::<usize>(), n);
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            prop_assert!(hi - lo <= 1);
            prop_assert!(*lo >= 1);
            for f in 0..k {
                let t = p.test_indices(f);
                let tr = p.train_indices(f);
                prop_assert_eq!(t.len() + tr.len(), n);
                prop_assert!(t.iter().all(|i| !tr.contains(i)));
            }
        }
    }
}
