use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Fold assignment for k-fold cross-validation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldSplit {
    pub k: usize,
    pub seed: u64,
    pub assignments: Vec<usize>,
}

/// Seeded permutation of the example indices, then round-robin assignment.
pub fn split_folds(num_examples: usize, k: usize, seed: u64) -> Result<FoldSplit> {
    if k == 0 || k > num_examples {
        return Err(Error::InvalidFoldCount { k, examples: num_examples });
    }
    let mut order: Vec<usize> = (0..num_examples).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut assignments = vec![0; num_examples];
    for (pos, &example) in order.iter().enumerate() {
        assignments[example] = pos % k;
    }
    Ok(FoldSplit { k, seed, assignments })
}

impl FoldSplit {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments.iter().enumerate().filter(|&(_, &f)| f == fold).map(|(i, _)| i).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        self.assignments.iter().enumerate().filter(|&(_, &f)| f != fold).map(|(i, _)| i).collect()
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.assignments {
            sizes[f] += 1;
        }
        sizes
    }

    /// `example,fold` rows with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("example,fold\n");
        for (i, f) in self.assignments.iter().enumerate() {
            out.push_str(&format!("{i},{f}\n"));
        }
        out
    }
}
