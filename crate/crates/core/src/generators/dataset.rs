//! Whole-dataset sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::seed::{mix, task_seed};
use super::{generate_task, DatasetConfig, GenerateError};
use crate::task::{Category, DatasetManifest, Difficulty, Split, Task};

const DIFFICULTY_SALT: u64 = 0xD1FF;

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub train: DatasetManifest,
    pub test: DatasetManifest,
}

impl Dataset {
    pub fn split(&self, split: Split) -> &DatasetManifest {
        match split {
            Split::Train => &self.train,
            Split::Test => &self.test,
        }
    }
}

/// Draws a difficulty from its own stream so it never shifts the task stream.
pub fn sample_difficulty(probs: [f64; 3], task_seed: u64) -> Difficulty {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(task_seed, DIFFICULTY_SALT));
    let u: f64 = rng.random();
    if u < probs[0] {
        Difficulty::Easy
    } else if u < probs[0] + probs[1] {
        Difficulty::Medium
    } else {
        Difficulty::Hard
    }
}

fn sample_split(cfg: &DatasetConfig, split: Split) -> Result<DatasetManifest, GenerateError> {
    let jobs: Vec<(Category, usize)> = Category::ALL
        .iter()
        .flat_map(|&c| (0..cfg.split_sizes(split).get(&c).copied().unwrap_or(0)).map(move |i| (c, i)))
        .collect();
    let tasks = jobs
        .into_par_iter()
        .map(|(category, counter)| -> Result<Task, GenerateError> {
            let seed = task_seed(cfg.seed, category, split, counter as u64);
            let difficulty = sample_difficulty(cfg.generator.difficulty_probs, seed);
            let mut task = generate_task(category, difficulty, seed, &cfg.generator)?;
            task.id = format!("{category}-{split}-{counter:04}");
            Ok(task)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DatasetManifest {
        config: cfg.clone(),
        split,
        tasks,
    })
}

/// Samples both splits. Output order is category, then counter, regardless of
/// how the work is scheduled.
pub fn sample_dataset(cfg: &DatasetConfig) -> Result<Dataset, GenerateError> {
    cfg.generator.validate()?;
    Ok(Dataset {
        train: sample_split(cfg, Split::Train)?,
        test: sample_split(cfg, Split::Test)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_ids() {
        let cfg = DatasetConfig::with_sizes(9, 3, 2);
        let data = sample_dataset(&cfg).unwrap();
        assert_eq!(data.train.tasks.len(), 15);
        assert_eq!(data.test.tasks.len(), 10);
        assert_eq!(data.train.tasks[0].id, "cross_star-train-0000");
        assert_eq!(data.test.tasks[9].id, "drop_one_color-test-0001");
        for (c, n) in data.train.counts_by_category() {
            assert_eq!(n, cfg.train_per_category[&c]);
        }
    }

    #[test]
    fn degenerate_probabilities() {
        assert_eq!(sample_difficulty([1.0, 0.0, 0.0], 5), Difficulty::Easy);
        assert_eq!(sample_difficulty([0.0, 0.0, 1.0], 5), Difficulty::Hard);
        assert_eq!(sample_difficulty([0.0, 1.0, 0.0], 77), Difficulty::Medium);
    }
}
