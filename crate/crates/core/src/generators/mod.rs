//! Procedural task generation.
//!
//! Each family module drafts a rule plus demonstration pairs from a seeded
//! stream. [`generate_task`] keeps drafting until a draft passes the rule
//! consistency, non-identity and uniqueness checks, or the attempt budget is
//! spent.

mod ambiguity;
mod apply;
mod counting;
mod cross_star;
mod dataset;
mod dominant_side;
mod double_grid;
mod drop_color;
pub mod seed;

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Color, Grid, Pos, MAX_DIM};
use crate::task::{Category, Difficulty, Pair, RuleSpec, Split, Task};

pub use ambiguity::{check_unambiguous, confusion_family, Ambiguity, ConfusionFamily};
pub use dataset::{sample_dataset, sample_difficulty, Dataset};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    /// Probabilities of easy, medium and hard.
    pub difficulty_probs: [f64; 3],
    /// Inclusive bounds for sampled base grid rows and columns.
    pub dim_range: [usize; 2],
    pub max_regen_attempts: u32,
    /// Demonstrations per task, by category.
    pub train_pairs: BTreeMap<Category, usize>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        let train_pairs = Category::ALL
            .iter()
            .map(|&c| {
                let n = match c {
                    Category::DominantSide | Category::DropOneColor => 4,
                    _ => 3,
                };
                (c, n)
            })
            .collect();
        GeneratorConfig {
            difficulty_probs: [0.5, 0.35, 0.15],
            dim_range: [3, 10],
            max_regen_attempts: 100,
            train_pairs,
        }
    }
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), GenerateError> {
        let bad = |why: String| Err(GenerateError::InvalidConfig(why));
        let probs = self.difficulty_probs;
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return bad(format!("difficulty probabilities must be nonnegative, got {probs:?}"));
        }
        if (probs.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return bad(format!("difficulty probabilities must sum to 1, got {probs:?}"));
        }
        let [lo, hi] = self.dim_range;
        if lo < 1 || hi > MAX_DIM || lo > hi {
            return bad(format!("dim_range must satisfy 1 <= min <= max <= {MAX_DIM}, got [{lo}, {hi}]"));
        }
        if self.max_regen_attempts == 0 {
            return bad("max_regen_attempts must be positive".into());
        }
        for (&c, &n) in &self.train_pairs {
            if n < 2 {
                return bad(format!("{c} needs at least 2 demonstrations, got {n}"));
            }
        }
        Ok(())
    }

    pub fn train_pairs_for(&self, category: Category) -> usize {
        self.train_pairs.get(&category).copied().unwrap_or(3)
    }
}

/// Everything needed to regenerate a dataset byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub seed: u64,
    pub generator: GeneratorConfig,
    pub train_per_category: BTreeMap<Category, usize>,
    pub test_per_category: BTreeMap<Category, usize>,
}

impl DatasetConfig {
    pub fn with_sizes(seed: u64, train: usize, test: usize) -> DatasetConfig {
        let per = |n| Category::ALL.iter().map(|&c| (c, n)).collect();
        DatasetConfig {
            seed,
            generator: GeneratorConfig::default(),
            train_per_category: per(train),
            test_per_category: per(test),
        }
    }

    pub fn split_sizes(&self, split: Split) -> &BTreeMap<Category, usize> {
        match split {
            Split::Train => &self.train_per_category,
            Split::Test => &self.test_per_category,
        }
    }
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig::with_sizes(0, 1000, 100)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("no unambiguous {category} {difficulty} task for seed {seed:#018x} after {attempts} attempts")]
    GenerationExhausted {
        category: Category,
        difficulty: Difficulty,
        seed: u64,
        attempts: u32,
    },
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
}

/// A candidate task before validation. The last pair is the test pair.
pub(crate) struct Draft {
    pub rule: RuleSpec,
    pub pairs: Vec<(Grid, Grid)>,
}

/// Sampling helpers shared by the family generators.
pub(crate) struct Ctx<'a> {
    pub rng: &'a mut ChaCha8Rng,
    pub cfg: &'a GeneratorConfig,
    /// Train pairs plus one test pair.
    pub pairs: usize,
}

impl Ctx<'_> {
    pub fn range(&mut self, range: RangeInclusive<usize>) -> usize {
        self.rng.random_range(range)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn chance(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    pub fn dim(&mut self) -> usize {
        let [lo, hi] = self.cfg.dim_range;
        self.range(lo..=hi)
    }

    pub fn dims(&mut self) -> (usize, usize) {
        (self.dim(), self.dim())
    }

    pub fn pick<T: Copy>(&mut self, items: &[T]) -> T {
        *items.choose(self.rng).expect("nonempty choice")
    }

    /// `k` distinct colors, none of them in `exclude`.
    pub fn colors(&mut self, k: usize, exclude: &[Color]) -> Vec<Color> {
        let pool: Vec<Color> = Color::ALL.iter().copied().filter(|c| !exclude.contains(c)).collect();
        pool.choose_multiple(self.rng, k).copied().collect()
    }

    pub fn color(&mut self, exclude: &[Color]) -> Color {
        self.colors(1, exclude)[0]
    }

    pub fn shuffled_positions(&mut self, rows: usize, cols: usize) -> Vec<Pos> {
        let mut all: Vec<Pos> = (0..rows).flat_map(|r| (0..cols).map(move |c| (r, c))).collect();
        all.shuffle(self.rng);
        all
    }
}

/// Generates one task; a pure function of its arguments.
pub fn generate_task(
    category: Category,
    difficulty: Difficulty,
    seed: u64,
    cfg: &GeneratorConfig,
) -> Result<Task, GenerateError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = cfg.train_pairs_for(category) + 1;
    for _ in 0..cfg.max_regen_attempts {
        let mut ctx = Ctx {
            rng: &mut rng,
            cfg,
            pairs,
        };
        let draft = match category {
            Category::CrossStar => cross_star::draft(difficulty, &mut ctx),
            Category::CountingCells => counting::draft(difficulty, &mut ctx),
            Category::DoubleGrid => double_grid::draft(difficulty, &mut ctx),
            Category::DominantSide => dominant_side::draft(difficulty, &mut ctx),
            Category::DropOneColor => drop_color::draft(difficulty, &mut ctx),
        };
        if let Some(task) = draft.and_then(|d| accept(d, seed)) {
            return Ok(task);
        }
    }
    Err(GenerateError::GenerationExhausted {
        category,
        difficulty,
        seed,
        attempts: cfg.max_regen_attempts,
    })
}

fn accept(draft: Draft, seed: u64) -> Option<Task> {
    let Draft { rule, mut pairs } = draft;
    let (test_input, test_output) = pairs.pop()?;
    let task = Task {
        id: format!("{}-{}-{seed:016x}", rule.category, rule.difficulty),
        seed,
        rule,
        train_pairs: pairs
            .into_iter()
            .map(|(input, output)| Pair { input, output })
            .collect(),
        test_input,
        test_output,
    };
    if task.check_consistency().is_err() {
        return None;
    }
    if task.all_pairs().any(|(i, o)| i == o) {
        return None;
    }
    if !check_unambiguous(&task, &confusion_family(&task)).unique {
        return None;
    }
    Some(task)
}
