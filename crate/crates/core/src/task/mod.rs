//! Tasks, rule descriptions and exact-match verification.

mod manifest;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{Color, Grid};

pub use manifest::{read_manifest, read_manifest_unchecked, write_manifest, DatasetManifest, ManifestError, Split};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Difficulty {
    Easy,
    Medium,
    Hard,
}

impl Difficulty {
    pub const ALL: [Difficulty; 3] = [Difficulty::Easy, Difficulty::Medium, Difficulty::Hard];

    pub fn name(self) -> &'static str {
        match self {
            Difficulty::Easy => "easy",
            Difficulty::Medium => "medium",
            Difficulty::Hard => "hard",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    CrossStar,
    CountingCells,
    DoubleGrid,
    DominantSide,
    DropOneColor,
}

impl Category {
    pub const ALL: [Category; 5] = [
        Category::CrossStar,
        Category::CountingCells,
        Category::DoubleGrid,
        Category::DominantSide,
        Category::DropOneColor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::CrossStar => "cross_star",
            Category::CountingCells => "counting_cells",
            Category::DoubleGrid => "double_grid",
            Category::DominantSide => "dominant_side",
            Category::DropOneColor => "drop_one_color",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown {kind} `{value}`")]
pub struct ParseNameError {
    kind: &'static str,
    value: String,
}

macro_rules! named_enum {
    ($ty:ty, $kind:literal) => {
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }

        impl FromStr for $ty {
            type Err = ParseNameError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                let wanted = s.trim().to_ascii_lowercase().replace('-', "_");
                <$ty>::ALL
                    .iter()
                    .copied()
                    .find(|v| v.name() == wanted)
                    .ok_or_else(|| ParseNameError {
                        kind: $kind,
                        value: s.to_string(),
                    })
            }
        }
    };
}

named_enum!(Difficulty, "difficulty");
named_enum!(Category, "category");

/// Shape drawn through each anchor cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StarShape {
    Row,
    Column,
    /// The `\` diagonal, extended fully in both directions.
    DiagDownRight,
    /// The `/` diagonal, extended fully in both directions.
    DiagDownLeft,
    /// Row plus column.
    Cross,
    /// Both diagonals.
    X,
}

impl StarShape {
    pub const LINES: [StarShape; 4] = [
        StarShape::Row,
        StarShape::Column,
        StarShape::DiagDownRight,
        StarShape::DiagDownLeft,
    ];
    pub const COMPOUND: [StarShape; 2] = [StarShape::Cross, StarShape::X];
    pub const ALL: [StarShape; 6] = [
        StarShape::Row,
        StarShape::Column,
        StarShape::DiagDownRight,
        StarShape::DiagDownLeft,
        StarShape::Cross,
        StarShape::X,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMeasure {
    /// Number of minority-color cells.
    CellCount,
    /// Size of the largest 4-connected minority-color cluster.
    LargestCluster,
    /// Always a single minority-color cell.
    ConstantOne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Copies side by side.
    Horizontal,
    /// Copies stacked.
    Vertical,
}

/// Applied to the second copy of a duplicated grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CopyTransform {
    Identity,
    Rot180,
    /// Exchange the two colors of a two-color grid.
    ColorFlip,
}

/// Applied to tile copies at odd checkerboard positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum TileTransform {
    Identity,
    Rot90,
    /// Exchange the tile's majority color with `with`.
    BackgroundSwap { with: Color },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FillSource {
    Left,
    Right,
    Top,
    Bottom,
    /// Whole-grid majority color.
    Majority,
    /// Whole-grid minority color.
    Minority,
}

impl FillSource {
    pub const SIDES: [FillSource; 4] = [
        FillSource::Left,
        FillSource::Right,
        FillSource::Top,
        FillSource::Bottom,
    ];

    pub fn is_side(self) -> bool {
        Self::SIDES.contains(&self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecolorTarget {
    Fixed(Color),
    /// Whatever the input's majority color is.
    Background,
}

/// Parameters of one concrete rule variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RuleParams {
    CrossStar { shape: StarShape },
    CountingCells { measure: CountMeasure },
    Duplicate { axis: Axis, copy: CopyTransform },
    Tile { across: u8, down: u8, transform: TileTransform },
    DominantSide { source: FillSource },
    Recolor { source: Color, target: RecolorTarget },
}

impl RuleParams {
    pub fn category(&self) -> Category {
        match self {
            RuleParams::CrossStar { .. } => Category::CrossStar,
            RuleParams::CountingCells { .. } => Category::CountingCells,
            RuleParams::Duplicate { .. } | RuleParams::Tile { .. } => Category::DoubleGrid,
            RuleParams::DominantSide { .. } => Category::DominantSide,
            RuleParams::Recolor { .. } => Category::DropOneColor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuleError {
    #[error("malformed rule: {0}")]
    Malformed(String),
    #[error("input does not fit the rule: {0}")]
    InputMismatch(String),
}

/// A concrete transformation: family, difficulty and parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleSpec {
    pub category: Category,
    pub difficulty: Difficulty,
    pub params: RuleParams,
}

impl RuleSpec {
    pub fn new(category: Category, difficulty: Difficulty, params: RuleParams) -> RuleSpec {
        RuleSpec {
            category,
            difficulty,
            params,
        }
    }

    /// Checks that the parameters belong to this (category, difficulty) variant.
    ///
    /// Confusion-family candidates are executable without passing this check.
    pub fn validate(&self) -> Result<(), RuleError> {
        use Difficulty::*;
        let bad = |why: &str| Err(RuleError::Malformed(format!("{} {}: {why}", self.category, self.difficulty)));
        if self.params.category() != self.category {
            return bad("parameters belong to another category");
        }
        match (self.difficulty, self.params) {
            (Easy, RuleParams::CrossStar { shape }) if !StarShape::LINES.contains(&shape) => {
                bad("easy shapes are single lines")
            }
            (Medium | Hard, RuleParams::CrossStar { shape }) if !StarShape::COMPOUND.contains(&shape) => {
                bad("medium and hard shapes are cross or x")
            }
            (Easy, RuleParams::CountingCells { measure }) if measure != CountMeasure::CellCount => {
                bad("easy counts cells")
            }
            (Medium | Hard, RuleParams::CountingCells { measure }) if measure != CountMeasure::LargestCluster => {
                bad("medium and hard count the largest cluster")
            }
            (Easy, RuleParams::Duplicate { copy, .. }) if copy != CopyTransform::Identity => {
                bad("easy duplicates without transforming")
            }
            (Medium, RuleParams::Duplicate { copy: CopyTransform::Identity, .. }) => {
                bad("medium transforms the copy")
            }
            (Easy | Medium, RuleParams::Tile { .. }) => bad("tiling is the hard variant"),
            (Hard, RuleParams::Duplicate { .. }) => bad("hard tiles a 3x3 seed"),
            (Hard, RuleParams::Tile { across, down, transform }) => {
                if !(2..=3).contains(&across) || !(2..=3).contains(&down) {
                    bad("replication counts must be 2 or 3")
                } else if transform == TileTransform::Identity {
                    bad("hard copies must be transformed")
                } else {
                    Ok(())
                }
            }
            (_, RuleParams::DominantSide { source }) if !source.is_side() => {
                bad("the designated source must be a side")
            }
            (Easy | Medium, RuleParams::Recolor { source, target }) => match target {
                RecolorTarget::Fixed(to) if to != source => Ok(()),
                RecolorTarget::Fixed(_) => bad("source and target must differ"),
                RecolorTarget::Background => bad("only hard recolors into the background"),
            },
            (Hard, RuleParams::Recolor { target, .. }) if target != RecolorTarget::Background => {
                bad("hard recolors into the background")
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pair {
    pub input: Grid,
    pub output: Grid,
}

/// Demonstrations plus one held-out test pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Task {
    pub id: String,
    pub seed: u64,
    pub rule: RuleSpec,
    pub train_pairs: Vec<Pair>,
    pub test_input: Grid,
    pub test_output: Grid,
}

impl Task {
    pub fn category(&self) -> Category {
        self.rule.category
    }

    pub fn difficulty(&self) -> Difficulty {
        self.rule.difficulty
    }

    /// Train pairs followed by the test pair.
    pub fn all_pairs(&self) -> impl Iterator<Item = (&Grid, &Grid)> {
        self.train_pairs
            .iter()
            .map(|p| (&p.input, &p.output))
            .chain(std::iter::once((&self.test_input, &self.test_output)))
    }

    /// Re-applies the stored rule to every input and compares outputs.
    pub fn check_consistency(&self) -> Result<(), TaskError> {
        self.rule.validate()?;
        if self.train_pairs.len() < 2 {
            return Err(TaskError::TooFewPairs(self.train_pairs.len()));
        }
        for (index, (input, output)) in self.all_pairs().enumerate() {
            let produced = self.rule.apply(input)?;
            if !verify(output, &produced) {
                return Err(TaskError::Inconsistent { pair: index });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TaskError {
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error("task needs at least 2 demonstrations, has {0}")]
    TooFewPairs(usize),
    #[error("stored output of pair {pair} differs from the rule's output")]
    Inconsistent { pair: usize },
}

/// Exact match: same shape and every cell equal.
pub fn verify(expected: &Grid, predicted: &Grid) -> bool {
    expected == predicted
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verify_is_exact_equality() {
        let maroon = Grid::filled(1, 1, Color::Maroon).unwrap();
        let pair = Grid::filled(1, 2, Color::Maroon).unwrap();
        assert!(verify(&maroon, &maroon));
        assert!(!verify(&maroon, &pair));
        assert!(!verify(&pair, &maroon));
        let other = Grid::filled(1, 2, Color::Red).unwrap();
        assert!(!verify(&pair, &other));
    }

    #[test]
    fn names_parse() {
        assert_eq!("cross-star".parse::<Category>().unwrap(), Category::CrossStar);
        assert_eq!("Hard".parse::<Difficulty>().unwrap(), Difficulty::Hard);
        assert!("spiral".parse::<Category>().is_err());
        assert_eq!(Category::DropOneColor.to_string(), "drop_one_color");
    }

    #[test]
    fn validation_rejects_wrong_variant_params() {
        let rule = RuleSpec::new(
            Category::CrossStar,
            Difficulty::Easy,
            RuleParams::CrossStar { shape: StarShape::Cross },
        );
        assert!(rule.validate().is_err());
        let rule = RuleSpec::new(
            Category::CrossStar,
            Difficulty::Medium,
            RuleParams::CrossStar { shape: StarShape::Cross },
        );
        assert!(rule.validate().is_ok());
        let rule = RuleSpec::new(
            Category::DoubleGrid,
            Difficulty::Hard,
            RuleParams::Tile { across: 4, down: 2, transform: TileTransform::Rot90 },
        );
        assert!(rule.validate().is_err());
        let rule = RuleSpec::new(
            Category::DropOneColor,
            Difficulty::Easy,
            RuleParams::Recolor { source: Color::Red, target: RecolorTarget::Fixed(Color::Red) },
        );
        assert!(rule.validate().is_err());
        let rule = RuleSpec::new(
            Category::CountingCells,
            Difficulty::Easy,
            RuleParams::DominantSide { source: FillSource::Left },
        );
        assert!(rule.validate().is_err());
    }

    #[test]
    fn rule_json_shape() {
        let rule = RuleSpec::new(
            Category::DropOneColor,
            Difficulty::Easy,
            RuleParams::Recolor { source: Color::Red, target: RecolorTarget::Fixed(Color::Blue) },
        );
        let json = serde_json::to_string(&rule).unwrap();
        assert_eq!(
            json,
            r#"{"category":"drop_one_color","difficulty":"easy","params":{"kind":"recolor","source":"red","target":{"fixed":"blue"}}}"#
        );
        assert_eq!(serde_json::from_str::<RuleSpec>(&json).unwrap(), rule);
    }
}
