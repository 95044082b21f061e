//! Uniqueness checking against families of plausible alternative rules.

use std::collections::BTreeSet;

use crate::grid::Color;
use crate::task::{
    Axis, Category, CopyTransform, CountMeasure, FillSource, RecolorTarget, RuleParams, RuleSpec,
    StarShape, Task, TileTransform,
};

/// Alternative rules a solver could plausibly read off a task's demonstrations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionFamily {
    pub category: Category,
    pub candidates: Vec<RuleSpec>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ambiguity {
    pub unique: bool,
    /// Every candidate (intended rule included) that reproduces all train outputs.
    pub consistent_rules: Vec<RuleSpec>,
}

/// Builds the confusion family for the task's category and variant.
pub fn confusion_family(task: &Task) -> ConfusionFamily {
    let rule = task.rule;
    let with = |params| RuleSpec::new(rule.category, rule.difficulty, params);
    let mut candidates: Vec<RuleSpec> = match rule.params {
        RuleParams::CrossStar { .. } => StarShape::ALL
            .iter()
            .map(|&shape| with(RuleParams::CrossStar { shape }))
            .collect(),
        RuleParams::CountingCells { .. } => [
            CountMeasure::CellCount,
            CountMeasure::LargestCluster,
            CountMeasure::ConstantOne,
        ]
        .iter()
        .map(|&measure| with(RuleParams::CountingCells { measure }))
        .collect(),
        RuleParams::Duplicate { .. } | RuleParams::Tile { .. } => {
            let mut out: Vec<RuleSpec> = [Axis::Horizontal, Axis::Vertical]
                .iter()
                .flat_map(|&axis| {
                    [CopyTransform::Identity, CopyTransform::Rot180, CopyTransform::ColorFlip]
                        .map(|copy| with(RuleParams::Duplicate { axis, copy }))
                })
                .collect();
            // Tiled tasks also compete against the other per-copy transforms.
            if let RuleParams::Tile { across, down, transform } = rule.params {
                let mut transforms = vec![TileTransform::Identity, TileTransform::Rot90];
                if let TileTransform::BackgroundSwap { .. } = transform {
                    transforms.push(transform);
                }
                out.extend(
                    transforms
                        .into_iter()
                        .map(|transform| with(RuleParams::Tile { across, down, transform })),
                );
            }
            out
        }
        RuleParams::DominantSide { .. } => [
            FillSource::Left,
            FillSource::Right,
            FillSource::Top,
            FillSource::Bottom,
            FillSource::Majority,
            FillSource::Minority,
        ]
        .iter()
        .map(|&source| with(RuleParams::DominantSide { source }))
        .collect(),
        RuleParams::Recolor { source, target } => {
            // The fixed "other" colors: the target, or every demo background.
            let others: Vec<Color> = match target {
                RecolorTarget::Fixed(to) => vec![to],
                RecolorTarget::Background => task
                    .train_pairs
                    .iter()
                    .map(|p| p.input.histogram().majority())
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .filter(|&c| c != source)
                    .collect(),
            };
            let recolor = |source, target| with(RuleParams::Recolor { source, target });
            let mut out = Vec::new();
            for &b in &others {
                out.push(recolor(source, RecolorTarget::Fixed(b)));
                out.push(recolor(b, RecolorTarget::Fixed(source)));
            }
            out.push(recolor(source, RecolorTarget::Background));
            for &b in &others {
                out.push(recolor(b, RecolorTarget::Background));
            }
            out
        }
    };
    if !candidates.contains(&rule) {
        candidates.insert(0, rule);
    }
    ConfusionFamily {
        category: rule.category,
        candidates,
    }
}

fn consistent(rule: &RuleSpec, task: &Task) -> bool {
    task.train_pairs
        .iter()
        .all(|pair| rule.apply(&pair.input).is_ok_and(|out| out == pair.output))
}

/// The task is unique when its own rule fits every demonstration and every
/// other candidate contradicts at least one of them.
pub fn check_unambiguous(task: &Task, family: &ConfusionFamily) -> Ambiguity {
    let mut consistent_rules: Vec<RuleSpec> = Vec::new();
    for candidate in &family.candidates {
        if !consistent_rules.contains(candidate) && consistent(candidate, task) {
            consistent_rules.push(*candidate);
        }
    }
    let intended_fits = consistent_rules.contains(&task.rule) || consistent(&task.rule, task);
    let unique = intended_fits && consistent_rules.iter().all(|r| *r == task.rule);
    Ambiguity {
        unique,
        consistent_rules,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::task::{Difficulty, Pair};

    fn counting_task(counts: &[usize]) -> Task {
        let rule = RuleSpec::new(
            Category::CountingCells,
            Difficulty::Easy,
            RuleParams::CountingCells { measure: CountMeasure::CellCount },
        );
        let make = |n: usize| {
            let mut input = Grid::filled(6, 6, Color::Green).unwrap();
            for k in 0..n {
                input.set(0, 2 * k, Color::Teal);
            }
            let output = rule.apply(&input).unwrap();
            Pair { input, output }
        };
        let mut pairs: Vec<Pair> = counts.iter().map(|&n| make(n)).collect();
        let test = pairs.pop().unwrap();
        Task {
            id: "counting".into(),
            seed: 0,
            rule,
            train_pairs: pairs,
            test_input: test.input,
            test_output: test.output,
        }
    }

    #[test]
    fn single_cell_demos_are_ambiguous() {
        let task = counting_task(&[1, 1, 1, 2]);
        let result = check_unambiguous(&task, &confusion_family(&task));
        assert!(!result.unique);
        // Count, largest cluster and constant-1x1 all explain n = 1 demos.
        assert_eq!(result.consistent_rules.len(), 3);
    }

    #[test]
    fn a_two_cell_demo_disambiguates() {
        let task = counting_task(&[1, 2, 3, 1]);
        let result = check_unambiguous(&task, &confusion_family(&task));
        assert!(result.unique, "{:?}", result.consistent_rules);
        assert_eq!(result.consistent_rules, vec![task.rule]);
    }

    fn dominant_task(splits: &[(usize, Color, Color)]) -> Task {
        let rule = RuleSpec::new(
            Category::DominantSide,
            Difficulty::Easy,
            RuleParams::DominantSide { source: FillSource::Bottom },
        );
        // `bottom_rows` of 6 rows belong to the designated bottom side.
        let make = |&(bottom_rows, top, bottom): &(usize, Color, Color)| {
            let mut input = Grid::filled(6, 5, top).unwrap();
            for r in 6 - bottom_rows..6 {
                for c in 0..5 {
                    input.set(r, c, bottom);
                }
            }
            let output = rule.apply(&input).unwrap();
            Pair { input, output }
        };
        let mut pairs: Vec<Pair> = splits.iter().map(make).collect();
        let test = pairs.pop().unwrap();
        Task {
            id: "dominant".into(),
            seed: 0,
            rule,
            train_pairs: pairs,
            test_input: test.input,
            test_output: test.output,
        }
    }

    #[test]
    fn side_matching_majority_everywhere_is_ambiguous() {
        let task = dominant_task(&[
            (4, Color::Red, Color::Blue),
            (4, Color::Teal, Color::Green),
            (5, Color::Pink, Color::Yellow),
            (4, Color::Black, Color::Grey),
            (4, Color::Red, Color::Blue),
        ]);
        let result = check_unambiguous(&task, &confusion_family(&task));
        assert!(!result.unique);
        assert!(result.consistent_rules.contains(&RuleSpec::new(
            Category::DominantSide,
            Difficulty::Easy,
            RuleParams::DominantSide { source: FillSource::Majority },
        )));
    }

    #[test]
    fn smaller_designated_side_rules_out_majority() {
        let task = dominant_task(&[
            (2, Color::Red, Color::Blue),
            (4, Color::Teal, Color::Green),
            (2, Color::Pink, Color::Yellow),
            (4, Color::Black, Color::Grey),
            (3, Color::Red, Color::Blue),
        ]);
        let result = check_unambiguous(&task, &confusion_family(&task));
        assert!(result.unique, "{:?}", result.consistent_rules);
    }

    #[test]
    fn family_always_contains_intended_rule() {
        let task = counting_task(&[1, 2, 2]);
        let family = confusion_family(&task);
        assert!(family.candidates.contains(&task.rule));
        assert_eq!(family.category, Category::CountingCells);
    }
}
