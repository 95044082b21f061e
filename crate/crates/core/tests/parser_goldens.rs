//! Published reasoning traces scored against hand-built tasks with the same rules.

use gridrule::eval::score_response;
use gridrule::generators::{check_unambiguous, confusion_family};
use gridrule::grid::{Color, Grid};
use gridrule::prompt::{extract_answer, ParseStatus};
use gridrule::task::{Category, CountMeasure, Difficulty, Pair, RuleParams, RuleSpec, StarShape, Task};

const SUCCESS: &str = include_str!("fixtures/counting_easy_success.txt");
const FAILURE: &str = include_str!("fixtures/cross_star_easy_failure.txt");

fn dotted(rows: usize, cols: usize, bg: Color, dots: &[(usize, usize, Color)]) -> Grid {
    let mut g = Grid::filled(rows, cols, bg).unwrap();
    for &(r, c, color) in dots {
        g.set(r, c, color);
    }
    g
}

fn build(rule: RuleSpec, inputs: Vec<Grid>, test_input: Grid) -> Task {
    let train_pairs = inputs
        .into_iter()
        .map(|input| Pair {
            output: rule.apply(&input).unwrap(),
            input,
        })
        .collect();
    let test_output = rule.apply(&test_input).unwrap();
    let task = Task {
        id: "golden".into(),
        seed: 0,
        rule,
        train_pairs,
        test_input,
        test_output,
    };
    task.check_consistency().unwrap();
    assert!(check_unambiguous(&task, &confusion_family(&task)).unique);
    task
}

fn counting_task() -> Task {
    use Color::*;
    let rule = RuleSpec::new(
        Category::CountingCells,
        Difficulty::Easy,
        RuleParams::CountingCells {
            measure: CountMeasure::CellCount,
        },
    );
    build(
        rule,
        vec![
            dotted(6, 6, Red, &[(1, 1, Yellow), (4, 3, Yellow)]),
            dotted(6, 6, Green, &[(2, 4, Teal)]),
            dotted(6, 6, Green, &[(0, 5, Grey), (3, 1, Grey)]),
        ],
        dotted(6, 6, Orange, &[(3, 3, Maroon)]),
    )
}

fn cross_star_task() -> Task {
    use Color::*;
    let rule = RuleSpec::new(
        Category::CrossStar,
        Difficulty::Easy,
        RuleParams::CrossStar {
            shape: StarShape::DiagDownRight,
        },
    );
    build(
        rule,
        vec![
            dotted(5, 5, Black, &[(1, 3, Pink)]),
            dotted(6, 4, Blue, &[(3, 1, Red)]),
            dotted(4, 7, Black, &[(2, 2, Pink)]),
        ],
        dotted(9, 6, Green, &[(7, 4, Yellow)]),
    )
}

#[test]
fn successful_trace_parses_to_its_final_grid_and_scores_correct() {
    let outcome = extract_answer(SUCCESS);
    assert_eq!(outcome.status, ParseStatus::Parsed);
    assert_eq!(outcome.grid.unwrap(), Grid::filled(1, 1, Color::Maroon).unwrap());
    let record = score_response(&counting_task(), SUCCESS);
    assert!(record.correct);
}

#[test]
fn unsuccessful_trace_parses_to_its_half_diagonal_and_scores_incorrect() {
    let expected_parse = dotted(9, 6, Color::Green, &[(7, 4, Color::Yellow), (8, 5, Color::Yellow)]);
    let outcome = extract_answer(FAILURE);
    assert_eq!(outcome.status, ParseStatus::Parsed);
    assert_eq!(outcome.grid.unwrap(), expected_parse);

    let task = cross_star_task();
    let full = dotted(
        9,
        6,
        Color::Green,
        &[(3, 0, Color::Yellow), (4, 1, Color::Yellow), (5, 2, Color::Yellow), (6, 3, Color::Yellow), (7, 4, Color::Yellow), (8, 5, Color::Yellow)],
    );
    assert_eq!(task.test_output, full);
    let record = score_response(&task, FAILURE);
    assert_eq!(record.parse_status, Some(ParseStatus::Parsed));
    assert!(!record.correct);
}

#[test]
fn traces_only_count_their_final_block() {
    let task = counting_task();
    let early_right = "```\nmaroon\n```\nOn reflection:\n```\nmaroon maroon\n```";
    assert!(!score_response(&task, early_right).correct);
    let early_wrong = format!("```\nteal\n```\n{SUCCESS}");
    assert!(score_response(&task, &early_wrong).correct);
}

#[test]
fn unfenced_and_malformed_answers() {
    let task = counting_task();
    let prose = score_response(&task, "The answer is maroon.");
    assert_eq!(prose.parse_status, Some(ParseStatus::NoFencedBlock));
    assert!(!prose.correct);
    let ragged = score_response(&task, "```\nmaroon maroon\nmaroon\n```");
    assert_eq!(ragged.parse_status, Some(ParseStatus::ParseError));
    let unknown = score_response(&task, "```\npurple\n```");
    assert_eq!(unknown.parse_status, Some(ParseStatus::ParseError));
    let commas = score_response(&task, "```text\nmaroon,\n```");
    assert!(commas.correct);
}
