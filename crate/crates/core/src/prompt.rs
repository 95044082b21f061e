//! Prompt construction and answer extraction.

use serde::{Deserialize, Serialize};

use crate::grid::Grid;

pub const PLACEHOLDER: &str = "{test_input}";

/// The evaluation prompt; `{test_input}` is replaced by the test grid text.
pub const PROMPT_TEMPLATE: &str = "Here is an image of multiple input-output grids. The cells of the grids can be of color black, blue, red, green, yellow, grey, pink, orange, teal, maroon. Your goal is to find the common rule that maps the input grid to the output grid. Make sure that you find an unambiguous transformation rule.

Below is a test input grid. After you find the transformation rule, apply it rigorously step by step to the test input grid to find the output grid. Put the final grid in ``` in the same format as the input grid, where rows are separated by newline and columns are separated by column.

{test_input}";

const FENCE: &str = "```";

pub fn build_prompt(test_input: &Grid) -> String {
    PROMPT_TEMPLATE.replacen(PLACEHOLDER, &test_input.to_text(), 1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParseStatus {
    Parsed,
    NoFencedBlock,
    ParseError,
}

impl ParseStatus {
    pub fn name(self) -> &'static str {
        match self {
            ParseStatus::Parsed => "parsed",
            ParseStatus::NoFencedBlock => "no_fenced_block",
            ParseStatus::ParseError => "parse_error",
        }
    }
}

impl std::fmt::Display for ParseStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseOutcome {
    pub status: ParseStatus,
    pub grid: Option<Grid>,
    pub diagnostics: String,
}

/// Contents of every closed fenced block, in order. Fences pair up left to
/// right; a trailing unmatched fence is ignored. When a block spans lines, the
/// text after the opening fence on its line is an info string and dropped.
pub fn fenced_blocks(text: &str) -> Vec<&str> {
    let marks: Vec<usize> = text.match_indices(FENCE).map(|(i, _)| i).collect();
    marks
        .chunks_exact(2)
        .map(|pair| {
            let body = &text[pair[0] + FENCE.len()..pair[1]];
            match body.find('\n') {
                Some(nl) => &body[nl + 1..],
                None => body,
            }
        })
        .collect()
}

/// Parses the last fenced block of a model response.
pub fn extract_answer(model_output: &str) -> ParseOutcome {
    let blocks = fenced_blocks(model_output);
    let Some(block) = blocks.last() else {
        return ParseOutcome {
            status: ParseStatus::NoFencedBlock,
            grid: None,
            diagnostics: "no closed ``` block in the response".into(),
        };
    };
    match Grid::from_text(block) {
        Ok(grid) => ParseOutcome {
            status: ParseStatus::Parsed,
            diagnostics: format!("{}x{} grid from the last of {} block(s)", grid.rows(), grid.cols(), blocks.len()),
            grid: Some(grid),
        },
        Err(e) => ParseOutcome {
            status: ParseStatus::ParseError,
            grid: None,
            diagnostics: e.to_string(),
        },
    }
}

/// Wraps grid text in a bare fence, the form the prompt asks for.
pub fn fence(text: &str) -> String {
    format!("{FENCE}\n{text}\n{FENCE}")
}
