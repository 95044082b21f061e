//! Grids of palette colors and the operations every rule is built from.
//!
//! A [`Grid`] is a dense, row-major matrix of [`Color`] cells. Grids are
//! immutable once built; every transform returns a fresh value.

mod components;
mod histogram;
mod transform;

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

pub(crate) use components::neighbours;
pub use components::{Component, Connectivity};
pub use histogram::ColorHistogram;
pub use transform::Transform;

/// Largest row or column count a grid may have.
pub const MAX_DIM: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("unknown color `{0}`")]
    UnknownColor(String),
    #[error("color index {0} is outside the palette")]
    BadColorIndex(u8),
    #[error("row {line} has {found} cells, expected {expected}")]
    RaggedRows {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("no grid rows found")]
    EmptyInput,
    #[error("grid shape {rows}x{cols} is outside 1..={max}")]
    BadShape { rows: usize, cols: usize, max: usize },
    #[error("expected {expected} cells for the given shape, got {found}")]
    CellCount { expected: usize, found: usize },
}

/// One of the ten palette colors.
///
/// Indices follow the order the colors are listed in the evaluation prompt.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Color {
    Black = 0,
    Blue = 1,
    Red = 2,
    Green = 3,
    Yellow = 4,
    Grey = 5,
    Pink = 6,
    Orange = 7,
    Teal = 8,
    Maroon = 9,
}

impl Color {
    pub const ALL: [Color; 10] = [
        Color::Black,
        Color::Blue,
        Color::Red,
        Color::Green,
        Color::Yellow,
        Color::Grey,
        Color::Pink,
        Color::Orange,
        Color::Teal,
        Color::Maroon,
    ];

    pub fn index(self) -> u8 {
        self as u8
    }

    pub fn from_index(index: u8) -> Result<Color, GridError> {
        Color::ALL
            .get(index as usize)
            .copied()
            .ok_or(GridError::BadColorIndex(index))
    }

    pub fn name(self) -> &'static str {
        match self {
            Color::Black => "black",
            Color::Blue => "blue",
            Color::Red => "red",
            Color::Green => "green",
            Color::Yellow => "yellow",
            Color::Grey => "grey",
            Color::Pink => "pink",
            Color::Orange => "orange",
            Color::Teal => "teal",
            Color::Maroon => "maroon",
        }
    }

    /// Case-insensitive name lookup. `gray` is accepted for grey.
    pub fn from_name(name: &str) -> Result<Color, GridError> {
        let lower = name.to_ascii_lowercase();
        if lower == "gray" {
            return Ok(Color::Grey);
        }
        Color::ALL
            .iter()
            .copied()
            .find(|c| c.name() == lower)
            .ok_or_else(|| GridError::UnknownColor(name.to_string()))
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Color {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Color::from_name(s)
    }
}

impl Serialize for Color {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Color {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let name = String::deserialize(deserializer)?;
        Color::from_name(&name).map_err(D::Error::custom)
    }
}

/// A `(row, col)` cell coordinate.
pub type Pos = (usize, usize);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<Color>,
}

impl Grid {
    pub fn new(rows: usize, cols: usize, cells: Vec<Color>) -> Result<Grid, GridError> {
        check_shape(rows, cols)?;
        if cells.len() != rows * cols {
            return Err(GridError::CellCount {
                expected: rows * cols,
                found: cells.len(),
            });
        }
        Ok(Grid { rows, cols, cells })
    }

    pub fn filled(rows: usize, cols: usize, color: Color) -> Result<Grid, GridError> {
        check_shape(rows, cols)?;
        Ok(Grid {
            rows,
            cols,
            cells: vec![color; rows * cols],
        })
    }

    /// Builds a grid from nested rows, rejecting ragged input.
    pub fn from_rows(rows: Vec<Vec<Color>>) -> Result<Grid, GridError> {
        let expected = rows.first().map(Vec::len).ok_or(GridError::EmptyInput)?;
        let mut cells = Vec::with_capacity(rows.len() * expected);
        for (line, row) in rows.iter().enumerate() {
            if row.len() != expected {
                return Err(GridError::RaggedRows {
                    line: line + 1,
                    expected,
                    found: row.len(),
                });
            }
            cells.extend_from_slice(row);
        }
        Grid::new(rows.len(), expected, cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn cells(&self) -> &[Color] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> Color {
        self.cells[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, color: Color) {
        self.cells[row * self.cols + col] = color;
    }

    pub fn row(&self, row: usize) -> &[Color] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn positions(&self) -> impl Iterator<Item = Pos> + '_ {
        let cols = self.cols;
        (0..self.cells.len()).map(move |i| (i / cols, i % cols))
    }

    /// Cells of `color` in row-major order.
    pub fn positions_of(&self, color: Color) -> Vec<Pos> {
        self.positions().filter(|&(r, c)| self.get(r, c) == color).collect()
    }

    /// Distinct colors present, ordered by index.
    pub fn colors(&self) -> Vec<Color> {
        self.histogram().present()
    }

    pub fn histogram(&self) -> ColorHistogram {
        ColorHistogram::of(self)
    }

    /// Copy of the `height x width` window whose top-left corner is `(row, col)`.
    pub fn subgrid(&self, row: usize, col: usize, height: usize, width: usize) -> Grid {
        let mut cells = Vec::with_capacity(height * width);
        for r in row..row + height {
            cells.extend_from_slice(&self.row(r)[col..col + width]);
        }
        Grid {
            rows: height,
            cols: width,
            cells,
        }
    }

    /// Writes `other` into this grid with its top-left corner at `(row, col)`.
    pub fn blit(&mut self, other: &Grid, row: usize, col: usize) {
        for r in 0..other.rows {
            for c in 0..other.cols {
                self.set(row + r, col + c, other.get(r, c));
            }
        }
    }

    /// Canonical text form: space-separated color names, one row per line.
    pub fn to_text(&self) -> String {
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .map(|c| c.name())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Parses text grids. Tokens may be separated by whitespace or commas;
    /// blank lines are skipped.
    pub fn from_text(text: &str) -> Result<Grid, GridError> {
        let rows = text
            .lines()
            .map(|line| {
                line.split(|ch: char| ch.is_whitespace() || ch == ',')
                    .filter(|tok| !tok.is_empty())
                    .map(Color::from_name)
                    .collect::<Result<Vec<_>, _>>()
            })
            .filter(|row| !matches!(row, Ok(cells) if cells.is_empty()))
            .collect::<Result<Vec<_>, _>>()?;
        Grid::from_rows(rows)
    }

    pub fn to_index_rows(&self) -> Vec<Vec<u8>> {
        (0..self.rows)
            .map(|r| self.row(r).iter().map(|c| c.index()).collect())
            .collect()
    }

    pub fn from_index_rows(rows: &[Vec<u8>]) -> Result<Grid, GridError> {
        let rows = rows
            .iter()
            .map(|row| row.iter().map(|&i| Color::from_index(i)).collect())
            .collect::<Result<Vec<_>, _>>()?;
        Grid::from_rows(rows)
    }
}

fn check_shape(rows: usize, cols: usize) -> Result<(), GridError> {
    if rows == 0 || cols == 0 || rows > MAX_DIM || cols > MAX_DIM {
        return Err(GridError::BadShape {
            rows,
            cols,
            max: MAX_DIM,
        });
    }
    Ok(())
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Grid::from_text(s)
    }
}

// On disk a grid is a nested array of color indices.
impl Serialize for Grid {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_index_rows().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Grid {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let rows = Vec::<Vec<u8>>::deserialize(deserializer)?;
        Grid::from_index_rows(&rows).map_err(D::Error::custom)
    }
}
