//! Executable semantics of every rule variant.

use crate::grid::{Color, Connectivity, Grid, Pos, Transform, MAX_DIM};
use crate::task::{
    Axis, CopyTransform, CountMeasure, Difficulty, FillSource, RecolorTarget, RuleError, RuleParams,
    RuleSpec, StarShape, TileTransform,
};

fn mismatch<T>(why: impl Into<String>) -> Result<T, RuleError> {
    Err(RuleError::InputMismatch(why.into()))
}

impl RuleSpec {
    /// Maps an input grid to the output this rule prescribes.
    pub fn apply(&self, input: &Grid) -> Result<Grid, RuleError> {
        match self.params {
            RuleParams::CrossStar { shape } => cross_star(self.difficulty, shape, input),
            RuleParams::CountingCells { measure } => counting(measure, input),
            RuleParams::Duplicate { axis, copy } => duplicate(axis, copy, input),
            RuleParams::Tile { across, down, transform } => tile(across as usize, down as usize, transform, input),
            RuleParams::DominantSide { source } => dominant(source, input),
            RuleParams::Recolor { source, target } => recolor(source, target, input),
        }
    }
}

pub(crate) fn on_shape(shape: StarShape, anchor: Pos, pos: Pos) -> bool {
    let (ar, ac) = (anchor.0 as isize, anchor.1 as isize);
    let (r, c) = (pos.0 as isize, pos.1 as isize);
    let row = r == ar;
    let col = c == ac;
    let down_right = r - c == ar - ac;
    let down_left = r + c == ar + ac;
    match shape {
        StarShape::Row => row,
        StarShape::Column => col,
        StarShape::DiagDownRight => down_right,
        StarShape::DiagDownLeft => down_left,
        StarShape::Cross => row || col,
        StarShape::X => down_right || down_left,
    }
}

fn cross_star(difficulty: Difficulty, shape: StarShape, input: &Grid) -> Result<Grid, RuleError> {
    let background = input.histogram().majority();
    let anchors: Vec<Pos> = input
        .positions()
        .filter(|&(r, c)| input.get(r, c) != background)
        .collect();
    match difficulty {
        Difficulty::Easy | Difficulty::Medium if anchors.len() != 1 => {
            return mismatch(format!("expected one anchor cell, found {}", anchors.len()));
        }
        Difficulty::Hard => {
            if anchors.len() != 2 {
                return mismatch(format!("expected two anchor cells, found {}", anchors.len()));
            }
            if input.get(anchors[0].0, anchors[0].1) == input.get(anchors[1].0, anchors[1].1) {
                return mismatch("anchor cells must have distinct colors");
            }
        }
        _ => {}
    }
    let mut out = input.clone();
    for pos in input.positions() {
        // Anchors are in row-major order; the first one covering a cell wins.
        if let Some(&anchor) = anchors.iter().find(|&&a| on_shape(shape, a, pos)) {
            out.set(pos.0, pos.1, input.get(anchor.0, anchor.1));
        }
    }
    Ok(out)
}

fn counting(measure: CountMeasure, input: &Grid) -> Result<Grid, RuleError> {
    let histogram = input.histogram();
    if histogram.present().len() < 2 {
        return mismatch("counting needs a background and a target color");
    }
    let target = histogram.minority();
    let n = match measure {
        CountMeasure::CellCount => histogram.count(target),
        CountMeasure::LargestCluster => input.largest_component_size(target, Connectivity::Four),
        CountMeasure::ConstantOne => 1,
    };
    if n > MAX_DIM {
        return mismatch(format!("count {n} exceeds the maximum output width"));
    }
    Ok(Grid::filled(1, n, target).expect("1 <= n <= MAX_DIM"))
}

fn duplicate(axis: Axis, copy: CopyTransform, input: &Grid) -> Result<Grid, RuleError> {
    let second = match copy {
        CopyTransform::Identity => input.clone(),
        CopyTransform::Rot180 => input.transform(Transform::Rot180),
        CopyTransform::ColorFlip => match input.colors()[..] {
            [a, b] => input.transform(Transform::ColorSwap { a, b }),
            _ => return mismatch("color flip needs exactly two colors"),
        },
    };
    let (rows, cols) = input.shape();
    let (out_rows, out_cols, offset) = match axis {
        Axis::Horizontal => (rows, 2 * cols, (0, cols)),
        Axis::Vertical => (2 * rows, cols, (rows, 0)),
    };
    let Ok(mut out) = Grid::filled(out_rows, out_cols, Color::Black) else {
        return mismatch(format!("duplicated grid {out_rows}x{out_cols} is too large"));
    };
    out.blit(input, 0, 0);
    out.blit(&second, offset.0, offset.1);
    Ok(out)
}

fn tile(across: usize, down: usize, transform: TileTransform, input: &Grid) -> Result<Grid, RuleError> {
    let (rows, cols) = input.shape();
    if rows != cols {
        return mismatch("tiles must be square");
    }
    let changed = match transform {
        TileTransform::Identity => input.clone(),
        TileTransform::Rot90 => input.transform(Transform::Rot90),
        TileTransform::BackgroundSwap { with } => input.transform(Transform::ColorSwap {
            a: input.histogram().majority(),
            b: with,
        }),
    };
    let Ok(mut out) = Grid::filled(down * rows, across * cols, Color::Black) else {
        return mismatch("tiled grid is too large");
    };
    for i in 0..down {
        for j in 0..across {
            let copy = if (i + j) % 2 == 1 { &changed } else { input };
            out.blit(copy, i * rows, j * cols);
        }
    }
    Ok(out)
}

/// Strict half of the grid on `source`'s side; odd middle lines are excluded.
pub(crate) fn side_region(source: FillSource, input: &Grid) -> Option<Grid> {
    let (rows, cols) = input.shape();
    let (half_r, half_c) = (rows / 2, cols / 2);
    match source {
        FillSource::Left if half_c > 0 => Some(input.subgrid(0, 0, rows, half_c)),
        FillSource::Right if half_c > 0 => Some(input.subgrid(0, cols - half_c, rows, half_c)),
        FillSource::Top if half_r > 0 => Some(input.subgrid(0, 0, half_r, cols)),
        FillSource::Bottom if half_r > 0 => Some(input.subgrid(rows - half_r, 0, half_r, cols)),
        _ => None,
    }
}

fn dominant(source: FillSource, input: &Grid) -> Result<Grid, RuleError> {
    let color = match source {
        FillSource::Majority => input.histogram().majority(),
        FillSource::Minority => input.histogram().minority(),
        side => match side_region(side, input) {
            Some(region) => region.histogram().majority(),
            None => return mismatch("grid is too small to split into sides"),
        },
    };
    Ok(Grid::filled(input.rows(), input.cols(), color).expect("input shape"))
}

fn recolor(source: Color, target: RecolorTarget, input: &Grid) -> Result<Grid, RuleError> {
    let to = match target {
        RecolorTarget::Fixed(color) => color,
        RecolorTarget::Background => {
            let background = input.histogram().majority();
            if background == source {
                return mismatch("the source color is the background");
            }
            background
        }
    };
    Ok(input.recolor(source, to))
}
