//! Lines, crosses and stars drawn through anchor cells.

use super::{Ctx, Draft};
use crate::grid::{Color, Grid, Pos};
use crate::task::{Category, Difficulty, RuleParams, RuleSpec, StarShape};

/// Step directions making up each shape; each is walked both ways from the anchor.
fn directions(shape: StarShape) -> &'static [(isize, isize)] {
    match shape {
        StarShape::Row => &[(0, 1)],
        StarShape::Column => &[(1, 0)],
        StarShape::DiagDownRight => &[(1, 1)],
        StarShape::DiagDownLeft => &[(1, -1)],
        StarShape::Cross => &[(0, 1), (1, 0)],
        StarShape::X => &[(1, 1), (1, -1)],
    }
}

fn trace(shape: StarShape, anchor: Pos, rows: usize, cols: usize) -> Vec<Pos> {
    let mut out = vec![anchor];
    for &(dr, dc) in directions(shape) {
        for sign in [1isize, -1] {
            let (mut r, mut c) = (anchor.0 as isize, anchor.1 as isize);
            loop {
                r += sign * dr;
                c += sign * dc;
                if r < 0 || c < 0 || r >= rows as isize || c >= cols as isize {
                    break;
                }
                out.push((r as usize, c as usize));
            }
        }
    }
    out
}

pub(super) fn draft(difficulty: Difficulty, ctx: &mut Ctx<'_>) -> Option<Draft> {
    let shape = match difficulty {
        Difficulty::Easy => ctx.pick(&StarShape::LINES),
        Difficulty::Medium | Difficulty::Hard => ctx.pick(&StarShape::COMPOUND),
    };
    let anchors = if difficulty == Difficulty::Hard { 2 } else { 1 };
    let rule = RuleSpec::new(Category::CrossStar, difficulty, RuleParams::CrossStar { shape });
    let mut pairs = Vec::with_capacity(ctx.pairs);
    for _ in 0..ctx.pairs {
        pairs.push(pair(shape, anchors, ctx)?);
    }
    Some(Draft { rule, pairs })
}

fn pair(shape: StarShape, anchors: usize, ctx: &mut Ctx<'_>) -> Option<(Grid, Grid)> {
    let (rows, cols) = ctx.dims();
    let palette = ctx.colors(anchors + 1, &[]);
    let (background, colors) = (palette[0], &palette[1..]);

    let positions = ctx.shuffled_positions(rows, cols);
    let mut chosen: Vec<(Pos, Color)> = Vec::new();
    for &pos in &positions {
        if chosen.len() == anchors {
            break;
        }
        // Keep every anchor visible: none may sit on another's shape.
        let clashes = chosen.iter().any(|&(other, _)| {
            trace(shape, other, rows, cols).contains(&pos) || trace(shape, pos, rows, cols).contains(&other)
        });
        if !clashes {
            chosen.push((pos, colors[chosen.len()]));
        }
    }
    if chosen.len() < anchors {
        return None;
    }
    chosen.sort_by_key(|&(pos, _)| pos);

    let mut input = Grid::filled(rows, cols, background).ok()?;
    for &(pos, color) in &chosen {
        input.set(pos.0, pos.1, color);
    }
    let mut output = input.clone();
    // Paint later anchors first so the earliest anchor in row-major order wins.
    for &(pos, color) in chosen.iter().rev() {
        for (r, c) in trace(shape, pos, rows, cols) {
            output.set(r, c, color);
        }
    }
    Some((input, output))
}
