//! One color turning into another while the rest stay put.

use super::{Ctx, Draft};
use crate::grid::{Color, Grid};
use crate::task::{Category, Difficulty, RecolorTarget, RuleParams, RuleSpec};

pub(super) fn draft(difficulty: Difficulty, ctx: &mut Ctx<'_>) -> Option<Draft> {
    let fixed = ctx.colors(3, &[]);
    let (source, to) = (fixed[0], fixed[1]);
    let target = match difficulty {
        Difficulty::Hard => RecolorTarget::Background,
        _ => RecolorTarget::Fixed(to),
    };
    let rule = RuleSpec::new(Category::DropOneColor, difficulty, RuleParams::Recolor { source, target });
    let mut pairs = Vec::with_capacity(ctx.pairs);
    for _ in 0..ctx.pairs {
        let input = match difficulty {
            Difficulty::Easy => three_colors(source, to, fixed[2], ctx)?,
            Difficulty::Medium => {
                let third = ctx.color(&[source, to]);
                three_colors(source, to, third, ctx)?
            }
            Difficulty::Hard => on_background(source, ctx)?,
        };
        let output = rule.apply(&input).ok()?;
        pairs.push((input, output));
    }
    Some(Draft { rule, pairs })
}

/// Fills `grid` with `base`, then paints exact cell counts of the given colors.
fn paint(rows: usize, cols: usize, base: Color, counts: &[(Color, usize)], ctx: &mut Ctx<'_>) -> Option<Grid> {
    let mut grid = Grid::filled(rows, cols, base).ok()?;
    let mut cells = ctx.shuffled_positions(rows, cols).into_iter();
    for &(color, n) in counts {
        for (r, c) in cells.by_ref().take(n) {
            grid.set(r, c, color);
        }
    }
    Some(grid)
}

fn share(cells: usize, lo: f64, hi: f64, ctx: &mut Ctx<'_>) -> usize {
    let lo = (cells as f64 * lo).ceil() as usize;
    let hi = ((cells as f64 * hi).floor() as usize).max(lo);
    ctx.range(lo.max(1)..=hi.max(1))
}

/// Source and a minor color each take 10-30% of the cells. Either the target
/// or the bystander is the background, so "recolor to background" is a
/// different reading from "recolor to the target".
fn three_colors(source: Color, to: Color, third: Color, ctx: &mut Ctx<'_>) -> Option<Grid> {
    let (rows, cols) = ctx.dims();
    let cells = rows * cols;
    let (background, minor) = if ctx.chance(0.5) { (to, third) } else { (third, to) };
    let s = share(cells, 0.10, 0.30, ctx);
    let m = share(cells, 0.10, 0.30, ctx);
    if s + m >= cells {
        return None;
    }
    let grid = paint(rows, cols, background, &[(source, s), (minor, m)], ctx)?;
    let histogram = grid.histogram();
    if histogram.present().len() != 3 || !histogram.is_strict_majority(background) {
        return None;
    }
    Some(grid)
}

/// A varying background covering at least 70% of the grid, plus the source
/// and optionally one bystander color.
fn on_background(source: Color, ctx: &mut Ctx<'_>) -> Option<Grid> {
    let (rows, cols) = ctx.dims();
    let cells = rows * cols;
    let budget = cells * 3 / 10;
    if budget == 0 {
        return None;
    }
    let palette = ctx.colors(2, &[source]);
    let (background, bystander) = (palette[0], palette[1]);
    let s = ctx.range(1..=budget);
    let b = if s < budget && ctx.chance(0.5) { ctx.range(1..=budget - s) } else { 0 };
    paint(rows, cols, background, &[(source, s), (bystander, b)], ctx)
}
