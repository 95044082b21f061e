//! Duplicating a pattern, optionally transforming the copies.

use super::{Ctx, Draft};
use crate::grid::{Color, Grid};
use crate::task::{Axis, Category, CopyTransform, Difficulty, RuleParams, RuleSpec, TileTransform};

pub(super) fn draft(difficulty: Difficulty, ctx: &mut Ctx<'_>) -> Option<Draft> {
    if difficulty == Difficulty::Hard {
        return tiled(ctx);
    }
    let axis = ctx.pick(&[Axis::Horizontal, Axis::Vertical]);
    let copy = match difficulty {
        Difficulty::Easy => CopyTransform::Identity,
        _ => ctx.pick(&[CopyTransform::Rot180, CopyTransform::ColorFlip]),
    };
    let rule = RuleSpec::new(Category::DoubleGrid, difficulty, RuleParams::Duplicate { axis, copy });
    let mut pairs = Vec::with_capacity(ctx.pairs);
    for _ in 0..ctx.pairs {
        let input = pattern(ctx)?;
        let output = duplicated(&input, axis, copy)?;
        pairs.push((input, output));
    }
    Some(Draft { rule, pairs })
}

/// Background plus either a few dots or one full stripe, in exactly two colors.
fn pattern(ctx: &mut Ctx<'_>) -> Option<Grid> {
    let (rows, cols) = ctx.dims();
    let colors = ctx.colors(2, &[]);
    let mut grid = Grid::filled(rows, cols, colors[0]).ok()?;
    if ctx.chance(0.5) {
        let dots = ctx.range(2..=5).min(rows * cols - 1);
        for (r, c) in ctx.shuffled_positions(rows, cols).into_iter().take(dots) {
            grid.set(r, c, colors[1]);
        }
    } else if ctx.chance(0.5) {
        let r = ctx.range(0..=rows - 1);
        (0..cols).for_each(|c| grid.set(r, c, colors[1]));
    } else {
        let c = ctx.range(0..=cols - 1);
        (0..rows).for_each(|r| grid.set(r, c, colors[1]));
    }
    Some(grid)
}

fn duplicated(input: &Grid, axis: Axis, copy: CopyTransform) -> Option<Grid> {
    let (rows, cols) = input.shape();
    let colors = input.colors();
    let second = |r: usize, c: usize| -> Color {
        match copy {
            CopyTransform::Identity => input.get(r, c),
            CopyTransform::Rot180 => input.get(rows - 1 - r, cols - 1 - c),
            CopyTransform::ColorFlip => {
                let x = input.get(r, c);
                if x == colors[0] {
                    colors[1]
                } else {
                    colors[0]
                }
            }
        }
    };
    let mut out = match axis {
        Axis::Horizontal => Grid::filled(rows, 2 * cols, Color::Black),
        Axis::Vertical => Grid::filled(2 * rows, cols, Color::Black),
    }
    .ok()?;
    for r in 0..rows {
        for c in 0..cols {
            out.set(r, c, input.get(r, c));
            match axis {
                Axis::Horizontal => out.set(r, cols + c, second(r, c)),
                Axis::Vertical => out.set(rows + r, c, second(r, c)),
            }
        }
    }
    Some(out)
}

/// A random 3x3 seed tiled `down x across` times, odd checkerboard copies transformed.
fn tiled(ctx: &mut Ctx<'_>) -> Option<Draft> {
    let across = ctx.range(2..=3);
    let down = ctx.range(2..=3);
    let transform = if ctx.chance(0.5) {
        TileTransform::Rot90
    } else {
        TileTransform::BackgroundSwap { with: ctx.color(&[]) }
    };
    let rule = RuleSpec::new(
        Category::DoubleGrid,
        Difficulty::Hard,
        RuleParams::Tile {
            across: across as u8,
            down: down as u8,
            transform,
        },
    );
    let reserved: Vec<Color> = match transform {
        TileTransform::BackgroundSwap { with } => vec![with],
        _ => vec![],
    };
    let mut pairs = Vec::with_capacity(ctx.pairs);
    for _ in 0..ctx.pairs {
        let others = ctx.range(1..=2);
        let colors = ctx.colors(others + 1, &reserved);
        let background_cells = ctx.range(5..=6);
        let mut tile = Grid::filled(3, 3, colors[0]).ok()?;
        for (r, c) in ctx.shuffled_positions(3, 3).into_iter().skip(background_cells) {
            let color = ctx.pick(&colors[1..]);
            tile.set(r, c, color);
        }
        let changed = |r: usize, c: usize| -> Color {
            match transform {
                TileTransform::Rot90 => tile.get(2 - c, r),
                TileTransform::BackgroundSwap { with } if tile.get(r, c) == colors[0] => with,
                _ => tile.get(r, c),
            }
        };
        let mut output = Grid::filled(3 * down, 3 * across, Color::Black).ok()?;
        for i in 0..down {
            for j in 0..across {
                for r in 0..3 {
                    for c in 0..3 {
                        let color = if (i + j) % 2 == 1 { changed(r, c) } else { tile.get(r, c) };
                        output.set(3 * i + r, 3 * j + c, color);
                    }
                }
            }
        }
        pairs.push((tile, output));
    }
    Some(Draft { rule, pairs })
}
