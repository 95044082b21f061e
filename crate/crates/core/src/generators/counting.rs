//! Counting minority cells and minority clusters.

use super::{Ctx, Draft};
use crate::grid::{neighbours, Connectivity, Grid, Pos};
use crate::task::{Category, CountMeasure, Difficulty, RuleParams, RuleSpec};

const PAIR_RETRIES: usize = 20;

pub(super) fn draft(difficulty: Difficulty, ctx: &mut Ctx<'_>) -> Option<Draft> {
    let measure = match difficulty {
        Difficulty::Easy => CountMeasure::CellCount,
        _ => CountMeasure::LargestCluster,
    };
    let rule = RuleSpec::new(Category::CountingCells, difficulty, RuleParams::CountingCells { measure });
    let mut pairs = Vec::with_capacity(ctx.pairs);
    for _ in 0..ctx.pairs {
        let pair = (0..PAIR_RETRIES).find_map(|_| match difficulty {
            Difficulty::Easy => scattered(ctx),
            Difficulty::Medium => clustered(false, ctx),
            Difficulty::Hard => clustered(true, ctx),
        })?;
        pairs.push(pair);
    }
    Some(Draft { rule, pairs })
}

/// `n` isolated cells of one color on a uniform background.
fn scattered(ctx: &mut Ctx<'_>) -> Option<(Grid, Grid)> {
    let (rows, cols) = ctx.dims();
    let cells = rows * cols;
    let want = ctx.range(1..=6).min(cells.saturating_sub(1) / 2);
    if want == 0 {
        return None;
    }
    let colors = ctx.colors(2, &[]);
    let (background, target) = (colors[0], colors[1]);
    let mut input = Grid::filled(rows, cols, background).ok()?;
    let mut placed = 0;
    for (r, c) in ctx.shuffled_positions(rows, cols) {
        if placed == want {
            break;
        }
        let touching = neighbours((r, c), rows, cols, Connectivity::Four).any(|(nr, nc)| input.get(nr, nc) == target);
        if !touching {
            input.set(r, c, target);
            placed += 1;
        }
    }
    let output = Grid::filled(1, placed, target).ok()?;
    Some((input, output))
}

/// Several 4-connected clusters, kept apart so they never touch even diagonally.
fn clustered(striped: bool, ctx: &mut Ctx<'_>) -> Option<(Grid, Grid)> {
    let (rows, cols) = ctx.dims();
    let colors = ctx.colors(3, &[]);
    let target = colors[0];
    let mut input = if striped {
        let by_row = ctx.chance(0.5);
        let mut g = Grid::filled(rows, cols, colors[1]).ok()?;
        for (r, c) in g.positions().collect::<Vec<_>>() {
            let line = if by_row { r } else { c };
            if line % 2 == 1 {
                g.set(r, c, colors[2]);
            }
        }
        g
    } else {
        Grid::filled(rows, cols, colors[1]).ok()?
    };

    let mut owner: Vec<Option<usize>> = vec![None; rows * cols];
    let clusters = ctx.range(2..=4);
    let mut largest = 0;
    for id in 0..clusters {
        let size = ctx.range(1..=5);
        // A cell is free for cluster `id` if no other cluster is within one step.
        let free = |owner: &[Option<usize>], pos: Pos| {
            owner[pos.0 * cols + pos.1].is_none()
                && neighbours(pos, rows, cols, Connectivity::Eight)
                    .all(|(r, c)| owner[r * cols + c].is_none_or(|o| o == id))
        };
        let Some(seed) = ctx.shuffled_positions(rows, cols).into_iter().find(|&p| free(&owner, p)) else {
            break;
        };
        let mut members = vec![seed];
        owner[seed.0 * cols + seed.1] = Some(id);
        while members.len() < size {
            let frontier: Vec<Pos> = members
                .iter()
                .flat_map(|&m| neighbours(m, rows, cols, Connectivity::Four))
                .filter(|&p| free(&owner, p))
                .collect();
            if frontier.is_empty() {
                break;
            }
            let next = ctx.pick(&frontier);
            owner[next.0 * cols + next.1] = Some(id);
            members.push(next);
        }
        for &(r, c) in &members {
            input.set(r, c, target);
        }
        largest = largest.max(members.len());
    }
    let histogram = input.histogram();
    let expected_colors = if striped { 3 } else { 2 };
    if largest == 0 || !histogram.is_strict_minority(target) || histogram.present().len() != expected_colors {
        return None;
    }
    let output = Grid::filled(1, largest, target).ok()?;
    Some((input, output))
}
