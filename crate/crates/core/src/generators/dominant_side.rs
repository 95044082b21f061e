//! Two-sided grids whose designated side sets the output color.

use super::apply::side_region;
use super::{Ctx, Draft};
use crate::grid::{Color, Grid};
use crate::task::{Category, Difficulty, FillSource, RuleParams, RuleSpec};

const PAIR_RETRIES: usize = 20;

pub(super) fn draft(difficulty: Difficulty, ctx: &mut Ctx<'_>) -> Option<Draft> {
    let source = ctx.pick(&FillSource::SIDES);
    let rule = RuleSpec::new(Category::DominantSide, difficulty, RuleParams::DominantSide { source });
    let mut pairs = Vec::with_capacity(ctx.pairs);
    for _ in 0..ctx.pairs {
        let input = (0..PAIR_RETRIES).find_map(|_| sided(source, difficulty, ctx))?;
        let output = rule.apply(&input).ok()?;
        pairs.push((input, output));
    }
    Some(Draft { rule, pairs })
}

/// Splits at a random boundary such that each strict half stays dominated by
/// its own base color, then sprinkles noise.
fn sided(source: FillSource, difficulty: Difficulty, ctx: &mut Ctx<'_>) -> Option<Grid> {
    let (rows, cols) = ctx.dims();
    let vertical = matches!(source, FillSource::Left | FillSource::Right);
    let len = if vertical { cols } else { rows };
    let half = len / 2;
    if half == 0 {
        return None;
    }
    // The first side covers lines 0..boundary.
    let lo = half / 2 + 1;
    let hi = len - half + half.div_ceil(2) - 1;
    if lo > hi {
        return None;
    }
    let boundary = ctx.range(lo..=hi);

    let noise_colors = match difficulty {
        Difficulty::Easy => 0,
        Difficulty::Medium => 1,
        Difficulty::Hard => ctx.range(2..=3),
    };
    let palette = ctx.colors(2 + noise_colors, &[]);
    let (first, second, noise) = (palette[0], palette[1], &palette[2..]);
    let mut grid = Grid::filled(rows, cols, first).ok()?;
    for (r, c) in grid.positions().collect::<Vec<_>>() {
        let line = if vertical { c } else { r };
        if line >= boundary {
            grid.set(r, c, second);
        }
    }

    if !noise.is_empty() {
        let density = match difficulty {
            Difficulty::Medium => ctx.uniform(0.05, 0.20),
            _ => ctx.uniform(0.05, 0.25),
        };
        let cells = ((rows * cols) as f64 * density).round() as usize;
        for (r, c) in ctx.shuffled_positions(rows, cols).into_iter().take(cells) {
            let color = ctx.pick(noise);
            grid.set(r, c, color);
        }
    }

    let (first_side, second_side) = match source {
        FillSource::Left | FillSource::Right => (FillSource::Left, FillSource::Right),
        _ => (FillSource::Top, FillSource::Bottom),
    };
    let dominated = |side: FillSource, base: Color| {
        side_region(side, &grid).is_some_and(|region| region.histogram().is_strict_majority(base))
    };
    if !dominated(first_side, first) || !dominated(second_side, second) {
        return None;
    }
    Some(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::GeneratorConfig;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn opposite(side: FillSource) -> FillSource {
        match side {
            FillSource::Left => FillSource::Right,
            FillSource::Right => FillSource::Left,
            FillSource::Top => FillSource::Bottom,
            _ => FillSource::Top,
        }
    }

    #[test]
    fn both_halves_keep_their_base_color() {
        let cfg = GeneratorConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ctx = Ctx { rng: &mut rng, cfg: &cfg, pairs: 5 };
        for difficulty in Difficulty::ALL {
            for side in FillSource::SIDES {
                for _ in 0..50 {
                    let Some(grid) = sided(side, difficulty, &mut ctx) else { continue };
                    let near = side_region(side, &grid).unwrap().histogram().majority();
                    let far = side_region(opposite(side), &grid).unwrap().histogram().majority();
                    assert_ne!(near, far);
                    let colors = grid.histogram().present().len();
                    match difficulty {
                        Difficulty::Easy => assert_eq!(colors, 2),
                        Difficulty::Medium => assert!(colors <= 3),
                        Difficulty::Hard => assert!(colors <= 5),
                    }
                }
            }
        }
    }

    #[test]
    fn designated_side_is_sometimes_the_smaller_one() {
        let cfg = GeneratorConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut ctx = Ctx { rng: &mut rng, cfg: &cfg, pairs: 5 };
        let mut minority_side = 0;
        for _ in 0..200 {
            let Some(grid) = sided(FillSource::Left, Difficulty::Easy, &mut ctx) else { continue };
            let left = side_region(FillSource::Left, &grid).unwrap().histogram().majority();
            if grid.histogram().majority() != left {
                minority_side += 1;
            }
        }
        assert!(minority_side > 0);
    }
}
