use super::{Color, Grid};

/// Per-color cell counts of a grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColorHistogram {
    counts: [usize; 10],
}

impl ColorHistogram {
    pub fn of(grid: &Grid) -> ColorHistogram {
        let mut counts = [0; 10];
        for c in grid.cells() {
            counts[c.index() as usize] += 1;
        }
        ColorHistogram { counts }
    }

    pub fn count(&self, color: Color) -> usize {
        self.counts[color.index() as usize]
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Colors with a nonzero count, by index.
    pub fn present(&self) -> Vec<Color> {
        Color::ALL
            .iter()
            .copied()
            .filter(|&c| self.count(c) > 0)
            .collect()
    }

    /// Most frequent color; ties go to the lower index.
    pub fn majority(&self) -> Color {
        let mut best = Color::Black;
        for c in Color::ALL {
            if self.count(c) > self.count(best) {
                best = c;
            }
        }
        best
    }

    /// Least frequent color among those present; ties go to the lower index.
    pub fn minority(&self) -> Color {
        self.present()
            .into_iter()
            .min_by_key(|&c| self.count(c))
            .unwrap_or(Color::Black)
    }

    /// True when `color` has more cells than every other color.
    pub fn is_strict_majority(&self, color: Color) -> bool {
        let n = self.count(color);
        Color::ALL.iter().all(|&c| c == color || self.count(c) < n)
    }

    /// True when `color` is present and rarer than every other present color.
    pub fn is_strict_minority(&self, color: Color) -> bool {
        let n = self.count(color);
        n > 0
            && Color::ALL
                .iter()
                .all(|&c| c == color || self.count(c) == 0 || self.count(c) > n)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Color, usize)> + '_ {
        Color::ALL.iter().map(|&c| (c, self.count(c))).filter(|&(_, n)| n > 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_grid() {
        let h = Grid::filled(3, 3, Color::Green).unwrap().histogram();
        assert_eq!(h.iter().collect::<Vec<_>>(), vec![(Color::Green, 9)]);
        assert_eq!(h.majority(), Color::Green);
        assert_eq!(h.minority(), Color::Green);
    }

    #[test]
    fn single_odd_cell_is_minority() {
        let mut grid = Grid::filled(6, 6, Color::Orange).unwrap();
        grid.set(3, 3, Color::Maroon);
        let h = grid.histogram();
        assert_eq!(h.minority(), Color::Maroon);
        assert_eq!(h.count(Color::Maroon), 1);
        assert_eq!(h.majority(), Color::Orange);
        assert_eq!(h.count(Color::Orange), 35);
        assert_eq!(h.total(), 36);
    }

    #[test]
    fn ties_prefer_lower_index() {
        let h = Grid::from_text("red red\nblue blue").unwrap().histogram();
        assert_eq!(h.minority(), Color::Blue);
        assert_eq!(h.majority(), Color::Blue);
        assert!(!h.is_strict_majority(Color::Red));
        assert!(!h.is_strict_minority(Color::Blue));
    }
}
