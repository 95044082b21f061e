use serde::{Deserialize, Serialize};

use super::{Color, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Transform {
    /// Mirror left-right.
    FlipH,
    /// Mirror top-bottom.
    FlipV,
    /// Quarter turn clockwise.
    Rot90,
    Rot180,
    /// Exchange two colors cell-wise.
    ColorSwap { a: Color, b: Color },
}

impl Grid {
    pub fn transform(&self, op: Transform) -> Grid {
        let (rows, cols) = self.shape();
        match op {
            Transform::FlipH => self.remap(rows, cols, |r, c| (r, cols - 1 - c)),
            Transform::FlipV => self.remap(rows, cols, |r, c| (rows - 1 - r, c)),
            Transform::Rot180 => self.remap(rows, cols, |r, c| (rows - 1 - r, cols - 1 - c)),
            // Output cell (r, c) of the rotated grid comes from source (rows-1-c, r).
            Transform::Rot90 => self.remap(cols, rows, |r, c| (rows - 1 - c, r)),
            Transform::ColorSwap { a, b } => {
                let cells = self
                    .cells()
                    .iter()
                    .map(|&x| match x {
                        x if x == a => b,
                        x if x == b => a,
                        x => x,
                    })
                    .collect();
                Grid::new(rows, cols, cells).expect("same shape")
            }
        }
    }

    pub fn recolor(&self, from: Color, to: Color) -> Grid {
        let cells = self
            .cells()
            .iter()
            .map(|&x| if x == from { to } else { x })
            .collect();
        Grid::new(self.rows(), self.cols(), cells).expect("same shape")
    }

    fn remap(&self, rows: usize, cols: usize, source: impl Fn(usize, usize) -> (usize, usize)) -> Grid {
        let mut cells = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                let (sr, sc) = source(r, c);
                cells.push(self.get(sr, sc));
            }
        }
        Grid::new(rows, cols, cells).expect("transform keeps dimensions in range")
    }
}

#[cfg(test)]
mod tests {
    use super::super::strategies;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn flip_h_reverses_columns() {
        let grid = Grid::from_text("red blue").unwrap();
        assert_eq!(grid.transform(Transform::FlipH).to_text(), "blue red");
    }

    #[test]
    fn rot90_is_clockwise() {
        let grid = Grid::from_text("red blue green\nblack black black").unwrap();
        let rotated = grid.transform(Transform::Rot90);
        assert_eq!(rotated.shape(), (3, 2));
        assert_eq!(rotated.to_text(), "black red\nblack blue\nblack green");
    }

    proptest! {
        #[test]
        fn involutions_and_shape_laws(grid in strategies::grid(), a in strategies::color(), b in strategies::color()) {
            prop_assert_eq!(grid.transform(Transform::FlipH).transform(Transform::FlipH), grid.clone());
            prop_assert_eq!(grid.transform(Transform::FlipV).transform(Transform::FlipV), grid.clone());
            prop_assert_eq!(grid.transform(Transform::Rot180).transform(Transform::Rot180), grid.clone());
            let swap = Transform::ColorSwap { a, b };
            prop_assert_eq!(grid.transform(swap).transform(swap), grid.clone());

            let r90 = grid.transform(Transform::Rot90);
            prop_assert_eq!(r90.shape(), (grid.cols(), grid.rows()));
            let r360 = r90.transform(Transform::Rot90).transform(Transform::Rot90).transform(Transform::Rot90);
            prop_assert_eq!(r360, grid.clone());
            prop_assert_eq!(
                grid.transform(Transform::Rot90).transform(Transform::Rot90),
                grid.transform(Transform::Rot180)
            );

            for op in [Transform::FlipH, Transform::FlipV, Transform::Rot90, Transform::Rot180, swap] {
                prop_assert_eq!(grid.transform(op).histogram().total(), grid.rows() * grid.cols());
            }
        }
    }
}
