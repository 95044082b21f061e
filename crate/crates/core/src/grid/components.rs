use std::collections::{BTreeSet, VecDeque};

use super::{Color, Grid, Pos};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Connectivity {
    /// Orthogonal neighbours only.
    #[default]
    Four,
    /// Orthogonal and diagonal neighbours.
    Eight,
}

impl Connectivity {
    fn offsets(self) -> &'static [(isize, isize)] {
        const FOUR: [(isize, isize); 4] = [(-1, 0), (0, -1), (0, 1), (1, 0)];
        const EIGHT: [(isize, isize); 8] = [
            (-1, -1),
            (-1, 0),
            (-1, 1),
            (0, -1),
            (0, 1),
            (1, -1),
            (1, 0),
            (1, 1),
        ];
        match self {
            Connectivity::Four => &FOUR,
            Connectivity::Eight => &EIGHT,
        }
    }
}

/// A maximal set of same-colored, mutually reachable cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    pub color: Color,
    pub cells: BTreeSet<Pos>,
}

impl Component {
    pub fn size(&self) -> usize {
        self.cells.len()
    }

    /// Smallest member in row-major order.
    pub fn first(&self) -> Pos {
        *self.cells.iter().next().expect("components are never empty")
    }
}

/// Neighbours of `pos` inside a `rows x cols` grid.
pub(crate) fn neighbours(
    pos: Pos,
    rows: usize,
    cols: usize,
    connectivity: Connectivity,
) -> impl Iterator<Item = Pos> {
    connectivity.offsets().iter().filter_map(move |&(dr, dc)| {
        let r = pos.0.checked_add_signed(dr)?;
        let c = pos.1.checked_add_signed(dc)?;
        (r < rows && c < cols).then_some((r, c))
    })
}

impl Grid {
    /// Partitions all cells of `color` into components, largest first.
    /// Equal sizes are ordered by their smallest member.
    pub fn connected_components(&self, color: Color, connectivity: Connectivity) -> Vec<Component> {
        let mut seen = vec![false; self.rows * self.cols];
        let mut out = Vec::new();
        for start in self.positions() {
            let idx = start.0 * self.cols + start.1;
            if seen[idx] || self.get(start.0, start.1) != color {
                continue;
            }
            seen[idx] = true;
            let mut cells = BTreeSet::new();
            let mut queue = VecDeque::from([start]);
            while let Some(pos) = queue.pop_front() {
                cells.insert(pos);
                for next in neighbours(pos, self.rows, self.cols, connectivity) {
                    let ni = next.0 * self.cols + next.1;
                    if !seen[ni] && self.get(next.0, next.1) == color {
                        seen[ni] = true;
                        queue.push_back(next);
                    }
                }
            }
            out.push(Component { color, cells });
        }
        out.sort_by(|a, b| b.size().cmp(&a.size()).then(a.first().cmp(&b.first())));
        out
    }

    /// Size of the largest component of `color`, zero if absent.
    pub fn largest_component_size(&self, color: Color, connectivity: Connectivity) -> usize {
        self.connected_components(color, connectivity)
            .first()
            .map_or(0, Component::size)
    }
}
