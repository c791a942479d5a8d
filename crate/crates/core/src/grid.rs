//! Dense row-major grids, cell addressing and grid ray traversal.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::math::{floor, Vec2};

/// Grid cell index. Signed so neighbor arithmetic can step off-grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub col: i32,
    pub row: i32,
}

impl Cell {
    pub const fn new(col: i32, row: i32) -> Self {
        Self { col, row }
    }

    pub fn offset(self, dc: i32, dr: i32) -> Cell {
        Cell::new(self.col + dc, self.row + dr)
    }

    pub fn neighbors4(self) -> [Cell; 4] {
        [self.offset(1, 0), self.offset(-1, 0), self.offset(0, 1), self.offset(0, -1)]
    }

    pub fn neighbors8(self) -> [Cell; 8] {
        [
            self.offset(1, 0),
            self.offset(-1, 0),
            self.offset(0, 1),
            self.offset(0, -1),
            self.offset(1, 1),
            self.offset(-1, 1),
            self.offset(1, -1),
            self.offset(-1, -1),
        ]
    }

    /// Chebyshev adjacency (excluding self).
    pub fn is_adjacent8(self, o: Cell) -> bool {
        self != o && (self.col - o.col).abs() <= 1 && (self.row - o.row).abs() <= 1
    }

    /// World coordinates of the cell center.
    pub fn center(self, resolution: f64) -> Vec2 {
        Vec2::new((self.col as f64 + 0.5) * resolution, (self.row as f64 + 0.5) * resolution)
    }

    /// Cell containing a world point.
    pub fn containing(p: Vec2, resolution: f64) -> Cell {
        Cell::new(floor(p.x / resolution) as i32, floor(p.y / resolution) as i32)
    }

    /// Point of the cell's square closest to `p`.
    pub fn closest_point(self, p: Vec2, resolution: f64) -> Vec2 {
        let x0 = self.col as f64 * resolution;
        let y0 = self.row as f64 * resolution;
        Vec2::new(p.x.clamp(x0, x0 + resolution), p.y.clamp(y0, y0 + resolution))
    }
}

/// Dense grid of `T`, row-major with row 0 first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid<T> {
    width: usize,
    height: usize,
    data: Vec<T>,
}

impl<T: Clone> Grid<T> {
    pub fn new(width: usize, height: usize, fill: T) -> Self {
        Self { width, height, data: vec![fill; width * height] }
    }
}

impl<T> Grid<T> {
    /// Panics if `data.len() != width * height`.
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), width * height, "grid data length");
        Self { width, height, data }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn in_bounds(&self, c: Cell) -> bool {
        c.col >= 0 && c.row >= 0 && (c.col as usize) < self.width && (c.row as usize) < self.height
    }

    pub fn index(&self, c: Cell) -> Option<usize> {
        self.in_bounds(c).then(|| c.row as usize * self.width + c.col as usize)
    }

    pub fn cell_at(&self, idx: usize) -> Cell {
        Cell::new((idx % self.width) as i32, (idx / self.width) as i32)
    }

    pub fn get(&self, c: Cell) -> Option<&T> {
        self.index(c).map(|i| &self.data[i])
    }

    pub fn get_mut(&mut self, c: Cell) -> Option<&mut T> {
        self.index(c).map(move |i| &mut self.data[i])
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = Cell> + '_ {
        (0..self.data.len()).map(move |i| self.cell_at(i))
    }
}

/// Grid DDA: visits every cell a ray passes through, in order, together with
/// the ray parameter (meters) at which the ray enters it. At exact corner
/// crossings the x step is taken first.
#[derive(Clone, Debug)]
pub struct RayWalk {
    cell: Cell,
    step_col: i32,
    step_row: i32,
    t_max_x: f64,
    t_max_y: f64,
    t_delta_x: f64,
    t_delta_y: f64,
    t_enter: f64,
    limit: f64,
    started: bool,
}

impl RayWalk {
    /// Walk from `origin` along unit `dir` until the entry parameter exceeds
    /// `limit` meters.
    pub fn new(origin: Vec2, dir: Vec2, resolution: f64, limit: f64) -> Self {
        let cell = Cell::containing(origin, resolution);
        let axis = |o: f64, d: f64, c: i32| -> (i32, f64, f64) {
            if d > 0.0 {
                let boundary = (c as f64 + 1.0) * resolution;
                (1, (boundary - o) / d, resolution / d)
            } else if d < 0.0 {
                let boundary = c as f64 * resolution;
                (-1, (boundary - o) / d, -resolution / d)
            } else {
                (0, f64::INFINITY, f64::INFINITY)
            }
        };
        let (step_col, t_max_x, t_delta_x) = axis(origin.x, dir.x, cell.col);
        let (step_row, t_max_y, t_delta_y) = axis(origin.y, dir.y, cell.row);
        Self {
            cell,
            step_col,
            step_row,
            t_max_x,
            t_max_y,
            t_delta_x,
            t_delta_y,
            t_enter: 0.0,
            limit,
            started: false,
        }
    }

    /// Walk over the segment `from -> to`.
    pub fn segment(from: Vec2, to: Vec2, resolution: f64) -> Self {
        let d = to - from;
        let len = d.norm();
        let dir = d.normalized().unwrap_or(Vec2::new(1.0, 0.0));
        Self::new(from, dir, resolution, len)
    }
}

impl Iterator for RayWalk {
    /// `(cell, entry parameter)`
    type Item = (Cell, f64);

    fn next(&mut self) -> Option<(Cell, f64)> {
        if !self.started {
            self.started = true;
            return Some((self.cell, 0.0));
        }
        if self.t_max_x <= self.t_max_y {
            self.t_enter = self.t_max_x;
            self.t_max_x += self.t_delta_x;
            self.cell.col += self.step_col;
        } else {
            self.t_enter = self.t_max_y;
            self.t_max_y += self.t_delta_y;
            self.cell.row += self.step_row;
        }
        if !self.t_enter.is_finite() || self.t_enter > self.limit {
            return None;
        }
        Some((self.cell, self.t_enter))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::vec::Vec;

    #[test]
    fn walk_along_x() {
        let cells: Vec<_> = RayWalk::new(Vec2::new(0.05, 0.05), Vec2::new(1.0, 0.0), 0.1, 0.3).collect();
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[3].0, Cell::new(3, 0));
        assert!((cells[1].1 - 0.05).abs() < 1e-12);
    }

    #[test]
    fn walk_is_4_connected() {
        let dir = crate::math::heading_vec(37.0);
        let cells: Vec<_> = RayWalk::new(Vec2::new(0.53, 0.21), dir, 0.1, 3.0).map(|c| c.0).collect();
        for w in cells.windows(2) {
            let d = (w[0].col - w[1].col).abs() + (w[0].row - w[1].row).abs();
            assert_eq!(d, 1);
        }
    }

    #[test]
    fn closest_point_clamps() {
        let c = Cell::new(2, 2);
        let p = c.closest_point(Vec2::new(0.0, 0.25), 0.1);
        assert_eq!(p, Vec2::new(0.2, 0.25));
    }
}
