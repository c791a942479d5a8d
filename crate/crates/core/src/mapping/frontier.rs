//! Frontier cells are Free cells 4-adjacent to Unknown. They are grouped
//! into 8-connected components, small components are dropped, and each
//! survivor gets a waypoint, a boundary direction and an into-Unknown
//! normal.

use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::grid::{Cell, Grid};
use crate::math::{sqrt, Vec2};

use super::{Occupancy, OccupancyGrid};

/// About 0.3 m of boundary at 0.1 m cells.
pub const DEFAULT_MIN_FRONTIER_CELLS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frontier {
    pub id: u32,
    /// Sorted row-major.
    pub cells: Vec<Cell>,
    /// World coordinates of the center of `waypoint_cell`.
    pub waypoint: Vec2,
    pub waypoint_cell: Cell,
    /// Unit vector pointing from the boundary into Unknown space.
    pub normal: Vec2,
    /// Unit vector along the boundary, orthogonal to `normal`.
    pub boundary_dir: Vec2,
}

impl Frontier {
    pub fn contains(&self, c: Cell) -> bool {
        self.cells.binary_search_by(|x| (x.row, x.col).cmp(&(c.row, c.col))).is_ok()
    }
}

fn is_frontier(grid: &OccupancyGrid, c: Cell) -> bool {
    grid.get(c) == Some(Occupancy::Free) && c.neighbors4().iter().any(|&n| grid.get(n) == Some(Occupancy::Unknown))
}

/// Every frontier cell of the grid in row-major order.
pub fn frontier_cells(grid: &OccupancyGrid) -> Vec<Cell> {
    grid.cells().cells().filter(|&c| is_frontier(grid, c)).collect()
}

/// 8-connected components of frontier cells, in order of their first cell
/// in a row-major scan. Cells within each component are sorted row-major.
pub(crate) fn frontier_components(grid: &OccupancyGrid) -> Vec<Vec<Cell>> {
    let cells = grid.cells();
    let mut mask = vec![false; cells.len()];
    for (i, m) in mask.iter_mut().enumerate() {
        *m = is_frontier(grid, cells.cell_at(i));
    }
    let mut seen = vec![false; cells.len()];
    let mut comps = Vec::new();
    for i in 0..cells.len() {
        if !mask[i] || seen[i] {
            continue;
        }
        seen[i] = true;
        let mut stack = vec![i];
        let mut comp = Vec::new();
        while let Some(j) = stack.pop() {
            let c = cells.cell_at(j);
            comp.push(c);
            for n in c.neighbors8() {
                if let Some(k) = cells.index(n) {
                    if mask[k] && !seen[k] {
                        seen[k] = true;
                        stack.push(k);
                    }
                }
            }
        }
        comp.sort_unstable_by_key(|c| (c.row, c.col));
        comps.push(comp);
    }
    comps
}

fn describe(grid: &OccupancyGrid, id: u32, cells: Vec<Cell>) -> Frontier {
    let n = cells.len() as f64;
    let (mut sx, mut sy) = (0.0, 0.0);
    for c in &cells {
        sx += c.col as f64;
        sy += c.row as f64;
    }
    let (mx, my) = (sx / n, sy / n);
    // medoid-like waypoint: the member closest to the centroid
    let waypoint_cell = *cells
        .iter()
        .min_by(|a, b| {
            let d2 = |c: &Cell| (c.col as f64 - mx) * (c.col as f64 - mx) + (c.row as f64 - my) * (c.row as f64 - my);
            d2(a).total_cmp(&d2(b))
        })
        .unwrap();

    let (mut cxx, mut cyy, mut cxy) = (0.0, 0.0, 0.0);
    let mut vote = Vec2::default();
    for c in &cells {
        let (dx, dy) = (c.col as f64 - mx, c.row as f64 - my);
        cxx += dx * dx;
        cyy += dy * dy;
        cxy += dx * dy;
        for (dc, dr) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            if grid.get(c.offset(dc, dr)) == Some(Occupancy::Unknown) {
                vote = vote + Vec2::new(dc as f64, dr as f64);
            }
        }
    }
    let spread = sqrt((cxx - cyy) * (cxx - cyy) + 4.0 * cxy * cxy);
    let (normal, boundary_dir) = if spread > 1e-9 {
        let theta = 0.5 * libm::atan2(2.0 * cxy, cxx - cyy);
        let dir = Vec2::new(libm::cos(theta), libm::sin(theta));
        let n = dir.perp();
        let n = if vote.dot(n) < 0.0 { -n } else { n };
        (n, dir)
    } else {
        // isotropic spread: orient by the vote alone
        let n = vote.normalized().unwrap_or(Vec2::new(1.0, 0.0));
        (n, -n.perp())
    };
    Frontier {
        id,
        waypoint: grid.cell_center(waypoint_cell),
        waypoint_cell,
        normal,
        boundary_dir,
        cells,
    }
}

/// Stateless extraction; ids follow discovery order starting at 0.
pub fn extract_frontiers(grid: &OccupancyGrid, min_frontier_cells: usize) -> Vec<Frontier> {
    frontier_components(grid)
        .into_iter()
        .filter(|c| c.len() >= min_frontier_cells.max(1))
        .enumerate()
        .map(|(i, cells)| describe(grid, i as u32, cells))
        .collect()
}

/// Keeps frontier ids stable across steps by maximum-overlap matching with
/// the previous step's frontiers. A new cell overlaps a previous frontier
/// when it lies within `match_radius` cells (Chebyshev) of one of its cells.
#[derive(Clone, Debug)]
pub struct FrontierTracker {
    pub min_frontier_cells: usize,
    pub match_radius: i32,
    previous: Vec<Frontier>,
    next_id: u32,
    stamp: Option<Grid<u32>>,
}

impl Default for FrontierTracker {
    fn default() -> Self {
        Self::new(DEFAULT_MIN_FRONTIER_CELLS, 2)
    }
}

impl FrontierTracker {
    pub fn new(min_frontier_cells: usize, match_radius: i32) -> Self {
        Self { min_frontier_cells, match_radius, previous: Vec::new(), next_id: 0, stamp: None }
    }

    pub fn current(&self) -> &[Frontier] {
        &self.previous
    }

    /// Extract and relabel; the result is sorted by id.
    pub fn update(&mut self, grid: &OccupancyGrid) -> Vec<Frontier> {
        let comps: Vec<Vec<Cell>> = frontier_components(grid)
            .into_iter()
            .filter(|c| c.len() >= self.min_frontier_cells.max(1))
            .collect();

        let (w, h) = (grid.cells().width(), grid.cells().height());
        let stamp = self.stamp.get_or_insert_with(|| Grid::new(w, h, 0));
        if stamp.width() != w || stamp.height() != h {
            *stamp = Grid::new(w, h, 0);
        }
        // stamp previous cells with index + 1
        for (pi, f) in self.previous.iter().enumerate() {
            for &c in &f.cells {
                if let Some(s) = stamp.get_mut(c) {
                    *s = pi as u32 + 1;
                }
            }
        }
        let r = self.match_radius;
        let mut overlaps: Vec<(usize, u32, usize)> = Vec::new(); // (count, prev id, new index)
        let mut hits: Vec<u32> = Vec::new();
        let mut counts: Vec<usize> = vec![0; self.previous.len()];
        for (ni, comp) in comps.iter().enumerate() {
            counts.iter_mut().for_each(|x| *x = 0);
            for &c in comp {
                hits.clear();
                for dr in -r..=r {
                    for dc in -r..=r {
                        if let Some(&s) = stamp.get(c.offset(dc, dr)) {
                            if s > 0 && !hits.contains(&s) {
                                hits.push(s);
                            }
                        }
                    }
                }
                for &s in &hits {
                    counts[s as usize - 1] += 1;
                }
            }
            for (pi, &n) in counts.iter().enumerate() {
                if n > 0 {
                    overlaps.push((n, self.previous[pi].id, ni));
                }
            }
        }
        for f in &self.previous {
            for &c in &f.cells {
                if let Some(s) = stamp.get_mut(c) {
                    *s = 0;
                }
            }
        }
        overlaps.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let mut assigned: Vec<Option<u32>> = vec![None; comps.len()];
        let mut taken: Vec<u32> = Vec::new();
        for (_, pid, ni) in overlaps {
            if assigned[ni].is_none() && !taken.contains(&pid) {
                assigned[ni] = Some(pid);
                taken.push(pid);
            }
        }
        let mut out: Vec<Frontier> = comps
            .into_iter()
            .zip(assigned)
            .map(|(cells, id)| {
                let id = id.unwrap_or_else(|| {
                    let id = self.next_id;
                    self.next_id += 1;
                    id
                });
                describe(grid, id, cells)
            })
            .collect();
        out.sort_unstable_by_key(|f| f.id);
        self.previous = out.clone();
        out
    }
}
