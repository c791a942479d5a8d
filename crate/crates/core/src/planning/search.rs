//! 8-connected grid search without corner cutting.

use alloc::collections::BinaryHeap;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{NavError, Result};
use crate::grid::{Cell, Grid};
use crate::math::sqrt;

use super::{CellState, OccupancySource, PathResult, UnknownAs};

/// Cardinal moves first, then diagonals.
pub(crate) const MOVES: [(i32, i32); 8] = [(1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, 1), (1, -1), (-1, -1)];

#[inline]
pub(crate) fn step_cost(dc: i32, dr: i32, resolution: f64) -> f64 {
    if dc != 0 && dr != 0 {
        resolution * core::f64::consts::SQRT_2
    } else {
        resolution
    }
}

/// Traversability after interpreting Unknown and dilating obstacles.
pub fn passability(source: &impl OccupancySource, unknown_is: UnknownAs, inflate_radius: f64) -> Grid<bool> {
    let (w, h) = (source.width(), source.height());
    let res = source.resolution();
    let blocked_raw = |c: Cell| match source.state(c) {
        CellState::Free => false,
        CellState::Obstacle => true,
        CellState::Unknown => unknown_is == UnknownAs::Obstacle,
    };
    let mut pass = Grid::new(w, h, true);
    let reach = (inflate_radius / res + 1e-9) as i32;
    let mut offsets = Vec::new();
    for dr in -reach..=reach {
        for dc in -reach..=reach {
            let d = sqrt((dc * dc + dr * dr) as f64) * res;
            if d <= inflate_radius + 1e-9 {
                offsets.push((dc, dr));
            }
        }
    }
    for idx in 0..w * h {
        let c = pass.cell_at(idx);
        if blocked_raw(c) {
            for &(dc, dr) in &offsets {
                if let Some(p) = pass.get_mut(c.offset(dc, dr)) {
                    *p = false;
                }
            }
        }
    }
    pass
}

#[derive(Clone, Copy, PartialEq)]
struct Entry {
    key: f64,
    idx: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on key, then on index for determinism
        o.key.total_cmp(&self.key).then_with(|| o.idx.cmp(&self.idx))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[inline]
pub(crate) fn move_allowed(pass: &Grid<bool>, from: Cell, dc: i32, dr: i32) -> bool {
    let ok = |c: Cell| pass.get(c).copied().unwrap_or(false);
    ok(from.offset(dc, dr)) && (dc == 0 || dr == 0 || (ok(from.offset(dc, 0)) && ok(from.offset(0, dr))))
}

/// Geodesic distances from a set of seed cells. Seeds need not be passable:
/// expansion leaves them toward passable neighbors.
#[derive(Clone, Debug)]
pub struct DistanceField {
    dist: Grid<f64>,
    resolution: f64,
}

impl DistanceField {
    pub fn compute(pass: &Grid<bool>, seeds: &[Cell], resolution: f64) -> Self {
        Self::compute_with(pass, None, seeds, resolution, &[])
    }

    /// Like [`DistanceField::compute`], but each step costs its geometric
    /// length times the larger cell weight of its two endpoints, and the
    /// search stops once every cell in `targets` is settled (empty = run to
    /// completion). Unsettled cells read as infinite.
    pub fn compute_with(
        pass: &Grid<bool>,
        weights: Option<&Grid<f64>>,
        seeds: &[Cell],
        resolution: f64,
        targets: &[Cell],
    ) -> Self {
        let mut dist = Grid::new(pass.width(), pass.height(), f64::INFINITY);
        let mut settled = vec![false; pass.len()];
        let mut remaining: Vec<usize> = targets.iter().filter_map(|&t| pass.index(t)).collect();
        remaining.sort_unstable();
        remaining.dedup();
        let mut heap = BinaryHeap::new();
        for &s in seeds {
            if let Some(i) = dist.index(s) {
                dist.as_mut_slice()[i] = 0.0;
                heap.push(Entry { key: 0.0, idx: i });
            }
        }
        let seed_free = |c: Cell| pass.get(c).copied().unwrap_or(false);
        let weight = |c: Cell| weights.and_then(|w| w.get(c).copied()).unwrap_or(1.0);
        while let Some(Entry { key, idx }) = heap.pop() {
            if settled[idx] {
                continue;
            }
            settled[idx] = true;
            if !remaining.is_empty() {
                if let Ok(p) = remaining.binary_search(&idx) {
                    remaining.remove(p);
                    if remaining.is_empty() {
                        break;
                    }
                }
            }
            let c = dist.cell_at(idx);
            for (dc, dr) in MOVES {
                // seeds inside obstacles may step out without the corner rule
                let allowed = if seed_free(c) { move_allowed(pass, c, dc, dr) } else { seed_free(c.offset(dc, dr)) };
                if !allowed {
                    continue;
                }
                let n = c.offset(dc, dr);
                let ni = dist.index(n).unwrap();
                let w = if weights.is_some() { weight(c).max(weight(n)) } else { 1.0 };
                let nd = key + step_cost(dc, dr, resolution) * w;
                if nd < dist.as_slice()[ni] {
                    dist.as_mut_slice()[ni] = nd;
                    heap.push(Entry { key: nd, idx: ni });
                }
            }
        }
        if !targets.is_empty() {
            // tentative values beyond the settled frontier are not final
            for (d, s) in dist.as_mut_slice().iter_mut().zip(&settled) {
                if !s {
                    *d = f64::INFINITY;
                }
            }
        }
        Self { dist, resolution }
    }

    pub fn get(&self, c: Cell) -> f64 {
        self.dist.get(c).copied().unwrap_or(f64::INFINITY)
    }

    pub fn grid(&self) -> &Grid<f64> {
        &self.dist
    }

    /// Shortest path from `from` down to a seed, following strictly
    /// decreasing distances (first matching move in `MOVES` order). The
    /// field must have been computed on `pass`.
    pub fn descend(&self, pass: &Grid<bool>, from: Cell) -> Option<PathResult> {
        let mut d = self.get(from);
        if !d.is_finite() {
            return None;
        }
        let mut cells = vec![from];
        let mut c = from;
        let mut length = 0.0;
        while d > 0.0 {
            let mut next = None;
            for (dc, dr) in MOVES {
                let n = c.offset(dc, dr);
                let cost = step_cost(dc, dr, self.resolution);
                let nd = self.get(n);
                if !nd.is_finite() || (nd + cost - d).abs() > 1e-9 {
                    continue;
                }
                // reversed move n -> c must be legal under the same rules the field used
                let legal = if pass.get(n).copied().unwrap_or(false) {
                    move_allowed(pass, n, -dc, -dr)
                } else {
                    pass.get(c).copied().unwrap_or(false)
                };
                if legal {
                    next = Some((n, nd, cost));
                    break;
                }
            }
            let (n, nd, cost) = next?;
            length += cost;
            cells.push(n);
            c = n;
            d = nd;
        }
        Some(PathResult { length, cells })
    }
}

/// A* with the octile heuristic. `from` is treated as passable.
pub(crate) fn astar(pass: &Grid<bool>, from: Cell, to: Cell, resolution: f64) -> Result<PathResult> {
    if !pass.in_bounds(from) || !pass.get(to).copied().unwrap_or(false) {
        return Err(NavError::Unreachable);
    }
    let h = |c: Cell| {
        let dx = (c.col - to.col).abs() as f64;
        let dy = (c.row - to.row).abs() as f64;
        let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
        ((hi - lo) + lo * core::f64::consts::SQRT_2) * resolution
    };
    let n = pass.len();
    let mut g = vec![f64::INFINITY; n];
    let mut parent = vec![usize::MAX; n];
    let mut closed = vec![false; n];
    let start = pass.index(from).unwrap();
    let goal = pass.index(to).unwrap();
    g[start] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry { key: h(from), idx: start });
    while let Some(Entry { idx, .. }) = heap.pop() {
        if closed[idx] {
            continue;
        }
        closed[idx] = true;
        if idx == goal {
            break;
        }
        let c = pass.cell_at(idx);
        for (dc, dr) in MOVES {
            if !move_allowed(pass, c, dc, dr) {
                continue;
            }
            let nc = c.offset(dc, dr);
            let ni = pass.index(nc).unwrap();
            let ng = g[idx] + step_cost(dc, dr, resolution);
            if ng < g[ni] {
                g[ni] = ng;
                parent[ni] = idx;
                heap.push(Entry { key: ng + h(nc), idx: ni });
            }
        }
    }
    if !g[goal].is_finite() {
        return Err(NavError::Unreachable);
    }
    let mut cells = vec![to];
    let mut i = goal;
    while i != start {
        i = parent[i];
        cells.push(pass.cell_at(i));
    }
    cells.reverse();
    Ok(PathResult { length: g[goal], cells })
}
