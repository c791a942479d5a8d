//! Grid planning on the true map and on the belief map: shortest paths,
//! goal distances, correct-frontier labeling, the greedy exploration oracle
//! and the local controller.

mod controller;
mod goal;
mod oracle;
mod search;

use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::Cell;
use crate::mapping::{Occupancy, OccupancyGrid};
use crate::world::{Scene, Terrain};

pub use controller::{local_controller_step, ControllerConfig};
pub use goal::{geodesic_goal_distance, goal_seed_cells, label_correct_frontier, GoalField};
pub use oracle::{greedy_oracle_step, nearest_frontier};

pub(crate) use goal::belief_distances as belief_distance_field;
pub(crate) use oracle::greedy_with_field;
pub use search::{passability, DistanceField};

/// Alias used by the planners; the same three states as the belief map.
pub type CellState = Occupancy;

/// Anything that can be planned on.
pub trait OccupancySource {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn resolution(&self) -> f64;
    /// Off-grid cells report `Obstacle`.
    fn state(&self, c: Cell) -> CellState;
}

impl OccupancySource for Scene {
    fn width(&self) -> usize {
        Scene::width(self)
    }
    fn height(&self) -> usize {
        Scene::height(self)
    }
    fn resolution(&self) -> f64 {
        self.resolution
    }
    fn state(&self, c: Cell) -> CellState {
        match self.terrain().get(c) {
            Some(Terrain::Floor) => Occupancy::Free,
            _ => Occupancy::Obstacle,
        }
    }
}

impl OccupancySource for OccupancyGrid {
    fn width(&self) -> usize {
        self.cells().width()
    }
    fn height(&self) -> usize {
        self.cells().height()
    }
    fn resolution(&self) -> f64 {
        self.resolution
    }
    fn state(&self, c: Cell) -> CellState {
        self.cells().get(c).copied().unwrap_or(Occupancy::Obstacle)
    }
}

/// How planning interprets Unknown belief cells.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnknownAs {
    Free,
    Obstacle,
}

/// An 8-connected path; `length` sums `resolution` per cardinal step and
/// `resolution * sqrt(2)` per diagonal step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub length: f64,
    pub cells: Vec<Cell>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Geodesic goal distance at or below which the oracle stops exploring
    /// greedily and follows the goal-leading frontier.
    pub goal_switch_distance: f64,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self { goal_switch_distance: 3.5 }
    }
}

/// Default agent body radius used for inflation.
pub const AGENT_RADIUS: f64 = 0.18;

/// Optimal 8-connected path without corner cutting, after interpreting
/// Unknown per `unknown_is` and dilating obstacles by `inflate_radius`.
/// The start cell is always treated as passable.
pub fn grid_shortest_path(
    source: &impl OccupancySource,
    from: Cell,
    to: Cell,
    unknown_is: UnknownAs,
    inflate_radius: f64,
) -> Result<PathResult> {
    let pass = passability(source, unknown_is, inflate_radius);
    search::astar(&pass, from, to, source.resolution())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::testutil::scene_from;
    use crate::{Grid, NavError};
    use alloc::vec;
    use proptest::prelude::*;
    use std::collections::BinaryHeap;

    fn open(w: usize, h: usize) -> Scene {
        scene_from(Grid::new(w, h, Terrain::Floor), vec![])
    }

    #[test]
    fn cardinal_and_diagonal_steps() {
        let s = open(10, 10);
        let p = grid_shortest_path(&s, Cell::new(2, 2), Cell::new(3, 2), UnknownAs::Free, 0.0).unwrap();
        assert!((p.length - 0.1).abs() < 1e-12);
        let p = grid_shortest_path(&s, Cell::new(2, 2), Cell::new(3, 3), UnknownAs::Free, 0.0).unwrap();
        assert!((p.length - 0.1 * core::f64::consts::SQRT_2).abs() < 1e-12);
        assert_eq!(p.cells, vec![Cell::new(2, 2), Cell::new(3, 3)]);
    }

    #[test]
    fn walled_off_goal_is_unreachable() {
        let mut g = Grid::new(10, 10, Terrain::Floor);
        for r in 0..10 {
            *g.get_mut(Cell::new(5, r)).unwrap() = Terrain::Obstacle;
        }
        let s = scene_from(g, vec![]);
        let e = grid_shortest_path(&s, Cell::new(1, 1), Cell::new(8, 8), UnknownAs::Free, 0.0);
        assert_eq!(e, Err(NavError::Unreachable));
    }

    #[test]
    fn no_corner_cutting() {
        let mut g = Grid::new(4, 4, Terrain::Floor);
        *g.get_mut(Cell::new(1, 0)).unwrap() = Terrain::Obstacle;
        let s = scene_from(g, vec![]);
        let p = grid_shortest_path(&s, Cell::new(0, 0), Cell::new(1, 1), UnknownAs::Free, 0.0).unwrap();
        assert!((p.length - 0.2).abs() < 1e-12);
    }

    #[test]
    fn inflation_closes_narrow_gap() {
        // wall at col 5 with a one-cell gap at row 5
        let mut g = Grid::new(11, 11, Terrain::Floor);
        for r in 0..11 {
            if r != 5 {
                *g.get_mut(Cell::new(5, r)).unwrap() = Terrain::Obstacle;
            }
        }
        let s = scene_from(g, vec![]);
        assert!(grid_shortest_path(&s, Cell::new(1, 5), Cell::new(9, 5), UnknownAs::Free, 0.0).is_ok());
        let e = grid_shortest_path(&s, Cell::new(1, 5), Cell::new(9, 5), UnknownAs::Free, AGENT_RADIUS);
        assert_eq!(e, Err(NavError::Unreachable));
    }

    #[test]
    fn unknown_interpretation() {
        let mut b = OccupancyGrid::new(10, 10, 0.1);
        for c in b.cells().cells().collect::<std::vec::Vec<_>>() {
            if c.col < 5 {
                b.set(c, Occupancy::Free);
            }
        }
        assert!(grid_shortest_path(&b, Cell::new(1, 1), Cell::new(8, 8), UnknownAs::Free, 0.0).is_ok());
        assert!(grid_shortest_path(&b, Cell::new(1, 1), Cell::new(8, 8), UnknownAs::Obstacle, 0.0).is_err());
    }

    /// Textbook Dijkstra over an explicit adjacency list, written separately
    /// from the planner.
    fn oracle_dijkstra(free: &[std::vec::Vec<bool>], from: (usize, usize), to: (usize, usize), res: f64) -> Option<f64> {
        let h = free.len();
        let w = free[0].len();
        let ok = |r: i64, c: i64| r >= 0 && c >= 0 && (r as usize) < h && (c as usize) < w && free[r as usize][c as usize];
        let mut dist = vec![vec![f64::INFINITY; w]; h];
        #[derive(PartialEq)]
        struct St(f64, usize, usize);
        impl Eq for St {}
        impl PartialOrd for St {
            fn partial_cmp(&self, o: &Self) -> Option<core::cmp::Ordering> {
                Some(self.cmp(o))
            }
        }
        impl Ord for St {
            fn cmp(&self, o: &Self) -> core::cmp::Ordering {
                o.0.partial_cmp(&self.0).unwrap()
            }
        }
        let mut pq = BinaryHeap::new();
        dist[from.0][from.1] = 0.0;
        pq.push(St(0.0, from.0, from.1));
        while let Some(St(d, r, c)) = pq.pop() {
            if d > dist[r][c] {
                continue;
            }
            for dr in -1i64..=1 {
                for dc in -1i64..=1 {
                    if dr == 0 && dc == 0 {
                        continue;
                    }
                    let (nr, nc) = (r as i64 + dr, c as i64 + dc);
                    if !ok(nr, nc) {
                        continue;
                    }
                    if dr != 0 && dc != 0 && !(ok(r as i64 + dr, c as i64) && ok(r as i64, c as i64 + dc)) {
                        continue;
                    }
                    let cost = if dr != 0 && dc != 0 { res * 2f64.sqrt() } else { res };
                    let nd = d + cost;
                    if nd < dist[nr as usize][nc as usize] {
                        dist[nr as usize][nc as usize] = nd;
                        pq.push(St(nd, nr as usize, nc as usize));
                    }
                }
            }
        }
        let d = dist[to.0][to.1];
        d.is_finite().then_some(d)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn matches_independent_dijkstra(seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let (w, h) = (10usize, 10usize);
            let free: std::vec::Vec<std::vec::Vec<bool>> =
                (0..h).map(|_| (0..w).map(|_| rng.random::<f64>() > 0.3).collect()).collect();
            let mut g = Grid::new(w, h, Terrain::Floor);
            for r in 0..h { for c in 0..w {
                if !free[r][c] { *g.get_mut(Cell::new(c as i32, r as i32)).unwrap() = Terrain::Obstacle; }
            }}
            let s = scene_from(g, vec![]);
            let (a, b) = ((0usize, 0usize), (h - 1, w - 1));
            prop_assume!(free[a.0][a.1] && free[b.0][b.1]);
            let ours = grid_shortest_path(&s, Cell::new(0, 0), Cell::new(w as i32 - 1, h as i32 - 1), UnknownAs::Free, 0.0);
            match oracle_dijkstra(&free, a, b, 0.1) {
                Some(d) => {
                    let p = ours.unwrap();
                    prop_assert!((p.length - d).abs() < 1e-9);
                    for win in p.cells.windows(2) { prop_assert!(win[0].is_adjacent8(win[1])); }
                }
                None => prop_assert_eq!(ours, Err(NavError::Unreachable)),
            }
        }
    }
}
