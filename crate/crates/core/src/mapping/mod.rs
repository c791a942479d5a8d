//! The agent's belief: occupancy mapping from depth and odometry, frontier
//! extraction with stable ids, and representative-view selection.

mod frontier;
mod view;

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::grid::{Cell, Grid, RayWalk};
use crate::math::{heading_vec, Vec2};
use crate::world::{DepthScan, Scene};

pub use frontier::{extract_frontiers, frontier_cells, Frontier, FrontierTracker, DEFAULT_MIN_FRONTIER_CELLS};
pub use view::{select_representative_view, view_is_visible, view_score, ViewRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Occupancy {
    Unknown,
    Free,
    Obstacle,
}

/// Three-state belief map. Updates are monotone: Unknown may become Free or
/// Obstacle, Free may become Obstacle, Obstacle never changes.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid {
    pub resolution: f64,
    /// World coordinates of the lower-left corner of cell (0, 0).
    pub origin: Vec2,
    cells: Grid<Occupancy>,
}

impl OccupancyGrid {
    pub fn new(width: usize, height: usize, resolution: f64) -> Self {
        Self { resolution, origin: Vec2::default(), cells: Grid::new(width, height, Occupancy::Unknown) }
    }

    /// All-Unknown grid aligned with the scene.
    pub fn for_scene(scene: &Scene) -> Self {
        Self::new(scene.width(), scene.height(), scene.resolution)
    }

    pub fn cells(&self) -> &Grid<Occupancy> {
        &self.cells
    }

    pub fn get(&self, c: Cell) -> Option<Occupancy> {
        self.cells.get(c).copied()
    }

    /// Raw write, bypassing the monotone update rule. Off-grid is ignored.
    pub fn set(&mut self, c: Cell, state: Occupancy) {
        if let Some(s) = self.cells.get_mut(c) {
            *s = state;
        }
    }

    pub fn world_to_cell(&self, p: Vec2) -> Cell {
        Cell::containing(p - self.origin, self.resolution)
    }

    pub fn cell_center(&self, c: Cell) -> Vec2 {
        c.center(self.resolution) + self.origin
    }

    pub fn count(&self, state: Occupancy) -> usize {
        self.cells.as_slice().iter().filter(|&&s| s == state).count()
    }

    fn mark_free(&mut self, c: Cell) {
        if let Some(s) = self.cells.get_mut(c) {
            if *s == Occupancy::Unknown {
                *s = Occupancy::Free;
            }
        }
    }

    fn mark_obstacle(&mut self, c: Cell) {
        if let Some(s) = self.cells.get_mut(c) {
            *s = Occupancy::Obstacle;
        }
    }
}

/// Fold one depth sweep into the belief. Cells a ray passes through become
/// Free, the cell where a hitting ray ends becomes Obstacle, and the agent's
/// own cell becomes Free. Obstacle marks are sticky.
pub fn integrate_scan(grid: &mut OccupancyGrid, scan: &DepthScan) -> Result<()> {
    if (grid.resolution - scan.resolution).abs() > 1e-12 {
        return Err(NavError::GridMismatch);
    }
    let origin = scan.pose.position() - grid.origin;
    let here = Cell::containing(origin, grid.resolution);
    if !grid.cells.in_bounds(here) {
        return Err(NavError::InvalidPose);
    }
    for ray in &scan.rays {
        let dir = heading_vec(ray.angle);
        for (c, t) in RayWalk::new(origin, dir, grid.resolution, ray.range) {
            if ray.hit && t >= ray.range - 1e-9 {
                grid.mark_obstacle(c);
                break;
            }
            grid.mark_free(c);
        }
    }
    grid.mark_free(here);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::world::testutil::scene_from;
    use crate::world::{raycast_depth, Pose, SensorConfig, Terrain};
    use alloc::vec;

    fn wall_scene() -> Scene {
        let mut g = Grid::new(60, 60, Terrain::Floor);
        for r in 0..60 {
            *g.get_mut(Cell::new(40, r)).unwrap() = Terrain::Obstacle;
        }
        scene_from(g, vec![])
    }

    #[test]
    fn head_on_wall_scan() {
        let s = wall_scene();
        let mut b = OccupancyGrid::for_scene(&s);
        let pose = Pose::new(3.05, 3.05, 0.0);
        let scan = raycast_depth(&s, &pose, &SensorConfig::default());
        integrate_scan(&mut b, &scan).unwrap();
        // the straight corridor of the center ray is free up to the wall
        for c in 30..40 {
            assert_eq!(b.get(Cell::new(c, 30)), Some(Occupancy::Free));
        }
        assert_eq!(b.get(Cell::new(40, 30)), Some(Occupancy::Obstacle));
        // every hitting ray produced its obstacle cell in the wall column
        for r in &scan.rays {
            if r.hit {
                // a ray through a cell corner may end in either wall cell
                let end = pose.position() + heading_vec(r.angle) * (r.range + 1e-6);
                let near = [Vec2::new(0.0, 1e-5), Vec2::new(0.0, -1e-5)].map(|d| b.get(b.world_to_cell(end + d)));
                assert!(near.contains(&Some(Occupancy::Obstacle)), "{r:?}");
            }
        }
        assert!(b.count(Occupancy::Obstacle) > 0);
        assert!(b.cells().cells().filter(|c| c.col > 40).all(|c| b.get(c) == Some(Occupancy::Unknown)));
    }

    #[test]
    fn agent_cell_free_and_idempotent() {
        let s = wall_scene();
        let mut b = OccupancyGrid::for_scene(&s);
        let scan = raycast_depth(&s, &Pose::new(1.05, 5.55, 200.0), &SensorConfig::default());
        integrate_scan(&mut b, &scan).unwrap();
        assert_eq!(b.get(Cell::new(10, 55)), Some(Occupancy::Free));
        let once = b.clone();
        integrate_scan(&mut b, &scan).unwrap();
        assert_eq!(b, once);
    }

    #[test]
    fn resolution_mismatch() {
        let s = wall_scene();
        let mut b = OccupancyGrid::new(60, 60, 0.05);
        let scan = raycast_depth(&s, &Pose::new(1.05, 1.05, 0.0), &SensorConfig::default());
        assert_eq!(integrate_scan(&mut b, &scan), Err(NavError::GridMismatch));
    }

    #[test]
    fn knowledge_is_monotone() {
        let s = crate::world::generate_scene(3, &crate::world::SceneParams::default()).unwrap();
        let mut b = OccupancyGrid::for_scene(&s);
        let start = s.terrain().cells().find(|&c| s.is_free(c)).unwrap();
        let mut unknown = b.count(Occupancy::Unknown);
        for k in 0..24 {
            let p = start.center(0.1);
            let scan = raycast_depth(&s, &Pose::new(p.x, p.y, 15.0 * k as f64), &SensorConfig::default());
            let before = b.clone();
            integrate_scan(&mut b, &scan).unwrap();
            let now = b.count(Occupancy::Unknown);
            assert!(now <= unknown);
            unknown = now;
            for (x, y) in before.cells().as_slice().iter().zip(b.cells().as_slice()) {
                match x {
                    Occupancy::Obstacle => assert_eq!(*y, Occupancy::Obstacle),
                    Occupancy::Free => assert_ne!(*y, Occupancy::Unknown),
                    Occupancy::Unknown => {}
                }
            }
        }
    }
}
