use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::grid::RayWalk;
use crate::math::{angle_diff, heading_vec, vec_heading};
use crate::world::{Pose, SensorConfig};

use super::{Frontier, Occupancy, OccupancyGrid};

/// A past observation, identified by the step it was captured at. Pixel
/// content is represented by the capturing pose.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ViewRecord {
    pub frame_index: u32,
    pub pose: Pose,
}

/// Signed perpendicularity: camera direction dotted with the into-Unknown
/// normal. 1 when looking straight across the boundary into the unknown.
pub fn view_score(frontier: &Frontier, view: &ViewRecord) -> f64 {
    heading_vec(view.pose.heading).dot(frontier.normal)
}

/// The waypoint is inside the view's field of view and range, and no belief
/// obstacle lies between (Unknown is transparent).
pub fn view_is_visible(grid: &OccupancyGrid, frontier: &Frontier, view: &ViewRecord, cfg: &SensorConfig) -> bool {
    let from = view.pose.position();
    let to = frontier.waypoint;
    let d = to - from;
    if d.norm() > cfg.max_range {
        return false;
    }
    if d.norm() > 1e-12 && cfg.fov < 360.0 && angle_diff(view.pose.heading, vec_heading(d)).abs() > cfg.fov / 2.0 {
        return false;
    }
    let target = frontier.waypoint_cell;
    for (c, _) in RayWalk::segment(from - grid.origin, to - grid.origin, grid.resolution) {
        if c == target {
            break;
        }
        if grid.get(c) == Some(Occupancy::Obstacle) {
            return false;
        }
    }
    true
}

/// Pick the historical frame that best depicts `frontier`: the highest
/// [`view_score`] among frames that can see the waypoint, or among all frames
/// when none can. Earliest frame wins ties.
pub fn select_representative_view(
    grid: &OccupancyGrid,
    frontier: &Frontier,
    history: &[ViewRecord],
    cfg: &SensorConfig,
) -> Result<u32> {
    if history.is_empty() {
        return Err(NavError::NoHistory);
    }
    let best = |pool: &mut dyn Iterator<Item = &ViewRecord>| -> Option<u32> {
        let mut best: Option<(f64, u32)> = None;
        for v in pool {
            let s = view_score(frontier, v);
            if best.map_or(true, |(bs, bf)| s > bs || (s == bs && v.frame_index < bf)) {
                best = Some((s, v.frame_index));
            }
        }
        best.map(|b| b.1)
    };
    let visible: Vec<&ViewRecord> = history.iter().filter(|v| view_is_visible(grid, frontier, v, cfg)).collect();
    Ok(best(&mut visible.into_iter()).or_else(|| best(&mut history.iter())).unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;
    use crate::math::Vec2;
    use alloc::vec;

    fn frontier_at(col: i32, row: i32) -> Frontier {
        let wp = Cell::new(col, row);
        Frontier {
            id: 0,
            cells: vec![wp],
            waypoint: wp.center(0.1),
            waypoint_cell: wp,
            normal: Vec2::new(1.0, 0.0),
            boundary_dir: Vec2::new(0.0, 1.0),
        }
    }

    fn grid() -> OccupancyGrid {
        let mut g = OccupancyGrid::new(50, 50, 0.1);
        for r in 0..50 {
            for c in 0..26 {
                g.set(Cell::new(c, r), Occupancy::Free);
            }
        }
        g
    }

    fn rec(i: u32, x: f64, y: f64, h: f64) -> ViewRecord {
        ViewRecord { frame_index: i, pose: Pose::new(x, y, h) }
    }

    #[test]
    fn frame_facing_along_normal_at_waypoint() {
        let f = frontier_at(25, 25);
        let h = vec![rec(0, 2.55, 2.55, 0.0)];
        assert_eq!(select_representative_view(&grid(), &f, &h, &SensorConfig::default()), Ok(0));
        assert!((view_score(&f, &h[0]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ties_go_to_earliest() {
        let f = frontier_at(25, 25);
        let h = vec![rec(3, 1.55, 2.55, 0.0), rec(7, 1.55, 2.55, 0.0)];
        assert_eq!(select_representative_view(&grid(), &f, &h, &SensorConfig::default()), Ok(3));
    }

    #[test]
    fn empty_history() {
        assert_eq!(select_representative_view(&grid(), &frontier_at(1, 1), &[], &SensorConfig::default()), Err(NavError::NoHistory));
    }

    #[test]
    fn occluded_best_score_loses_to_visible() {
        let mut g = grid();
        for r in 0..50 {
            g.set(Cell::new(20, r), Occupancy::Obstacle);
        }
        let f = frontier_at(25, 25);
        // frame 0 looks straight along the normal but through the wall
        let h = vec![rec(0, 1.05, 2.55, 0.0), rec(1, 2.25, 2.05, 60.0)];
        assert!(!view_is_visible(&g, &f, &h[0], &SensorConfig::default()));
        assert!(view_is_visible(&g, &f, &h[1], &SensorConfig::default()));
        assert_eq!(select_representative_view(&g, &f, &h, &SensorConfig::default()), Ok(1));
    }

    #[test]
    fn mixed_history_matches_exhaustive_scoring() {
        let g = grid();
        let f = frontier_at(25, 25);
        let cfg = SensorConfig::default();
        let h: Vec<ViewRecord> = (0..10)
            .map(|i| rec(i, 0.5 + 0.2 * i as f64, 1.0 + 0.3 * (i % 4) as f64, 37.0 * i as f64))
            .collect();
        // exhaustive oracle: recompute predicate and score for every frame
        let mut best: Option<(f64, u32)> = None;
        for v in &h {
            let d = f.waypoint - v.pose.position();
            let ang = libm::atan2(d.y, d.x) * 180.0 / core::f64::consts::PI;
            let mut off = (ang - v.pose.heading) % 360.0;
            if off > 180.0 {
                off -= 360.0;
            }
            if off < -180.0 {
                off += 360.0;
            }
            let visible = d.norm() <= 5.0 && off.abs() <= 45.0; // no obstacles in this grid
            let score = libm::cos(v.pose.heading * core::f64::consts::PI / 180.0);
            if visible && best.map_or(true, |(s, _)| score > s) {
                best = Some((score, v.frame_index));
            }
        }
        let expected = best.expect("some frame sees the waypoint").1;
        assert_eq!(select_representative_view(&g, &f, &h, &cfg), Ok(expected));
    }
}
