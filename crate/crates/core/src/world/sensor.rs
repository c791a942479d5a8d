use alloc::vec::Vec;

use crate::error::Result;
use crate::grid::{Cell, RayWalk};
use crate::math::{angle_diff, heading_vec, vec_heading, Vec2};

use super::{DepthRay, DepthScan, Pose, Scene, SensorConfig, Task};

/// Cast the sensor's rays through the true map. Each range is the distance to
/// the boundary of the first non-floor cell (off-grid counts as a wall),
/// clamped to `max_range`.
pub fn raycast_depth(scene: &Scene, pose: &Pose, cfg: &SensorConfig) -> DepthScan {
    let origin = pose.position();
    let rays = cfg
        .ray_headings(pose.heading)
        .map(|angle| {
            let dir = heading_vec(angle);
            let first_block = RayWalk::new(origin, dir, scene.resolution, cfg.max_range)
                .find(|&(c, _)| !scene.is_free(c));
            match first_block {
                Some((_, t)) => DepthRay { angle, range: t.max(f64::MIN_POSITIVE), hit: true },
                None => DepthRay { angle, range: cfg.max_range, hit: false },
            }
        })
        .collect();
    DepthScan { pose: *pose, max_range: cfg.max_range, resolution: scene.resolution, rays }
}

/// True when the first non-floor cell on the walk from `from` toward the
/// center of `target` is `target` itself (or the walk reaches it unblocked).
pub(crate) fn line_of_sight(scene: &Scene, from: Vec2, target: Cell) -> bool {
    let to = target.center(scene.resolution);
    for (c, _) in RayWalk::segment(from, to, scene.resolution) {
        if c == target {
            return true;
        }
        if !scene.is_free(c) {
            return false;
        }
    }
    // segment ended in a neighbor due to rounding at the boundary
    true
}

/// Geometric stand-in for an open-vocabulary detector. Returns the closest
/// point of the nearest goal cell that is within `detect_range`, inside the
/// field of view (measured to the cell center) and in line of sight.
pub fn oracle_detect_goal(scene: &Scene, pose: &Pose, task: &Task, cfg: &SensorConfig) -> Result<Option<Vec2>> {
    let cells = scene.goal_cells(task)?;
    let p = pose.position();
    let half_fov = cfg.fov / 2.0;
    let mut best: Option<(f64, Vec2)> = None;
    let mut candidates: Vec<(f64, Cell, Vec2)> = cells
        .into_iter()
        .map(|c| {
            let q = c.closest_point(p, scene.resolution);
            (q.dist(p), c, q)
        })
        .filter(|(d, _, _)| *d <= cfg.detect_range)
        .collect();
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    for (d, c, q) in candidates {
        let to_center = c.center(scene.resolution) - p;
        let in_fov = cfg.fov >= 360.0
            || to_center.norm() < 1e-12
            || angle_diff(pose.heading, vec_heading(to_center)).abs() <= half_fov;
        if in_fov && line_of_sight(scene, p, c) {
            best = Some((d, q));
            break;
        }
    }
    Ok(best.map(|(_, q)| q))
}
