use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::grid::{Cell, Grid};
use crate::mapping::{Occupancy, OccupancyGrid};
use crate::math::{angle_diff, heading_vec, round, Vec2};
use crate::world::{Action, ActionConfig, Pose};

use super::{passability, DistanceField, UnknownAs, AGENT_RADIUS};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    /// Body radius; cells this close to a belief obstacle cost extra.
    pub inflate_radius: f64,
    /// Extra cost factor for inflated cells (0 = no preference).
    pub inflation_penalty: f64,
}

impl Default for ControllerConfig {
    fn default() -> Self {
        Self { inflate_radius: AGENT_RADIUS, inflation_penalty: 4.0 }
    }
}

/// One step of a plan-and-follow point-goal controller on the belief map.
///
/// Plans a belief-space distance field to `waypoint` (Unknown as Free,
/// belief obstacles blocked, cells within `inflate_radius` of an obstacle
/// penalized) and picks, among the discrete headings reachable by turning,
/// the one whose forward step lands closest to the waypoint along the plan
/// without sweeping a belief obstacle. `Forward` when already facing it,
/// otherwise the turn with the smaller rotation. Replans on every call.
pub fn local_controller_step(
    belief: &OccupancyGrid,
    pose: &Pose,
    waypoint: Vec2,
    cfg: &ActionConfig,
    ctl: &ControllerConfig,
) -> Result<Action> {
    let res = belief.resolution;
    let goal = belief.world_to_cell(waypoint);
    let here = belief.world_to_cell(pose.position());
    if !belief.cells().in_bounds(goal) || !belief.cells().in_bounds(here) {
        return Err(NavError::InvalidPose);
    }
    let pass = passability(belief, UnknownAs::Free, 0.0);
    let weights = if ctl.inflation_penalty > 0.0 && ctl.inflate_radius > 0.0 {
        let inflated = passability(belief, UnknownAs::Free, ctl.inflate_radius);
        let w: Vec<f64> = inflated
            .as_slice()
            .iter()
            .map(|&ok| if ok { 1.0 } else { 1.0 + ctl.inflation_penalty })
            .collect();
        Some(Grid::from_vec(pass.width(), pass.height(), w))
    } else {
        None
    };

    let turns = round(360.0 / cfg.turn_step) as i32;
    let pos = pose.position();
    let mut candidates: Vec<(f64, Cell, bool)> = Vec::with_capacity(turns as usize);
    for k in 0..turns {
        let h = pose.heading + cfg.turn_step * k as f64;
        let end = pos + heading_vec(h) * cfg.forward_step;
        let end_cell = belief.world_to_cell(end);
        let clear = belief.cells().in_bounds(end_cell)
            && crate::world::segment_clear_in(pos - belief.origin, end - belief.origin, |c| {
                belief.cells().get(c).is_some_and(|&s| s != Occupancy::Obstacle)
            }, res);
        candidates.push((h, end_cell, clear));
    }
    let mut targets: Vec<Cell> = candidates.iter().filter(|c| c.2).map(|c| c.1).collect();
    targets.push(here);
    let field = DistanceField::compute_with(&pass, weights.as_ref(), &[goal], res, &targets);
    if !field.get(here).is_finite() {
        return Err(NavError::ControllerStuck);
    }

    // lowest field value, then smallest rotation, then left
    let mut best: Option<(f64, f64, f64)> = None; // (value, |rotation|, rotation)
    for &(h, end_cell, clear) in &candidates {
        if !clear {
            continue;
        }
        let value = field.get(end_cell);
        if !value.is_finite() {
            continue;
        }
        let rot = angle_diff(pose.heading, h);
        let key = (value, rot.abs(), -rot);
        let better = match best {
            None => true,
            Some(b) => {
                key.0 < b.0 - 1e-9 || ((key.0 - b.0).abs() <= 1e-9 && (key.1, key.2) < (b.1, -b.2))
            }
        };
        if better {
            best = Some((value, rot.abs(), rot));
        }
    }
    let Some((_, _, rot)) = best else {
        // boxed in on the belief map: rotate to look for an opening
        return Ok(Action::TurnLeft);
    };
    Ok(if rot.abs() <= cfg.turn_step / 2.0 {
        Action::Forward
    } else if rot > 0.0 {
        Action::TurnLeft
    } else {
        Action::TurnRight
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapping::integrate_scan;
    use crate::world::testutil::scene_from;
    use crate::world::{apply_action, raycast_depth, Scene, SensorConfig, Terrain};
    use alloc::vec;

    fn known_open(w: usize, h: usize) -> OccupancyGrid {
        let mut b = OccupancyGrid::new(w, h, 0.1);
        for r in 0..h as i32 {
            for c in 0..w as i32 {
                b.set(Cell::new(c, r), Occupancy::Free);
            }
        }
        b
    }

    #[test]
    fn aligned_waypoint_goes_forward() {
        let b = known_open(40, 40);
        let a = local_controller_step(&b, &Pose::new(1.05, 2.05, 0.0), Vec2::new(2.05, 2.05), &ActionConfig::default(), &ControllerConfig::default());
        assert_eq!(a, Ok(Action::Forward));
    }

    #[test]
    fn waypoint_on_the_left_turns_left() {
        let b = known_open(40, 40);
        let a = local_controller_step(&b, &Pose::new(2.05, 1.05, 0.0), Vec2::new(2.05, 3.05), &ActionConfig::default(), &ControllerConfig::default());
        assert_eq!(a, Ok(Action::TurnLeft));
        let a = local_controller_step(&b, &Pose::new(2.05, 3.05, 0.0), Vec2::new(2.05, 1.05), &ActionConfig::default(), &ControllerConfig::default());
        assert_eq!(a, Ok(Action::TurnRight));
    }

    #[test]
    fn enclosed_waypoint_is_stuck() {
        let mut b = known_open(40, 40);
        for c in Cell::new(30, 30).neighbors8() {
            b.set(c, Occupancy::Obstacle);
        }
        let a = local_controller_step(&b, &Pose::new(1.05, 1.05, 0.0), Cell::new(30, 30).center(0.1), &ActionConfig::default(), &ControllerConfig::default());
        assert_eq!(a, Err(NavError::ControllerStuck));
    }

    fn l_wall() -> Scene {
        let mut g = crate::world::testutil::open_scene(60, 60);
        // L-shaped wall between the start (lower left) and the waypoint
        for r in 1..40 {
            *g.get_mut(Cell::new(30, r)).unwrap() = Terrain::Obstacle;
        }
        for c in 10..31 {
            *g.get_mut(Cell::new(c, 40)).unwrap() = Terrain::Obstacle;
        }
        scene_from(g, vec![])
    }

    /// Closed-loop rollout: map with the depth sensor, step the controller,
    /// apply on the true map.
    #[test]
    fn rollout_reaches_waypoint_behind_l_wall() {
        let s = l_wall();
        let mut belief = OccupancyGrid::for_scene(&s);
        let cfg = ActionConfig::default();
        let mut pose = Pose::new(1.55, 1.55, 0.0);
        let goal = Vec2::new(4.55, 1.55);
        let mut reached = false;
        for _ in 0..400 {
            let scan = raycast_depth(&s, &pose, &SensorConfig::default());
            integrate_scan(&mut belief, &scan).unwrap();
            if pose.position().dist(goal) <= 0.25 {
                reached = true;
                break;
            }
            let a = local_controller_step(&belief, &pose, goal, &cfg, &ControllerConfig::default()).unwrap();
            let out = apply_action(pose, a, &s, &cfg).unwrap();
            assert!(!out.collided);
            pose = out.pose;
        }
        assert!(reached, "ended at {pose:?}");
    }
}
