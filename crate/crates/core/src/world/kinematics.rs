use crate::error::{NavError, Result};
use crate::grid::RayWalk;
use crate::math::heading_vec;

use super::{Action, ActionConfig, Pose, Scene};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ActionOutcome {
    pub pose: Pose,
    pub collided: bool,
}

/// Apply one discrete action. A blocked `Forward` leaves the pose unchanged
/// and reports `collided`; blocking is tested on every cell the swept segment
/// touches, which is at least as strict as sub-cell sampling.
pub fn apply_action(pose: Pose, action: Action, scene: &Scene, cfg: &ActionConfig) -> Result<ActionOutcome> {
    if !pose.is_finite() || !scene.terrain().in_bounds(pose.cell(scene.resolution)) {
        return Err(NavError::InvalidPose);
    }
    let same = ActionOutcome { pose, collided: false };
    Ok(match action {
        Action::Stop => same,
        Action::TurnLeft => ActionOutcome { pose: Pose::new(pose.x, pose.y, pose.heading + cfg.turn_step), collided: false },
        Action::TurnRight => ActionOutcome { pose: Pose::new(pose.x, pose.y, pose.heading - cfg.turn_step), collided: false },
        Action::Forward => {
            let from = pose.position();
            let to = from + heading_vec(pose.heading) * cfg.forward_step;
            if segment_clear(from, to, |c| scene.is_free(c), scene.resolution) {
                ActionOutcome { pose: Pose { x: to.x, y: to.y, heading: pose.heading }, collided: false }
            } else {
                ActionOutcome { pose, collided: true }
            }
        }
    })
}

/// True when every cell touched by the segment satisfies `free`.
pub(crate) fn segment_clear(
    from: crate::Vec2,
    to: crate::Vec2,
    free: impl Fn(crate::Cell) -> bool,
    resolution: f64,
) -> bool {
    let end = crate::Cell::containing(to, resolution);
    for (c, _) in RayWalk::segment(from, to, resolution) {
        if !free(c) {
            return false;
        }
        if c == end {
            break;
        }
    }
    free(end)
}
