use crate::error::Result;
use crate::grid::Cell;
use crate::mapping::{Frontier, OccupancyGrid};
use crate::world::{Pose, Scene, Task};

use super::goal::belief_distances;
use super::{GoalField, OracleConfig};

/// Frontier with the shortest belief-space path (Unknown as Free) from
/// `agent` to its waypoint; lowest id on ties. Falls back to the lowest id
/// when no waypoint is reachable. `None` only for an empty list.
pub fn nearest_frontier(belief: &OccupancyGrid, agent: Cell, frontiers: &[Frontier]) -> Option<u32> {
    let field = belief_distances(belief, agent);
    let mut best: Option<(f64, u32)> = None;
    for f in frontiers {
        let d = field.get(f.waypoint_cell);
        if best.map_or(true, |(bd, bid)| d < bd || (d == bd && f.id < bid)) {
            best = Some((d, f.id));
        }
    }
    best.map(|(_, id)| id)
}

/// Greedy exploration with goal seeking: the nearest frontier while the goal
/// is farther than `goal_switch_distance` (geodesic, true map), the
/// correct frontier once it is within that distance.
pub fn greedy_oracle_step(
    scene: &Scene,
    belief: &OccupancyGrid,
    agent: &Pose,
    frontiers: &[Frontier],
    task: &Task,
    cfg: &OracleConfig,
) -> Result<u32> {
    let field = GoalField::new(scene, task)?;
    greedy_with_field(&field, belief, agent.cell(belief.resolution), frontiers, cfg)
}

pub(crate) fn greedy_with_field(
    field: &GoalField,
    belief: &OccupancyGrid,
    agent: Cell,
    frontiers: &[Frontier],
    cfg: &OracleConfig,
) -> Result<u32> {
    if field.distance(agent) <= cfg.goal_switch_distance {
        field.label(belief, agent, frontiers)
    } else {
        nearest_frontier(belief, agent, frontiers)
            .ok_or_else(|| crate::NavError::InvalidConfig("no frontiers to choose from".into()))
    }
}
