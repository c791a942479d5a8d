use alloc::vec::Vec;

use crate::error::{NavError, Result};
use crate::grid::{Cell, Grid};
use crate::mapping::{Frontier, OccupancyGrid};
use crate::world::{Scene, Task};

use super::{passability, DistanceField, PathResult, UnknownAs};

/// Cells from which the goal counts as reached for distance purposes:
/// floor cells 8-adjacent to any instance of the category (ObjectNav), or
/// the goal-pose cell (ImageNav).
pub fn goal_seed_cells(scene: &Scene, task: &Task) -> Result<Vec<Cell>> {
    let goal = scene.goal_cells(task)?;
    let mut seeds: Vec<Cell> = match task {
        Task::ImageNav { .. } => goal.into_iter().filter(|&c| scene.is_free(c)).collect(),
        Task::ObjectNav { .. } => goal
            .iter()
            .flat_map(|c| c.neighbors8())
            .filter(|&n| scene.is_free(n))
            .collect(),
    };
    seeds.sort_unstable();
    seeds.dedup();
    if seeds.is_empty() {
        return Err(NavError::Unreachable);
    }
    Ok(seeds)
}

/// True-map distance field to the goal (no inflation).
#[derive(Clone, Debug)]
pub struct GoalField {
    pass: Grid<bool>,
    field: DistanceField,
}

impl GoalField {
    pub fn new(scene: &Scene, task: &Task) -> Result<Self> {
        let seeds = goal_seed_cells(scene, task)?;
        let pass = passability(scene, UnknownAs::Obstacle, 0.0);
        let field = DistanceField::compute(&pass, &seeds, scene.resolution);
        Ok(Self { pass, field })
    }

    /// Geodesic meters to the goal; infinite when unreachable.
    pub fn distance(&self, c: Cell) -> f64 {
        self.field.get(c)
    }

    /// Shortest true-map path from `c` to the goal.
    pub fn path_from(&self, c: Cell) -> Result<PathResult> {
        self.field.descend(&self.pass, c).ok_or(NavError::Unreachable)
    }

    /// The correct-frontier rule against a precomputed field.
    pub fn label(&self, belief: &OccupancyGrid, agent: Cell, frontiers: &[Frontier]) -> Result<u32> {
        if frontiers.is_empty() {
            return Err(NavError::InvalidConfig("no frontiers to label".into()));
        }
        let path = self.path_from(agent)?;
        let mut best: Option<(usize, u32)> = None;
        for f in frontiers {
            if let Some(pos) = path.cells.iter().position(|c| f.contains(*c)) {
                if best.map_or(true, |b| (pos, f.id) < b) {
                    best = Some((pos, f.id));
                }
            }
        }
        if let Some((_, id)) = best {
            return Ok(id);
        }
        let belief_field = belief_distances(belief, agent);
        let mut best: Option<(f64, u32)> = None;
        for f in frontiers {
            let total = belief_field.get(f.waypoint_cell) + self.distance(f.waypoint_cell);
            if !total.is_finite() {
                continue;
            }
            if best.map_or(true, |(d, id)| total < d || (total == d && f.id < id)) {
                best = Some((total, f.id));
            }
        }
        best.map(|(_, id)| id).ok_or(NavError::Unreachable)
    }
}

/// Belief-space distances from `from` with Unknown treated as Free.
pub(crate) fn belief_distances(belief: &OccupancyGrid, from: Cell) -> DistanceField {
    let pass = passability(belief, UnknownAs::Free, 0.0);
    DistanceField::compute(&pass, &[from], belief.resolution)
}

/// Geodesic distance from `from` to the closest goal seed cell.
pub fn geodesic_goal_distance(scene: &Scene, from: Cell, task: &Task) -> Result<f64> {
    let d = GoalField::new(scene, task)?.distance(from);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(NavError::Unreachable)
    }
}

/// The frontier lying on the true shortest path from the agent to the
/// closest goal: the one intersected earliest along the path, or, when no
/// frontier touches the path, the minimizer of belief distance to its
/// waypoint plus true distance from the waypoint to the goal. Ties go to the
/// lowest id.
pub fn label_correct_frontier(
    scene: &Scene,
    belief: &OccupancyGrid,
    agent: Cell,
    frontiers: &[Frontier],
    task: &Task,
) -> Result<u32> {
    GoalField::new(scene, task)?.label(belief, agent, frontiers)
}
