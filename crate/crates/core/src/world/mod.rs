//! Ground-truth environment: scenes, agent kinematics, depth raycasting,
//! oracle goal detection, procedural scene generation and episode sampling.

mod episode;
mod generate;
mod kinematics;
mod sensor;

use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::grid::{Cell, Grid};
use crate::math::{normalize_heading, Vec2};

pub use episode::{sample_episode, EpisodeKind, SamplingParams};
pub use generate::{generate_scene, SceneParams};
pub use kinematics::{apply_action, ActionOutcome};
pub(crate) use kinematics::segment_clear as segment_clear_in;
pub use sensor::{oracle_detect_goal, raycast_depth};

/// Agent pose in world meters; heading in degrees, 0 along +x, CCW positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pose {
    pub x: f64,
    pub y: f64,
    pub heading: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, heading: f64) -> Self {
        Self { x, y, heading: normalize_heading(heading) }
    }

    pub fn position(&self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }

    pub fn cell(&self, resolution: f64) -> Cell {
        Cell::containing(self.position(), resolution)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.heading.is_finite()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Terrain {
    Floor,
    Obstacle,
}

/// A goal-object instance. Its cells are non-traversable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ObjectInstance {
    pub category: String,
    pub cells: Vec<Cell>,
    pub centroid: Vec2,
}

impl ObjectInstance {
    pub fn new(category: impl Into<String>, cells: Vec<Cell>, resolution: f64) -> Self {
        let n = cells.len().max(1) as f64;
        let sum = cells.iter().fold(Vec2::default(), |acc, c| acc + c.center(resolution));
        Self { category: category.into(), cells, centroid: sum * (1.0 / n) }
    }
}

/// Ground-truth 2D world.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene {
    pub id: String,
    pub seed: u64,
    pub resolution: f64,
    terrain: Grid<Terrain>,
    pub objects: Vec<ObjectInstance>,
}

impl Scene {
    /// Object cells are forced to `Obstacle`. Rejects empty or
    /// non-8-connected instances and out-of-grid cells.
    pub fn new(
        id: impl Into<String>,
        seed: u64,
        resolution: f64,
        mut terrain: Grid<Terrain>,
        objects: Vec<ObjectInstance>,
    ) -> Result<Self> {
        if !(resolution > 0.0) || terrain.is_empty() {
            return Err(NavError::InvalidConfig("scene needs cells and a positive resolution".into()));
        }
        for obj in &objects {
            if obj.cells.is_empty() || !is_8_connected(&obj.cells) {
                return Err(NavError::InvalidConfig(alloc::format!(
                    "object {:?} cells must be non-empty and 8-connected",
                    obj.category
                )));
            }
            for &c in &obj.cells {
                *terrain.get_mut(c).ok_or_else(|| {
                    NavError::InvalidConfig(alloc::format!("object cell {c:?} off-grid"))
                })? = Terrain::Obstacle;
            }
        }
        Ok(Self { id: id.into(), seed, resolution, terrain, objects })
    }

    pub fn width(&self) -> usize {
        self.terrain.width()
    }

    pub fn height(&self) -> usize {
        self.terrain.height()
    }

    pub fn terrain(&self) -> &Grid<Terrain> {
        &self.terrain
    }

    /// Off-grid cells are not traversable.
    pub fn is_free(&self, c: Cell) -> bool {
        matches!(self.terrain.get(c), Some(Terrain::Floor))
    }

    pub fn pose_is_free(&self, pose: &Pose) -> bool {
        pose.is_finite() && self.is_free(pose.cell(self.resolution))
    }

    pub fn categories(&self) -> Vec<&str> {
        let mut cats: Vec<&str> = self.objects.iter().map(|o| o.category.as_str()).collect();
        cats.sort_unstable();
        cats.dedup();
        cats
    }

    /// Cells the task counts as goal. Errors if an ObjectNav category has no
    /// instance in the scene.
    pub fn goal_cells(&self, task: &Task) -> Result<Vec<Cell>> {
        match task {
            Task::ObjectNav { category, .. } => {
                let cells: Vec<Cell> = self
                    .objects
                    .iter()
                    .filter(|o| &o.category == category)
                    .flat_map(|o| o.cells.iter().copied())
                    .collect();
                if cells.is_empty() {
                    Err(NavError::GoalAbsent(category.clone()))
                } else {
                    Ok(cells)
                }
            }
            Task::ImageNav { goal_pose } => Ok(alloc::vec![goal_pose.cell(self.resolution)]),
        }
    }

    /// Euclidean distance from `p` to the nearest goal cell's square.
    pub fn goal_distance_euclidean(&self, p: Vec2, task: &Task) -> Result<f64> {
        let cells = self.goal_cells(task)?;
        Ok(cells
            .iter()
            .map(|c| c.closest_point(p, self.resolution).dist(p))
            .fold(f64::INFINITY, f64::min))
    }
}

pub(crate) fn is_8_connected(cells: &[Cell]) -> bool {
    if cells.is_empty() {
        return false;
    }
    let mut seen = alloc::vec![false; cells.len()];
    let mut stack = alloc::vec![0usize];
    seen[0] = true;
    while let Some(i) = stack.pop() {
        for (j, c) in cells.iter().enumerate() {
            if !seen[j] && cells[i].is_adjacent8(*c) {
                seen[j] = true;
                stack.push(j);
            }
        }
    }
    seen.iter().all(|&s| s)
}

/// Simulated depth sensor and detector settings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensorConfig {
    pub num_rays: u32,
    /// Degrees.
    pub fov: f64,
    pub max_range: f64,
    pub detect_range: f64,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self { num_rays: 91, fov: 90.0, max_range: 5.0, detect_range: 4.0 }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_rays < 2 || !(self.fov > 0.0 && self.fov <= 360.0) || !(self.max_range > 0.0) {
            return Err(NavError::InvalidConfig("sensor: num_rays >= 2, 0 < fov <= 360, max_range > 0".into()));
        }
        Ok(())
    }

    /// Absolute ray headings for a sensor pointing along `heading`.
    pub fn ray_headings(&self, heading: f64) -> impl Iterator<Item = f64> + '_ {
        let n = self.num_rays;
        // a full circle would otherwise duplicate the first ray
        let spacing = if self.fov >= 360.0 { 360.0 / n as f64 } else { self.fov / (n - 1) as f64 };
        let start = heading - if self.fov >= 360.0 { 180.0 } else { self.fov / 2.0 };
        (0..n).map(move |i| normalize_heading(start + spacing * i as f64))
    }
}

/// Discrete motion primitives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ActionConfig {
    pub forward_step: f64,
    /// Degrees.
    pub turn_step: f64,
}

impl Default for ActionConfig {
    fn default() -> Self {
        Self { forward_step: 0.25, turn_step: 30.0 }
    }
}

impl ActionConfig {
    pub fn validate(&self) -> Result<()> {
        let turns = 360.0 / self.turn_step;
        if !(self.forward_step > 0.0) || !(self.turn_step > 0.0) || (turns - crate::math::round(turns)).abs() > 1e-9 {
            return Err(NavError::InvalidConfig("actions: forward_step > 0, turn_step divides 360".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Forward,
    TurnLeft,
    TurnRight,
    Stop,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthRay {
    /// Absolute heading of the ray, degrees.
    pub angle: f64,
    pub range: f64,
    pub hit: bool,
}

/// One depth sweep. `resolution` is the grid resolution it was traced on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DepthScan {
    pub pose: Pose,
    pub max_range: f64,
    pub resolution: f64,
    pub rays: Vec<DepthRay>,
}

/// Episode goal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Task {
    /// Find any instance of `category`. `open_vocabulary` marks categories
    /// drawn from the unseen (OVON-style) vocabulary.
    ObjectNav {
        category: String,
        #[serde(default)]
        open_vocabulary: bool,
    },
    /// Reach the place where the goal view was captured.
    ImageNav { goal_pose: Pose },
}

impl Task {
    pub fn object(category: impl Into<String>) -> Self {
        Task::ObjectNav { category: category.into(), open_vocabulary: false }
    }

    /// Wire/JSONL kind tag: `objectnav`, `ovon` or `imagenav`.
    pub fn kind_str(&self) -> &'static str {
        match self {
            Task::ObjectNav { open_vocabulary: false, .. } => "objectnav",
            Task::ObjectNav { open_vocabulary: true, .. } => "ovon",
            Task::ImageNav { .. } => "imagenav",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSpec {
    pub scene_id: String,
    pub seed: u64,
    pub start: Pose,
    pub task: Task,
    pub success_radius: f64,
    pub max_steps: u32,
}

impl EpisodeSpec {
    pub const DEFAULT_SUCCESS_RADIUS: f64 = 1.0;
    pub const DEFAULT_MAX_STEPS: u32 = 500;

    pub fn id(&self) -> String {
        alloc::format!("{}_ep{}", self.scene_id, self.seed)
    }
}

#[cfg(test)]
pub(crate) mod testutil {
    use super::*;

    /// Open room with a one-cell obstacle border.
    pub fn open_scene(w: usize, h: usize) -> Grid<Terrain> {
        let mut g = Grid::new(w, h, Terrain::Floor);
        for c in 0..w as i32 {
            *g.get_mut(Cell::new(c, 0)).unwrap() = Terrain::Obstacle;
            *g.get_mut(Cell::new(c, h as i32 - 1)).unwrap() = Terrain::Obstacle;
        }
        for r in 0..h as i32 {
            *g.get_mut(Cell::new(0, r)).unwrap() = Terrain::Obstacle;
            *g.get_mut(Cell::new(w as i32 - 1, r)).unwrap() = Terrain::Obstacle;
        }
        g
    }

    pub fn scene_from(g: Grid<Terrain>, objects: Vec<ObjectInstance>) -> Scene {
        Scene::new("test", 0, 0.1, g, objects).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn object_cells_become_obstacles() {
        let g = Grid::new(5, 5, Terrain::Floor);
        let obj = ObjectInstance::new("chair", vec![Cell::new(2, 2), Cell::new(3, 3)], 0.1);
        let s = Scene::new("s", 1, 0.1, g, vec![obj]).unwrap();
        assert!(!s.is_free(Cell::new(2, 2)));
        assert!(s.is_free(Cell::new(2, 3)));
    }

    #[test]
    fn disconnected_object_rejected() {
        let g = Grid::new(5, 5, Terrain::Floor);
        let obj = ObjectInstance::new("chair", vec![Cell::new(0, 0), Cell::new(3, 3)], 0.1);
        assert!(Scene::new("s", 1, 0.1, g, vec![obj]).is_err());
    }

    #[test]
    fn ray_headings_span_fov() {
        let cfg = SensorConfig::default();
        let v: Vec<f64> = cfg.ray_headings(0.0).collect();
        assert_eq!(v.len(), 91);
        assert_eq!(v[0], 315.0);
        assert_eq!(v[45], 0.0);
        assert_eq!(v[90], 45.0);
    }

    #[test]
    fn turn_step_must_divide_circle() {
        assert!(ActionConfig { forward_step: 0.25, turn_step: 25.0 }.validate().is_err());
        assert!(ActionConfig::default().validate().is_ok());
    }

    #[test]
    fn absent_category() {
        let s = testutil::scene_from(testutil::open_scene(6, 6), vec![]);
        assert_eq!(s.goal_cells(&Task::object("sofa")), Err(NavError::GoalAbsent("sofa".into())));
    }
}
