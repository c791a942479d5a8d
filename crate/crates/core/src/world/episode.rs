use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::grid::Cell;
use crate::planning::{passability, GoalField, UnknownAs, AGENT_RADIUS};

use super::{EpisodeSpec, Pose, Scene, Task};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EpisodeKind {
    ObjectNav,
    ImageNav,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    /// Minimum start-to-goal geodesic, meters.
    pub min_geodesic: f64,
    /// Upper bound, meters; keeps episodes inside the step budget.
    pub max_geodesic: f64,
    /// ObjectNav vocabulary. Empty means every category in the scene.
    pub categories: Vec<String>,
    /// Tag ObjectNav tasks as open-vocabulary.
    pub open_vocabulary: bool,
    /// Start (and ImageNav goal) cells must stay passable after dilating
    /// obstacles by this many meters.
    pub clearance: f64,
    /// Start headings are multiples of this, degrees.
    pub heading_step: f64,
    pub success_radius: f64,
    pub max_steps: u32,
    pub max_attempts: u32,
}

impl Default for SamplingParams {
    fn default() -> Self {
        Self {
            min_geodesic: 3.0,
            max_geodesic: 1.0e3,
            categories: Vec::new(),
            open_vocabulary: false,
            clearance: AGENT_RADIUS,
            heading_step: 30.0,
            success_radius: EpisodeSpec::DEFAULT_SUCCESS_RADIUS,
            max_steps: EpisodeSpec::DEFAULT_MAX_STEPS,
            max_attempts: 64,
        }
    }
}

fn random_heading(rng: &mut ChaCha8Rng, step: f64) -> f64 {
    let n = crate::math::round(360.0 / step).max(1.0) as u32;
    rng.random_range(0..n) as f64 * step
}

fn at(c: Cell, res: f64, heading: f64) -> Pose {
    let p = c.center(res);
    Pose::new(p.x, p.y, heading)
}

/// Draw a start and goal. Deterministic in `(scene, seed, kind, params)`.
pub fn sample_episode(scene: &Scene, seed: u64, kind: EpisodeKind, params: &SamplingParams) -> Result<EpisodeSpec> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5EED_E915_0DE5_0000);
    let clear = passability(scene, UnknownAs::Obstacle, params.clearance);
    let roomy: Vec<Cell> = clear.cells().filter(|&c| clear.get(c) == Some(&true)).collect();
    if roomy.is_empty() {
        return Err(NavError::SamplingFailed("no cell with enough clearance".into()));
    }
    let categories: Vec<String> = scene
        .categories()
        .into_iter()
        .filter(|c| params.categories.is_empty() || params.categories.iter().any(|k| k == c))
        .map(String::from)
        .collect();
    if kind == EpisodeKind::ObjectNav && categories.is_empty() {
        return Err(NavError::SamplingFailed("no allowed category in scene".into()));
    }
    for _ in 0..params.max_attempts.max(1) {
        let task = match kind {
            EpisodeKind::ObjectNav => Task::ObjectNav {
                category: categories[rng.random_range(0..categories.len())].clone(),
                open_vocabulary: params.open_vocabulary,
            },
            EpisodeKind::ImageNav => {
                let g = roomy[rng.random_range(0..roomy.len())];
                Task::ImageNav { goal_pose: at(g, scene.resolution, random_heading(&mut rng, params.heading_step)) }
            }
        };
        let field = GoalField::new(scene, &task)?;
        let starts: Vec<Cell> = roomy
            .iter()
            .copied()
            .filter(|&c| {
                let d = field.distance(c);
                d.is_finite() && d >= params.min_geodesic && d <= params.max_geodesic
            })
            .collect();
        if starts.is_empty() {
            continue;
        }
        let s = starts[rng.random_range(0..starts.len())];
        return Ok(EpisodeSpec {
            scene_id: scene.id.clone(),
            seed,
            start: at(s, scene.resolution, random_heading(&mut rng, params.heading_step)),
            task,
            success_radius: params.success_radius,
            max_steps: params.max_steps,
        });
    }
    Err(NavError::SamplingFailed(alloc::format!(
        "no start within [{}, {}] m of a goal after {} attempts",
        params.min_geodesic, params.max_geodesic, params.max_attempts
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planning::grid_shortest_path;
    use crate::world::{generate_scene, SceneParams};

    /// Independent check: shortest true-map path from the start to any cell
    /// 8-adjacent to the goal (or to the goal cell itself for ImageNav).
    fn shortest_to_goal(scene: &Scene, ep: &EpisodeSpec) -> f64 {
        let from = ep.start.cell(scene.resolution);
        let goal = scene.goal_cells(&ep.task).unwrap();
        let mut targets: Vec<Cell> = match ep.task {
            Task::ImageNav { .. } => goal,
            Task::ObjectNav { .. } => goal.iter().flat_map(|c| c.neighbors8()).filter(|&n| scene.is_free(n)).collect(),
        };
        targets.sort_unstable();
        targets.dedup();
        targets
            .iter()
            .filter_map(|&t| grid_shortest_path(scene, from, t, UnknownAs::Obstacle, 0.0).ok())
            .map(|p| p.length)
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn objectnav_episodes_respect_min_geodesic() {
        let scene = generate_scene(3, &SceneParams::default()).unwrap();
        for seed in 0..5 {
            let ep = sample_episode(&scene, seed, EpisodeKind::ObjectNav, &SamplingParams::default()).unwrap();
            assert!(scene.pose_is_free(&ep.start));
            assert!(ep.start.heading % 30.0 == 0.0);
            let d = shortest_to_goal(&scene, &ep);
            assert!(d.is_finite() && d >= 3.0 - 1e-9, "{d}");
        }
    }

    #[test]
    fn imagenav_goal_is_free() {
        let scene = generate_scene(8, &SceneParams::default()).unwrap();
        for seed in 0..5 {
            let ep = sample_episode(&scene, seed, EpisodeKind::ImageNav, &SamplingParams::default()).unwrap();
            let Task::ImageNav { goal_pose } = ep.task else { panic!() };
            assert!(scene.pose_is_free(&goal_pose));
            assert!(shortest_to_goal(&scene, &ep) >= 3.0 - 1e-9);
        }
    }

    #[test]
    fn deterministic_and_restricted_vocabulary() {
        let scene = generate_scene(5, &SceneParams::default()).unwrap();
        let cat = String::from(scene.categories()[0]);
        let p = SamplingParams { categories: alloc::vec![cat.clone()], open_vocabulary: true, ..SamplingParams::default() };
        let a = sample_episode(&scene, 11, EpisodeKind::ObjectNav, &p).unwrap();
        assert_eq!(a, sample_episode(&scene, 11, EpisodeKind::ObjectNav, &p).unwrap());
        assert_eq!(a.task, Task::ObjectNav { category: cat, open_vocabulary: true });
    }

    #[test]
    fn impossible_distance_fails() {
        let scene = generate_scene(5, &SceneParams::default()).unwrap();
        let p = SamplingParams { min_geodesic: 500.0, max_attempts: 3, ..SamplingParams::default() };
        assert!(matches!(sample_episode(&scene, 1, EpisodeKind::ImageNav, &p), Err(NavError::SamplingFailed(_))));
    }
}
