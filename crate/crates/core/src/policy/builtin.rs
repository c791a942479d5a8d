use alloc::borrow::Cow;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::PolicyError;
use crate::mapping::Frontier;
use crate::planning::{nearest_frontier, GoalField, OracleConfig};

use super::{DecisionContext, FrontierPolicy, PolicyDecision, PromptSample};

fn decision(sample: &PromptSample, id: u32) -> Result<PolicyDecision, PolicyError> {
    let letter = sample.letter_for(id).ok_or_else(|| PolicyError::InvalidChoice(format!("frontier {id}")))?;
    Ok(PolicyDecision { letter: letter.to_string(), latency_ms: 0.0 })
}

/// Frontiers offered by the sample, in choice order.
fn offered<'a>(sample: &PromptSample, ctx: &DecisionContext<'a>) -> Vec<&'a Frontier> {
    sample
        .choices
        .iter()
        .filter_map(|c| ctx.frontiers.iter().find(|f| f.id == c.frontier_id))
        .collect()
}

fn goal_field<'a>(ctx: &DecisionContext<'a>) -> Result<Cow<'a, GoalField>, PolicyError> {
    match ctx.goal_field {
        Some(f) => Ok(Cow::Borrowed(f)),
        None => GoalField::new(ctx.scene, ctx.task)
            .map(Cow::Owned)
            .map_err(|e| PolicyError::Endpoint(e.to_string())),
    }
}

/// Shortest belief-space path to the waypoint.
#[derive(Clone, Copy, Debug, Default)]
pub struct NearestFrontier;

impl FrontierPolicy for NearestFrontier {
    fn name(&self) -> String {
        "nearest".into()
    }

    fn decide(&mut self, sample: &PromptSample, ctx: &DecisionContext<'_>) -> Result<PolicyDecision, PolicyError> {
        let fs: Vec<Frontier> = offered(sample, ctx).into_iter().cloned().collect();
        let id = nearest_frontier(ctx.belief, ctx.pose.cell(ctx.belief.resolution), &fs)
            .ok_or_else(|| PolicyError::InvalidChoice("no choices".into()))?;
        decision(sample, id)
    }
}

/// Uniform over the choices. The draw depends only on the seed and the
/// latest history frame, so replaying a sample reproduces the letter.
#[derive(Clone, Copy, Debug)]
pub struct RandomPolicy {
    pub seed: u64,
}

impl FrontierPolicy for RandomPolicy {
    fn name(&self) -> String {
        format!("random:{}", self.seed)
    }

    fn decide(&mut self, sample: &PromptSample, _ctx: &DecisionContext<'_>) -> Result<PolicyDecision, PolicyError> {
        if sample.choices.is_empty() {
            return Err(PolicyError::InvalidChoice("no choices".into()));
        }
        let frame = sample.history.last().map_or(0, |v| v.frame_index) as u64;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ frame.wrapping_mul(0x9E37_79B9_7F4A_7C15));
        let k = rng.random_range(0..sample.choices.len());
        Ok(PolicyDecision { letter: sample.choices[k].letter.clone(), latency_ms: 0.0 })
    }
}

/// Always the correct frontier (ground truth). Keys on frontier ids, so the
/// lettering does not matter.
#[derive(Clone, Copy, Debug, Default)]
pub struct GroundTruthOracle;

impl FrontierPolicy for GroundTruthOracle {
    fn name(&self) -> String {
        "oracle".into()
    }

    fn decide(&mut self, sample: &PromptSample, ctx: &DecisionContext<'_>) -> Result<PolicyDecision, PolicyError> {
        let field = goal_field(ctx)?;
        let fs: Vec<Frontier> = offered(sample, ctx).into_iter().cloned().collect();
        let id = field
            .label(ctx.belief, ctx.pose.cell(ctx.belief.resolution), &fs)
            .map_err(|e| PolicyError::InvalidChoice(e.to_string()))?;
        decision(sample, id)
    }
}

/// The data-generation expert: nearest frontier until the goal is within
/// the switch distance, then the correct frontier.
#[derive(Clone, Copy, Debug, Default)]
pub struct GreedyOracle {
    pub cfg: OracleConfig,
}

impl FrontierPolicy for GreedyOracle {
    fn name(&self) -> String {
        "greedy".into()
    }

    fn decide(&mut self, sample: &PromptSample, ctx: &DecisionContext<'_>) -> Result<PolicyDecision, PolicyError> {
        let field = goal_field(ctx)?;
        let fs: Vec<Frontier> = offered(sample, ctx).into_iter().cloned().collect();
        let id = crate::planning::greedy_with_field(&field, ctx.belief, ctx.pose.cell(ctx.belief.resolution), &fs, &self.cfg)
            .map_err(|e| PolicyError::InvalidChoice(e.to_string()))?;
        decision(sample, id)
    }
}

/// The in-process policies, selectable by name.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum BuiltinPolicy {
    NearestFrontier,
    Random(u64),
    GroundTruthOracle,
    GreedyOracle(OracleConfig),
}

impl FrontierPolicy for BuiltinPolicy {
    fn name(&self) -> String {
        match self {
            BuiltinPolicy::NearestFrontier => NearestFrontier.name(),
            BuiltinPolicy::Random(seed) => RandomPolicy { seed: *seed }.name(),
            BuiltinPolicy::GroundTruthOracle => GroundTruthOracle.name(),
            BuiltinPolicy::GreedyOracle(cfg) => GreedyOracle { cfg: *cfg }.name(),
        }
    }

    fn decide(&mut self, sample: &PromptSample, ctx: &DecisionContext<'_>) -> Result<PolicyDecision, PolicyError> {
        match self {
            BuiltinPolicy::NearestFrontier => NearestFrontier.decide(sample, ctx),
            BuiltinPolicy::Random(seed) => RandomPolicy { seed: *seed }.decide(sample, ctx),
            BuiltinPolicy::GroundTruthOracle => GroundTruthOracle.decide(sample, ctx),
            BuiltinPolicy::GreedyOracle(cfg) => GreedyOracle { cfg: *cfg }.decide(sample, ctx),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;
    use crate::mapping::{extract_frontiers, integrate_scan, OccupancyGrid, ViewRecord};
    use crate::planning::label_correct_frontier;
    use crate::policy::{build_prompt_sample, PromptConfig};
    use crate::world::{generate_scene, raycast_depth, sample_episode, EpisodeKind, Pose, SamplingParams, SceneParams, SensorConfig};
    use alloc::vec;

    struct Setup {
        scene: crate::world::Scene,
        belief: OccupancyGrid,
        pose: Pose,
        task: crate::world::Task,
        frontiers: Vec<Frontier>,
        history: Vec<ViewRecord>,
    }

    fn setup(seed: u64) -> Setup {
        let scene = generate_scene(seed, &SceneParams::default()).unwrap();
        let ep = sample_episode(&scene, seed, EpisodeKind::ObjectNav, &SamplingParams::default()).unwrap();
        let mut belief = OccupancyGrid::for_scene(&scene);
        let mut history = Vec::new();
        for k in 0..12u32 {
            let pose = Pose::new(ep.start.x, ep.start.y, ep.start.heading + 30.0 * k as f64);
            integrate_scan(&mut belief, &raycast_depth(&scene, &pose, &SensorConfig::default())).unwrap();
            history.push(ViewRecord { frame_index: k, pose });
        }
        let frontiers = extract_frontiers(&belief, 3);
        Setup { scene, belief, pose: history.last().unwrap().pose, task: ep.task, frontiers, history }
    }

    fn ctx(s: &Setup) -> DecisionContext<'_> {
        DecisionContext { scene: &s.scene, belief: &s.belief, pose: s.pose, task: &s.task, frontiers: &s.frontiers, goal_field: None, step: 12 }
    }

    fn sample(s: &Setup, fs: &[Frontier]) -> PromptSample {
        build_prompt_sample(&s.history, fs, &s.task, &s.belief, &SensorConfig::default(), &PromptConfig::default()).unwrap()
    }

    #[test]
    fn forced_move_for_every_policy() {
        let s = setup(1);
        let one = vec![s.frontiers[0].clone()];
        let smp = sample(&s, &one);
        let c = DecisionContext { frontiers: &one, ..ctx(&s) };
        for mut p in [BuiltinPolicy::NearestFrontier, BuiltinPolicy::Random(3), BuiltinPolicy::GroundTruthOracle, BuiltinPolicy::GreedyOracle(OracleConfig::default())] {
            assert_eq!(p.decide(&smp, &c).unwrap().letter, "A");
        }
    }

    #[test]
    fn random_is_reproducible() {
        let s = setup(2);
        let smp = sample(&s, &s.frontiers);
        let a = RandomPolicy { seed: 7 }.decide(&smp, &ctx(&s)).unwrap();
        let b = RandomPolicy { seed: 7 }.decide(&smp, &ctx(&s)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oracle_letter_matches_independent_label() {
        for seed in 0..6 {
            let s = setup(seed);
            if s.frontiers.is_empty() {
                continue;
            }
            let smp = sample(&s, &s.frontiers);
            let got = GroundTruthOracle.decide(&smp, &ctx(&s)).unwrap().letter;
            let id = label_correct_frontier(&s.scene, &s.belief, s.pose.cell(0.1), &s.frontiers, &s.task).unwrap();
            assert_eq!(Some(got.as_str()), smp.letter_for(id));
        }
    }

    #[test]
    fn oracle_ignores_lettering() {
        let s = setup(4);
        if s.frontiers.len() < 2 {
            return;
        }
        let smp = sample(&s, &s.frontiers);
        let base = GroundTruthOracle.decide(&smp, &ctx(&s)).unwrap().letter;
        let base_id = smp.frontier_for(&base).unwrap();
        // reverse the letter assignment
        let mut shuffled = smp.clone();
        let letters: Vec<String> = shuffled.choices.iter().map(|c| c.letter.clone()).rev().collect();
        for (c, l) in shuffled.choices.iter_mut().zip(letters) {
            c.letter = l;
        }
        let l = GroundTruthOracle.decide(&shuffled, &ctx(&s)).unwrap().letter;
        assert_eq!(shuffled.frontier_for(&l), Some(base_id));
    }

    #[test]
    fn nearest_matches_min_distance() {
        let s = setup(5);
        if s.frontiers.is_empty() {
            return;
        }
        let smp = sample(&s, &s.frontiers);
        let l = NearestFrontier.decide(&smp, &ctx(&s)).unwrap().letter;
        let id = smp.frontier_for(&l).unwrap();
        let here: Cell = s.pose.cell(0.1);
        let d = |f: &Frontier| {
            crate::planning::grid_shortest_path(&s.belief, here, f.waypoint_cell, crate::planning::UnknownAs::Free, 0.0)
                .map(|p| p.length)
                .unwrap_or(f64::INFINITY)
        };
        let best = s.frontiers.iter().map(d).fold(f64::INFINITY, f64::min);
        let chosen = s.frontiers.iter().find(|f| f.id == id).unwrap();
        assert!((d(chosen) - best).abs() < 1e-9);
    }
}
