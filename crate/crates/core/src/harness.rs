//! The closed-loop episode runtime and the SR/SPL metrics.
//!
//! Each step: scan and integrate, extract frontiers, check the goal
//! detector, ask the policy for a frontier when the replan trigger fires,
//! and drive one action toward the chosen waypoint (or the detected goal
//! point) with the local controller.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::mapping::{integrate_scan, Frontier, FrontierTracker, OccupancyGrid, ViewRecord, DEFAULT_MIN_FRONTIER_CELLS};
use crate::math::Vec2;
use crate::planning::{local_controller_step, nearest_frontier, ControllerConfig, GoalField};
use crate::policy::{build_prompt_sample, DecisionContext, FrontierPolicy, PromptConfig, PromptSample};
use crate::world::{
    apply_action, oracle_detect_goal, raycast_depth, Action, ActionConfig, EpisodeSpec, Pose, Scene, SensorConfig,
};

/// When the policy is consulted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplanTrigger {
    /// The set of frontier ids changed, the target vanished or was reached.
    OnFrontierChangeOrArrival,
    EveryStep,
    /// Every `n` steps, or earlier when the target vanished or was reached.
    EveryNSteps(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuccessMode {
    /// Straight-line distance to the nearest goal cell boundary.
    Euclidean,
    /// True-map geodesic distance to the goal seed cells.
    Geodesic,
}

/// Loop settings. The fallback policy is always nearest-frontier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RuntimeConfig {
    pub replan: ReplanTrigger,
    pub sensor: SensorConfig,
    pub action: ActionConfig,
    pub prompt: PromptConfig,
    pub controller: ControllerConfig,
    pub min_frontier_cells: usize,
    pub match_radius: i32,
    /// A frontier counts as reached within this many meters of its waypoint.
    pub arrival_radius: f64,
    /// Consecutive controller failures before giving up.
    pub stuck_limit: u32,
    pub success_mode: SuccessMode,
}

impl Default for RuntimeConfig {
    fn default() -> Self {
        Self {
            replan: ReplanTrigger::OnFrontierChangeOrArrival,
            sensor: SensorConfig::default(),
            action: ActionConfig::default(),
            prompt: PromptConfig::default(),
            controller: ControllerConfig::default(),
            min_frontier_cells: DEFAULT_MIN_FRONTIER_CELLS,
            match_radius: 2,
            arrival_radius: 0.3,
            stuck_limit: 3,
            success_mode: SuccessMode::Euclidean,
        }
    }
}

impl RuntimeConfig {
    pub fn validate(&self) -> Result<()> {
        self.sensor.validate()?;
        self.action.validate()?;
        if self.prompt.max_history_frames == 0 || self.prompt.letters.is_empty() {
            return Err(NavError::InvalidConfig("prompt needs history frames and letters".into()));
        }
        if self.replan == ReplanTrigger::EveryNSteps(0) {
            return Err(NavError::InvalidConfig("replan every n steps needs n >= 1".into()));
        }
        if self.stuck_limit == 0 {
            return Err(NavError::InvalidConfig("stuck_limit must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    StoppedSuccess,
    StoppedFar,
    Timeout,
    Stuck,
    /// The episode could not run (invalid start, unreachable goal).
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum StepEvent {
    Decision {
        step: u32,
        letter: String,
        frontier_id: u32,
        /// Why the fallback policy answered instead, if it did.
        fallback: Option<String>,
    },
    Collision {
        step: u32,
    },
    ControllerStuck {
        step: u32,
    },
    GoalDetected {
        step: u32,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub episode_id: String,
    pub success: bool,
    /// P_i: summed realized translation, meters.
    pub agent_path_length: f64,
    /// L_i: geodesic start-to-goal distance, meters.
    pub shortest_path_length: f64,
    pub steps: u32,
    pub termination: Termination,
    pub per_step_log: Vec<StepEvent>,
    pub error: Option<String>,
}

impl EpisodeResult {
    /// A result carrying only what the metrics read.
    pub fn bare(success: bool, shortest_path_length: f64, agent_path_length: f64) -> Self {
        Self {
            episode_id: String::new(),
            success,
            agent_path_length,
            shortest_path_length,
            steps: 0,
            termination: if success { Termination::StoppedSuccess } else { Termination::StoppedFar },
            per_step_log: Vec::new(),
            error: None,
        }
    }

    pub fn failed(episode_id: String, err: &NavError) -> Self {
        Self {
            episode_id,
            success: false,
            agent_path_length: 0.0,
            shortest_path_length: 0.0,
            steps: 0,
            termination: Termination::Error,
            per_step_log: Vec::new(),
            error: Some(err.to_string()),
        }
    }

    /// S_i * L_i / max(P_i, L_i).
    pub fn spl_term(&self) -> f64 {
        if !self.success {
            return 0.0;
        }
        let denom = self.agent_path_length.max(self.shortest_path_length);
        if denom <= 0.0 {
            1.0
        } else {
            self.shortest_path_length / denom
        }
    }
}

pub fn compute_sr(results: &[EpisodeResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(NavError::EmptyBenchmark);
    }
    Ok(results.iter().filter(|r| r.success).count() as f64 / results.len() as f64)
}

pub fn compute_spl(results: &[EpisodeResult]) -> Result<f64> {
    if results.is_empty() {
        return Err(NavError::EmptyBenchmark);
    }
    Ok(results.iter().map(EpisodeResult::spl_term).sum::<f64>() / results.len() as f64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolicyReport {
    pub name: String,
    pub sr: f64,
    pub spl: f64,
    pub mean_steps: f64,
    pub episodes: Vec<EpisodeResult>,
}

impl PolicyReport {
    pub fn new(name: String, episodes: Vec<EpisodeResult>) -> Result<Self> {
        let sr = compute_sr(&episodes)?;
        let spl = compute_spl(&episodes)?;
        let mean_steps = episodes.iter().map(|e| e.steps as f64).sum::<f64>() / episodes.len() as f64;
        Ok(Self { name, sr, spl, mean_steps, episodes })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkReport {
    pub config_hash: String,
    pub seeds: Vec<u64>,
    pub policies: Vec<PolicyReport>,
}

/// What the runtime hands to a [`StepObserver`] whenever a prompt sample
/// exists for the current step.
pub struct DecisionPoint<'a> {
    pub step: u32,
    pub sample: &'a PromptSample,
    /// Frontiers behind the sample's choices.
    pub frontiers: &'a [Frontier],
    pub belief: &'a OccupancyGrid,
    pub pose: Pose,
    pub goal_field: &'a GoalField,
    /// Whether the policy was consulted at this step.
    pub decided: bool,
}

/// Hook into the loop, used by dataset generation.
pub trait StepObserver {
    /// Build a sample even on steps where the policy is not consulted.
    fn every_step(&self) -> bool {
        false
    }

    fn on_sample(&mut self, _point: &DecisionPoint<'_>) {}
}

impl StepObserver for () {}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Target {
    None,
    Frontier(u32),
    Goal(Vec2),
}

/// Step-wise episode state. [`run_episode`] drives it to completion; tests
/// may call [`EpisodeRunner::observe`] and [`EpisodeRunner::act`] directly to
/// script actions.
pub struct EpisodeRunner<'a> {
    scene: &'a Scene,
    episode: &'a EpisodeSpec,
    cfg: &'a RuntimeConfig,
    goal_field: GoalField,
    belief: OccupancyGrid,
    pose: Pose,
    tracker: FrontierTracker,
    history: Vec<ViewRecord>,
    frontiers: Vec<Frontier>,
    target: Target,
    blacklist: Vec<u32>,
    last_ids: Vec<u32>,
    last_decision: Option<u32>,
    stuck_run: u32,
    steps: u32,
    path_length: f64,
    shortest: f64,
    log: Vec<StepEvent>,
    done: Option<Termination>,
}

impl<'a> EpisodeRunner<'a> {
    pub fn new(scene: &'a Scene, episode: &'a EpisodeSpec, cfg: &'a RuntimeConfig) -> Result<Self> {
        cfg.validate()?;
        if !scene.pose_is_free(&episode.start) {
            return Err(NavError::InvalidPose);
        }
        let goal_field = GoalField::new(scene, &episode.task)?;
        let shortest = goal_field.distance(episode.start.cell(scene.resolution));
        if !shortest.is_finite() {
            return Err(NavError::Unreachable);
        }
        Ok(Self {
            scene,
            episode,
            cfg,
            goal_field,
            belief: OccupancyGrid::for_scene(scene),
            pose: episode.start,
            tracker: FrontierTracker::new(cfg.min_frontier_cells, cfg.match_radius),
            history: Vec::new(),
            frontiers: Vec::new(),
            target: Target::None,
            blacklist: Vec::new(),
            last_ids: Vec::new(),
            last_decision: None,
            stuck_run: 0,
            steps: 0,
            path_length: 0.0,
            shortest,
            log: Vec::new(),
            done: None,
        })
    }

    pub fn pose(&self) -> Pose {
        self.pose
    }

    pub fn belief(&self) -> &OccupancyGrid {
        &self.belief
    }

    pub fn frontiers(&self) -> &[Frontier] {
        &self.frontiers
    }

    pub fn history(&self) -> &[ViewRecord] {
        &self.history
    }

    pub fn steps(&self) -> u32 {
        self.steps
    }

    pub fn termination(&self) -> Option<Termination> {
        self.done
    }

    /// Sense at the current pose: integrate a scan, record the frame,
    /// refresh frontiers and the goal detector.
    pub fn observe(&mut self) -> Result<()> {
        let scan = raycast_depth(self.scene, &self.pose, &self.cfg.sensor);
        integrate_scan(&mut self.belief, &scan)?;
        self.history.push(ViewRecord { frame_index: self.steps, pose: self.pose });
        self.frontiers = self.tracker.update(&self.belief);
        if let Some(p) = oracle_detect_goal(self.scene, &self.pose, &self.episode.task, &self.cfg.sensor)? {
            if !matches!(self.target, Target::Goal(_)) {
                self.log.push(StepEvent::GoalDetected { step: self.steps });
            }
            self.target = Target::Goal(p);
        }
        Ok(())
    }

    /// Execute one action and account for it. `Stop` ends the episode.
    pub fn act(&mut self, action: Action) -> Result<()> {
        if self.done.is_some() {
            return Ok(());
        }
        let out = apply_action(self.pose, action, self.scene, &self.cfg.action)?;
        self.path_length += out.pose.position().dist(self.pose.position());
        self.pose = out.pose;
        if out.collided {
            self.log.push(StepEvent::Collision { step: self.steps });
        }
        self.steps += 1;
        if action == Action::Stop {
            self.done = Some(if self.at_goal()? { Termination::StoppedSuccess } else { Termination::StoppedFar });
        } else if self.steps >= self.episode.max_steps {
            self.done = Some(Termination::Timeout);
        }
        Ok(())
    }

    fn at_goal(&self) -> Result<bool> {
        let r = self.episode.success_radius;
        Ok(match self.cfg.success_mode {
            SuccessMode::Euclidean => self.scene.goal_distance_euclidean(self.pose.position(), &self.episode.task)? <= r,
            SuccessMode::Geodesic => self.goal_field.distance(self.pose.cell(self.scene.resolution)) <= r,
        })
    }

    /// One full step with `policy` choosing frontiers.
    pub fn step(&mut self, policy: &mut dyn FrontierPolicy, observer: &mut dyn StepObserver) -> Result<()> {
        if self.done.is_some() {
            return Ok(());
        }
        self.observe()?;
        let action = match self.target {
            Target::Goal(p) => {
                if p.dist(self.pose.position()) <= self.episode.success_radius {
                    Some(Action::Stop)
                } else {
                    self.drive(p)
                }
            }
            _ => self.explore(policy, observer)?,
        };
        match action {
            Some(a) => self.act(a),
            None => {
                self.done = Some(Termination::Stuck);
                Ok(())
            }
        }
    }

    /// Controller toward `p`; `None` once the stuck budget is spent.
    fn drive(&mut self, p: Vec2) -> Option<Action> {
        loop {
            match local_controller_step(&self.belief, &self.pose, p, &self.cfg.action, &self.cfg.controller) {
                Ok(a) => {
                    self.stuck_run = 0;
                    return Some(a);
                }
                Err(_) => {
                    self.log.push(StepEvent::ControllerStuck { step: self.steps });
                    self.stuck_run += 1;
                    if self.stuck_run >= self.cfg.stuck_limit {
                        return None;
                    }
                    if !matches!(self.target, Target::Goal(_)) {
                        return None;
                    }
                }
            }
        }
    }

    fn candidates(&self) -> Vec<Frontier> {
        let open: Vec<Frontier> =
            self.frontiers.iter().filter(|f| !self.blacklist.contains(&f.id)).cloned().collect();
        let mut cands = if open.is_empty() { self.frontiers.clone() } else { open };
        let max = self.cfg.prompt.letters.len();
        if cands.len() > max {
            // keep the closest ones in belief space
            let field = crate::planning::belief_distance_field(&self.belief, self.pose.cell(self.belief.resolution));
            cands.sort_by(|a, b| field.get(a.waypoint_cell).total_cmp(&field.get(b.waypoint_cell)).then(a.id.cmp(&b.id)));
            cands.truncate(max);
            cands.sort_by_key(|f| f.id);
        }
        cands
    }

    fn explore(&mut self, policy: &mut dyn FrontierPolicy, observer: &mut dyn StepObserver) -> Result<Option<Action>> {
        if let Target::Frontier(id) = self.target {
            let here = self.pose.position();
            match self.frontiers.iter().find(|f| f.id == id) {
                Some(f) if f.waypoint.dist(here) <= self.cfg.arrival_radius => {
                    self.blacklist.push(id);
                    self.target = Target::None;
                }
                None => self.target = Target::None,
                _ => {}
            }
        }
        if self.frontiers.is_empty() {
            return Ok(None);
        }
        loop {
            let mut cands = self.candidates();
            let ids: Vec<u32> = self.frontiers.iter().map(|f| f.id).collect();
            let need = match (self.target, self.cfg.replan) {
                (Target::Frontier(_), ReplanTrigger::OnFrontierChangeOrArrival) => ids != self.last_ids,
                (Target::Frontier(_), ReplanTrigger::EveryStep) => true,
                (Target::Frontier(_), ReplanTrigger::EveryNSteps(n)) => {
                    self.last_decision.map_or(true, |s| self.steps - s >= n)
                }
                _ => true,
            };
            if need || observer.every_step() {
                let sample = build_prompt_sample(
                    &self.history,
                    &cands,
                    &self.episode.task,
                    &self.belief,
                    &self.cfg.sensor,
                    &self.cfg.prompt,
                )?;
                observer.on_sample(&DecisionPoint {
                    step: self.steps,
                    sample: &sample,
                    frontiers: &cands,
                    belief: &self.belief,
                    pose: self.pose,
                    goal_field: &self.goal_field,
                    decided: need,
                });
                if need {
                    let id = self.consult(policy, &sample, &cands);
                    self.target = Target::Frontier(id);
                    self.last_ids = ids;
                    self.last_decision = Some(self.steps);
                }
            }
            let Target::Frontier(id) = self.target else { unreachable!() };
            let wp = cands.iter().chain(&self.frontiers).find(|f| f.id == id).map(|f| f.waypoint).unwrap();
            match local_controller_step(&self.belief, &self.pose, wp, &self.cfg.action, &self.cfg.controller) {
                Ok(a) => {
                    self.stuck_run = 0;
                    return Ok(Some(a));
                }
                Err(_) => {
                    self.log.push(StepEvent::ControllerStuck { step: self.steps });
                    self.stuck_run += 1;
                    self.blacklist.push(id);
                    self.target = Target::None;
                    if self.stuck_run >= self.cfg.stuck_limit {
                        return Ok(None);
                    }
                    cands.retain(|f| f.id != id);
                }
            }
        }
    }

    /// Ask the policy; on any failure or an invalid letter, fall back to the
    /// nearest frontier and log why.
    fn consult(&mut self, policy: &mut dyn FrontierPolicy, sample: &PromptSample, cands: &[Frontier]) -> u32 {
        let ctx = DecisionContext {
            scene: self.scene,
            belief: &self.belief,
            pose: self.pose,
            task: &self.episode.task,
            frontiers: cands,
            goal_field: Some(&self.goal_field),
            step: self.steps,
        };
        let fallback = match policy.decide(sample, &ctx) {
            Ok(d) => match sample.frontier_for(&d.letter) {
                Some(id) => {
                    self.log.push(StepEvent::Decision { step: self.steps, letter: d.letter, frontier_id: id, fallback: None });
                    return id;
                }
                None => format!("invalid choice {:?}", d.letter),
            },
            Err(e) => e.to_string(),
        };
        let id = nearest_frontier(&self.belief, self.pose.cell(self.belief.resolution), cands).unwrap_or(cands[0].id);
        let letter = sample.letter_for(id).unwrap_or("A").to_string();
        self.log.push(StepEvent::Decision { step: self.steps, letter, frontier_id: id, fallback: Some(fallback) });
        id
    }

    pub fn finish(self) -> EpisodeResult {
        let termination = self.done.unwrap_or(Termination::Timeout);
        EpisodeResult {
            episode_id: self.episode.id(),
            success: termination == Termination::StoppedSuccess,
            agent_path_length: self.path_length,
            shortest_path_length: self.shortest,
            steps: self.steps,
            termination,
            per_step_log: self.log,
            error: None,
        }
    }
}

/// Run one episode to termination.
pub fn run_episode(
    scene: &Scene,
    episode: &EpisodeSpec,
    policy: &mut dyn FrontierPolicy,
    cfg: &RuntimeConfig,
) -> Result<EpisodeResult> {
    run_episode_observed(scene, episode, policy, cfg, &mut ()).map(|(r, _)| r)
}

/// [`run_episode`] with an observer; also returns the captured frames.
pub fn run_episode_observed(
    scene: &Scene,
    episode: &EpisodeSpec,
    policy: &mut dyn FrontierPolicy,
    cfg: &RuntimeConfig,
    observer: &mut dyn StepObserver,
) -> Result<(EpisodeResult, Vec<ViewRecord>)> {
    let mut runner = EpisodeRunner::new(scene, episode, cfg)?;
    while runner.termination().is_none() {
        runner.step(policy, observer)?;
    }
    let history = core::mem::take(&mut runner.history);
    Ok((runner.finish(), history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{BuiltinPolicy, PolicyDecision};
    use crate::world::{generate_scene, sample_episode, EpisodeKind, SamplingParams, SceneParams};
    use crate::error::PolicyError;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn spl_examples() {
        assert!(close(compute_spl(&[EpisodeResult::bare(true, 4.0, 4.0)]).unwrap(), 1.0));
        assert!(close(compute_spl(&[EpisodeResult::bare(true, 4.0, 8.0)]).unwrap(), 0.5));
        let pair = [EpisodeResult::bare(true, 4.0, 8.0), EpisodeResult::bare(false, 4.0, 8.0)];
        assert!(close(compute_sr(&pair).unwrap(), 0.5));
        assert!(close(compute_spl(&pair).unwrap(), 0.25));
        assert!(close(compute_spl(&[EpisodeResult::bare(true, 4.0, 3.0)]).unwrap(), 1.0));
        assert_eq!(compute_sr(&[]), Err(NavError::EmptyBenchmark));
    }

    fn episode(seed: u64) -> (Scene, EpisodeSpec) {
        let scene = generate_scene(seed, &SceneParams::default()).unwrap();
        let ep = sample_episode(&scene, seed, EpisodeKind::ObjectNav, &SamplingParams::default()).unwrap();
        (scene, ep)
    }

    #[test]
    fn oracle_reaches_the_goal() {
        let cfg = RuntimeConfig::default();
        for seed in 0..4 {
            let (scene, ep) = episode(seed);
            let r = run_episode(&scene, &ep, &mut BuiltinPolicy::GroundTruthOracle, &cfg).unwrap();
            assert_eq!(r.termination, Termination::StoppedSuccess, "seed {seed}: {r:?}");
            assert!(r.steps <= 500);
            assert!(r.spl_term() <= 1.0);
        }
    }

    #[test]
    fn never_stopping_times_out() {
        let (scene, ep) = episode(1);
        let cfg = RuntimeConfig::default();
        let mut run = EpisodeRunner::new(&scene, &ep, &cfg).unwrap();
        while run.termination().is_none() {
            run.observe().unwrap();
            run.act(Action::TurnLeft).unwrap();
        }
        let r = run.finish();
        assert_eq!((r.termination, r.steps, r.success), (Termination::Timeout, 500, false));
    }

    #[test]
    fn stop_far_from_goal() {
        let (scene, ep) = episode(2);
        let cfg = RuntimeConfig::default();
        let mut run = EpisodeRunner::new(&scene, &ep, &cfg).unwrap();
        assert!(scene.goal_distance_euclidean(ep.start.position(), &ep.task).unwrap() > 1.0);
        run.act(Action::Stop).unwrap();
        let r = run.finish();
        assert_eq!((r.termination, r.success), (Termination::StoppedFar, false));
    }

    struct Broken;

    impl FrontierPolicy for Broken {
        fn name(&self) -> String {
            "broken".into()
        }
        fn decide(&mut self, _: &PromptSample, _: &DecisionContext<'_>) -> core::result::Result<PolicyDecision, PolicyError> {
            Ok(PolicyDecision { letter: "Z".into(), latency_ms: 0.0 })
        }
    }

    #[test]
    fn invalid_letters_fall_back_and_are_logged() {
        let (scene, ep) = episode(3);
        let cfg = RuntimeConfig::default();
        let r = run_episode(&scene, &ep, &mut Broken, &cfg).unwrap();
        let decisions: Vec<&StepEvent> = r.per_step_log.iter().filter(|e| matches!(e, StepEvent::Decision { .. })).collect();
        assert!(!decisions.is_empty());
        assert!(decisions.iter().all(|e| matches!(e, StepEvent::Decision { fallback: Some(_), .. })));
    }

    struct Provenance {
        ok: bool,
        seen: usize,
    }

    impl StepObserver for Provenance {
        fn on_sample(&mut self, p: &DecisionPoint<'_>) {
            self.seen += 1;
            let ids: Vec<u32> = p.frontiers.iter().map(|f| f.id).collect();
            self.ok &= p.sample.history.iter().all(|v| v.frame_index <= p.step);
            self.ok &= p.sample.choices.iter().all(|c| c.view.frame_index <= p.step && ids.contains(&c.frontier_id));
        }
    }

    #[test]
    fn views_come_from_the_past_and_letters_from_current_frontiers() {
        let (scene, ep) = episode(5);
        let cfg = RuntimeConfig { replan: ReplanTrigger::EveryNSteps(4), ..RuntimeConfig::default() };
        let mut obs = Provenance { ok: true, seen: 0 };
        run_episode_observed(&scene, &ep, &mut BuiltinPolicy::NearestFrontier, &cfg, &mut obs).unwrap();
        assert!(obs.ok && obs.seen > 0);
    }
}
