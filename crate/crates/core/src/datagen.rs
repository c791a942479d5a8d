//! Supervised data: oracle rollouts recorded as lettered frontier-choice
//! samples, and the auxiliary spatial-reasoning samples.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{NavError, Result};
use crate::harness::{run_episode_observed, DecisionPoint, EpisodeResult, RuntimeConfig, StepObserver};
use crate::mapping::ViewRecord;
use crate::math::{heading_vec, round_tenth, Vec2};
use crate::planning::OracleConfig;
use crate::policy::{subsample_indices, GreedyOracle, PromptSample};
use crate::world::{EpisodeSpec, Pose, Scene};

pub const AUX_TASK_KIND: &str = "aux_spatial";

/// The auxiliary question with the local coordinates substituted.
pub fn aux_question(x: f64, y: f64) -> String {
    format!("Which part of the environment is located at ({x:.1},{y:.1})?")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxCandidate {
    pub letter: String,
    pub view: ViewRecord,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxSample {
    pub history: Vec<ViewRecord>,
    /// Local-frame coordinates of the true candidate at the last history
    /// frame, rounded to 0.1 m.
    pub query_xy: [f64; 2],
    pub question: String,
    pub candidates: Vec<AuxCandidate>,
}

impl AuxSample {
    pub fn anchor(&self) -> &ViewRecord {
        self.history.last().expect("aux history is never empty")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SamplePrompt {
    Navigation(PromptSample),
    Aux(AuxSample),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingSample {
    pub sample_id: String,
    /// `objectnav`, `ovon`, `imagenav` or `aux_spatial`.
    pub task_kind: String,
    pub prompt: SamplePrompt,
    pub answer: String,
}

impl TrainingSample {
    /// The answer names one of the offered letters.
    pub fn is_consistent(&self) -> bool {
        match &self.prompt {
            SamplePrompt::Navigation(p) => p.has_letter(&self.answer) && p.answer.as_deref() == Some(self.answer.as_str()),
            SamplePrompt::Aux(a) => a.candidates.iter().filter(|c| c.letter == self.answer).count() == 1,
        }
    }
}

/// Rotate-translate `target` into the frame at `current`: +x along the
/// heading, +y 90 degrees counterclockwise from it.
pub fn relative_coords(current: &Pose, target: Vec2) -> Vec2 {
    let d = target - current.position();
    let fwd = heading_vec(current.heading);
    Vec2::new(d.dot(fwd), d.dot(fwd.perp()))
}

/// Inverse of [`relative_coords`].
pub fn world_from_relative(current: &Pose, local: Vec2) -> Vec2 {
    let fwd = heading_vec(current.heading);
    current.position() + fwd * local.x + fwd.perp() * local.y
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RolloutConfig {
    pub runtime: RuntimeConfig,
    pub oracle: OracleConfig,
    /// Emit a sample at every step, not only where the policy is consulted.
    pub every_step: bool,
}

impl Default for RolloutConfig {
    fn default() -> Self {
        Self { runtime: RuntimeConfig::default(), oracle: OracleConfig::default(), every_step: false }
    }
}

#[derive(Clone, Debug)]
pub struct Rollout {
    /// Every captured frame, in order.
    pub trajectory: Vec<ViewRecord>,
    pub samples: Vec<TrainingSample>,
    pub result: EpisodeResult,
}

struct Recorder {
    episode_id: String,
    every_step: bool,
    samples: Vec<TrainingSample>,
}

impl StepObserver for Recorder {
    fn every_step(&self) -> bool {
        self.every_step
    }

    fn on_sample(&mut self, p: &DecisionPoint<'_>) {
        if !(p.decided || self.every_step) {
            return;
        }
        // a label that cannot be computed yields no sample
        let Ok(id) = p.goal_field.label(p.belief, p.pose.cell(p.belief.resolution), p.frontiers) else { return };
        let Some(letter) = p.sample.letter_for(id) else { return };
        let mut prompt = p.sample.clone();
        prompt.answer = Some(letter.to_string());
        self.samples.push(TrainingSample {
            sample_id: format!("{}_t{:04}", self.episode_id, p.step),
            task_kind: prompt.task_kind.clone(),
            answer: letter.to_string(),
            prompt: SamplePrompt::Navigation(prompt),
        });
    }
}

/// Drive the episode with the greedy exploration oracle and record, at
/// each decision step, the prompt sample labeled with the correct frontier.
pub fn rollout_and_record(scene: &Scene, episode: &EpisodeSpec, cfg: &RolloutConfig) -> Result<Rollout> {
    let mut rec = Recorder { episode_id: episode.id(), every_step: cfg.every_step, samples: Vec::new() };
    let mut policy = GreedyOracle { cfg: cfg.oracle };
    let (result, trajectory) = run_episode_observed(scene, episode, &mut policy, &cfg.runtime, &mut rec)?;
    Ok(Rollout { trajectory, samples: rec.samples, result })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuxParams {
    pub candidates_per_sample: usize,
    pub match_tolerance: f64,
    pub distractor_separation: f64,
    pub samples_per_trajectory: usize,
    /// Candidates come from this many frames before the anchor.
    pub segment_frames: usize,
    pub max_history_frames: usize,
    pub seed: u64,
}

impl Default for AuxParams {
    fn default() -> Self {
        Self {
            candidates_per_sample: 4,
            match_tolerance: 0.3,
            distractor_separation: 1.0,
            samples_per_trajectory: 4,
            segment_frames: 80,
            max_history_frames: 20,
            seed: 0,
        }
    }
}

/// Auxiliary samples from a recorded trajectory. `id_prefix` names the
/// source episode.
pub fn generate_aux_samples(trajectory: &[ViewRecord], params: &AuxParams, id_prefix: &str) -> Result<Vec<TrainingSample>> {
    let k = params.candidates_per_sample;
    if k == 0 || params.distractor_separation <= 2.0 * params.match_tolerance {
        return Err(NavError::InvalidConfig("aux: need K >= 1 and separation > 2 * tolerance".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let letters: Vec<char> = ('A'..='Z').take(k).collect();
    let mut out = Vec::new();
    let attempts = params.samples_per_trajectory * 8;
    for _ in 0..attempts {
        if out.len() == params.samples_per_trajectory || trajectory.len() < k {
            break;
        }
        let a = rng.random_range(k - 1..trajectory.len());
        let lo = a.saturating_sub(params.segment_frames);
        let mut pool: Vec<&ViewRecord> = trajectory[lo..=a].iter().collect();
        pool.shuffle(&mut rng);
        let mut picked: Vec<&ViewRecord> = Vec::with_capacity(k);
        for v in pool {
            if picked.iter().all(|p| p.pose.position().dist(v.pose.position()) >= params.distractor_separation) {
                picked.push(v);
                if picked.len() == k {
                    break;
                }
            }
        }
        if picked.len() < k {
            continue;
        }
        let anchor = trajectory[a];
        // picked[0] is the true candidate
        let local = relative_coords(&anchor.pose, picked[0].pose.position());
        let q = [round_tenth(local.x), round_tenth(local.y)];
        let mut order: Vec<usize> = (0..k).collect();
        order.shuffle(&mut rng);
        let candidates: Vec<AuxCandidate> =
            order.iter().zip(&letters).map(|(&i, l)| AuxCandidate { letter: l.to_string(), view: *picked[i] }).collect();
        let answer = candidates.iter().find(|c| c.view == *picked[0]).unwrap().letter.clone();
        let segment = &trajectory[..=a];
        let history =
            subsample_indices(segment.len(), params.max_history_frames).into_iter().map(|i| segment[i]).collect();
        out.push(TrainingSample {
            sample_id: format!("{id_prefix}_aux{:02}", out.len()),
            task_kind: AUX_TASK_KIND.into(),
            prompt: SamplePrompt::Aux(AuxSample { history, query_xy: q, question: aux_question(q[0], q[1]), candidates }),
            answer,
        });
    }
    if out.is_empty() {
        return Err(NavError::SkippedTrajectory(format!(
            "{id_prefix}: fewer than {k} positions {} m apart",
            params.distractor_separation
        )));
    }
    Ok(out)
}

/// Per-kind sample counts for the exported mixture.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureConfig {
    pub objectnav: usize,
    pub ovon: usize,
    pub imagenav: usize,
    pub aux_spatial: usize,
    /// Seed of the combined-file shuffle.
    pub seed: u64,
}

impl Default for MixtureConfig {
    fn default() -> Self {
        Self { objectnav: 26_000, ovon: 26_000, imagenav: 40_000, aux_spatial: 30_000, seed: 0 }
    }
}

impl MixtureConfig {
    /// Counts multiplied by `factor`, rounded to the nearest sample.
    pub fn scaled(&self, factor: f64) -> Self {
        let s = |n: usize| crate::math::round(n as f64 * factor) as usize;
        Self { objectnav: s(self.objectnav), ovon: s(self.ovon), imagenav: s(self.imagenav), aux_spatial: s(self.aux_spatial), seed: self.seed }
    }

    /// `(task_kind, count)` in export order.
    pub fn counts(&self) -> [(&'static str, usize); 4] {
        [("objectnav", self.objectnav), ("ovon", self.ovon), ("imagenav", self.imagenav), (AUX_TASK_KIND, self.aux_spatial)]
    }
}
