//! Dataset generation across scenes: oracle rollouts per task kind, aux
//! samples from the recorded trajectories.

use std::collections::BTreeMap;

use frontier_nav_core::datagen::{generate_aux_samples, rollout_and_record, AuxParams, MixtureConfig, RolloutConfig, TrainingSample, AUX_TASK_KIND};
use frontier_nav_core::mapping::ViewRecord;
use frontier_nav_core::world::{sample_episode, EpisodeKind, SamplingParams, Scene, SceneParams};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const SEEN_CATEGORIES: [&str; 6] = ["chair", "bed", "plant", "toilet", "tv", "sofa"];
pub const UNSEEN_CATEGORIES: [&str; 4] = ["bathtub", "piano", "fireplace", "bookshelf"];

/// Scene parameters placing both vocabularies.
pub fn scene_params() -> SceneParams {
    let categories = SEEN_CATEGORIES.iter().chain(UNSEEN_CATEGORIES.iter()).map(|s| s.to_string()).collect();
    SceneParams { categories, ..SceneParams::default() }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenDataConfig {
    /// ObjectNav vocabulary.
    pub seen_categories: Vec<String>,
    /// Open-vocabulary (OVON-style) vocabulary, disjoint from the seen one.
    pub unseen_categories: Vec<String>,
    pub sampling: SamplingParams,
    pub rollout: RolloutConfig,
    pub aux: AuxParams,
    pub mixture: MixtureConfig,
    pub seed: u64,
    /// Episodes tried per kind before reporting truncation.
    pub max_episodes_per_kind: usize,
    /// Rollouts run in parallel per batch.
    pub batch: usize,
}

impl Default for GenDataConfig {
    fn default() -> Self {
        Self {
            seen_categories: SEEN_CATEGORIES.iter().map(|s| s.to_string()).collect(),
            unseen_categories: UNSEEN_CATEGORIES.iter().map(|s| s.to_string()).collect(),
            sampling: SamplingParams::default(),
            rollout: RolloutConfig::default(),
            aux: AuxParams::default(),
            mixture: MixtureConfig::default().scaled(0.01),
            seed: 0,
            max_episodes_per_kind: 2000,
            batch: 16,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct GenStats {
    pub episodes: BTreeMap<String, usize>,
    /// Episodes that could not be sampled or run.
    pub skipped: BTreeMap<String, usize>,
    pub skipped_trajectories: usize,
}

/// Seed of episode `index` of a kind.
pub fn episode_seed(seed: u64, kind: usize, index: usize) -> u64 {
    seed.wrapping_mul(1_000_003).wrapping_add((kind as u64) << 32).wrapping_add(index as u64)
}

struct Produced {
    samples: Vec<TrainingSample>,
    trajectory: Vec<ViewRecord>,
    id: String,
}

/// Navigation samples for one kind, stopping once `want` are collected.
/// Rollouts are run in parallel batches but consumed in index order.
fn collect_kind(
    scenes: &[Scene],
    cfg: &GenDataConfig,
    kind_idx: usize,
    kind: EpisodeKind,
    sampling: &SamplingParams,
    want: usize,
    keep_trajectories: &mut Vec<(String, Vec<ViewRecord>)>,
    stats: &mut GenStats,
    name: &str,
) -> Vec<TrainingSample> {
    let mut out = Vec::new();
    let mut next = 0usize;
    while out.len() < want && next < cfg.max_episodes_per_kind {
        let end = (next + cfg.batch.max(1)).min(cfg.max_episodes_per_kind);
        let produced: Vec<Option<Produced>> = (next..end)
            .into_par_iter()
            .map(|i| {
                let scene = &scenes[i % scenes.len()];
                let ep = sample_episode(scene, episode_seed(cfg.seed, kind_idx, i), kind, sampling).ok()?;
                let r = rollout_and_record(scene, &ep, &cfg.rollout).ok()?;
                Some(Produced { samples: r.samples, trajectory: r.trajectory, id: ep.id() })
            })
            .collect();
        next = end;
        for p in produced {
            let Some(p) = p else {
                *stats.skipped.entry(name.to_string()).or_default() += 1;
                continue;
            };
            *stats.episodes.entry(name.to_string()).or_default() += 1;
            if out.len() < want {
                let room = want - out.len();
                out.extend(p.samples.into_iter().take(room));
            }
            keep_trajectories.push((p.id, p.trajectory));
        }
    }
    out
}

/// Streams per task kind, each at most the mixture's count.
pub fn generate_streams(scenes: &[Scene], cfg: &GenDataConfig) -> (BTreeMap<String, Vec<TrainingSample>>, GenStats) {
    let mut streams = BTreeMap::new();
    let mut stats = GenStats::default();
    let mut trajectories = Vec::new();
    if scenes.is_empty() {
        return (streams, stats);
    }
    let seen = SamplingParams { categories: cfg.seen_categories.clone(), open_vocabulary: false, ..cfg.sampling.clone() };
    let unseen = SamplingParams { categories: cfg.unseen_categories.clone(), open_vocabulary: true, ..cfg.sampling.clone() };
    let m = &cfg.mixture;
    let plan = [
        ("objectnav", EpisodeKind::ObjectNav, &seen, m.objectnav),
        ("ovon", EpisodeKind::ObjectNav, &unseen, m.ovon),
        ("imagenav", EpisodeKind::ImageNav, &cfg.sampling, m.imagenav),
    ];
    for (idx, (name, kind, sampling, want)) in plan.into_iter().enumerate() {
        let s = collect_kind(scenes, cfg, idx, kind, sampling, want, &mut trajectories, &mut stats, name);
        streams.insert(name.to_string(), s);
    }

    // aux samples from the trajectories, topping up with extra ObjectNav
    // rollouts if the navigation episodes were not enough
    let mut aux = Vec::new();
    let mut used = 0usize;
    let mut extra_round = 0usize;
    while aux.len() < m.aux_spatial {
        if used == trajectories.len() {
            if extra_round * cfg.batch >= cfg.max_episodes_per_kind {
                break;
            }
            let mut more = Vec::new();
            let before = trajectories.len();
            collect_kind(scenes, &GenDataConfig { max_episodes_per_kind: (extra_round + 1) * cfg.batch, ..cfg.clone() }, 3 + extra_round, EpisodeKind::ObjectNav, &seen, 0, &mut more, &mut stats, AUX_TASK_KIND);
            trajectories.extend(more);
            extra_round += 1;
            if trajectories.len() == before {
                continue;
            }
        }
        let (id, traj) = &trajectories[used];
        let params = AuxParams { seed: episode_seed(cfg.aux.seed ^ cfg.seed, 9, used), ..cfg.aux.clone() };
        match generate_aux_samples(traj, &params, id) {
            Ok(s) => aux.extend(s.into_iter().take(m.aux_spatial - aux.len())),
            Err(_) => stats.skipped_trajectories += 1,
        }
        used += 1;
    }
    streams.insert(AUX_TASK_KIND.to_string(), aux);
    (streams, stats)
}
