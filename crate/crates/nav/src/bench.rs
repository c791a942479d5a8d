//! Benchmark orchestration: every (episode, policy) pair over a scene set.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;
use std::time::Duration;

use frontier_nav_core::harness::{run_episode, BenchmarkReport, EpisodeResult, PolicyReport, RuntimeConfig};
use frontier_nav_core::planning::OracleConfig;
use frontier_nav_core::policy::{BuiltinPolicy, FrontierPolicy};
use frontier_nav_core::world::{sample_episode, EpisodeKind, EpisodeSpec, SamplingParams, Scene};
use frontier_nav_core::NavError;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::external::ExternalPolicy;
use crate::{config_hash, NavIoError};

/// A policy by name: `nearest`, `random[:SEED]`, `oracle`, `greedy` or
/// `external:URL`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum PolicySpec {
    Nearest,
    Random(u64),
    Oracle,
    Greedy,
    External(String),
}

impl FromStr for PolicySpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "nearest" => Self::Nearest,
            "random" => Self::Random(0),
            "oracle" => Self::Oracle,
            "greedy" => Self::Greedy,
            _ => {
                if let Some(seed) = s.strip_prefix("random:") {
                    Self::Random(seed.parse().map_err(|_| format!("bad random seed in {s:?}"))?)
                } else if let Some(url) = s.strip_prefix("external:") {
                    if url.is_empty() {
                        return Err("external policy needs a URL".into());
                    }
                    Self::External(url.to_string())
                } else {
                    return Err(format!("unknown policy {s:?}"));
                }
            }
        })
    }
}

impl std::fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Nearest => f.write_str("nearest"),
            Self::Random(seed) => write!(f, "random:{seed}"),
            Self::Oracle => f.write_str("oracle"),
            Self::Greedy => f.write_str("greedy"),
            Self::External(url) => write!(f, "external:{url}"),
        }
    }
}

impl TryFrom<String> for PolicySpec {
    type Error = String;
    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<PolicySpec> for String {
    fn from(p: PolicySpec) -> String {
        p.to_string()
    }
}

impl PolicySpec {
    /// A fresh policy for one episode. Random seeds are mixed with the
    /// episode seed so episodes do not share a stream.
    pub fn instantiate(&self, episode_seed: u64, timeout: Duration, debug_labels: bool) -> Box<dyn FrontierPolicy + Send> {
        match self {
            Self::Nearest => Box::new(BuiltinPolicy::NearestFrontier),
            Self::Random(seed) => Box::new(BuiltinPolicy::Random(seed.wrapping_mul(0x2545_F491_4F6C_DD1D) ^ episode_seed)),
            Self::Oracle => Box::new(BuiltinPolicy::GroundTruthOracle),
            Self::Greedy => Box::new(BuiltinPolicy::GreedyOracle(OracleConfig::default())),
            Self::External(url) => Box::new(ExternalPolicy::new(url.clone(), timeout).with_debug_labels(debug_labels)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub episodes_per_scene: usize,
    pub policies: Vec<PolicySpec>,
    pub kind: EpisodeKind,
    pub sampling: SamplingParams,
    pub runtime: RuntimeConfig,
    pub timeout_ms: u64,
    /// Send ground-truth letters to external policies.
    pub debug_labels: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            episodes_per_scene: 1,
            policies: vec![PolicySpec::Nearest, PolicySpec::Oracle],
            kind: EpisodeKind::ObjectNav,
            sampling: SamplingParams::default(),
            runtime: RuntimeConfig::default(),
            timeout_ms: 5000,
            debug_labels: false,
        }
    }
}

/// Seed of the `j`th episode of a scene.
pub fn episode_seed(scene: &Scene, j: usize) -> u64 {
    scene.seed.wrapping_mul(1000).wrapping_add(j as u64)
}

/// The suite: `episodes_per_scene` sampled episodes per scene, in scene
/// order. Failures to sample are kept so they count against every policy.
pub fn build_suite(scenes: &[Scene], cfg: &BenchConfig) -> Vec<(usize, u64, Result<EpisodeSpec, NavError>)> {
    let mut out = Vec::new();
    for (i, scene) in scenes.iter().enumerate() {
        for j in 0..cfg.episodes_per_scene {
            let seed = episode_seed(scene, j);
            out.push((i, seed, sample_episode(scene, seed, cfg.kind, &cfg.sampling)));
        }
    }
    out
}

pub fn run_benchmark(scenes: &[Scene], cfg: &BenchConfig) -> Result<BenchmarkReport, NavIoError> {
    cfg.runtime.validate()?;
    if cfg.policies.is_empty() {
        return Err(NavError::InvalidConfig("no policies".into()).into());
    }
    let suite = build_suite(scenes, cfg);
    if suite.is_empty() {
        return Err(NavError::EmptyBenchmark.into());
    }
    let timeout = Duration::from_millis(cfg.timeout_ms);
    let mut policies = Vec::new();
    for spec in &cfg.policies {
        let results: Vec<EpisodeResult> = suite
            .par_iter()
            .map(|(i, seed, ep)| {
                let scene = &scenes[*i];
                let ep = match ep {
                    Ok(ep) => ep,
                    Err(e) => return EpisodeResult::failed(format!("{}_ep{seed}", scene.id), e),
                };
                let mut policy = spec.instantiate(*seed, timeout, cfg.debug_labels);
                run_episode(scene, ep, &mut policy, &cfg.runtime).unwrap_or_else(|e| EpisodeResult::failed(ep.id(), &e))
            })
            .collect();
        policies.push(PolicyReport::new(spec.to_string(), results)?);
    }
    let scene_keys: Vec<(&str, u64)> = scenes.iter().map(|s| (s.id.as_str(), s.seed)).collect();
    Ok(BenchmarkReport {
        config_hash: config_hash(&(cfg, scene_keys)),
        seeds: suite.iter().map(|(_, s, _)| *s).collect(),
        policies,
    })
}

pub fn report_json(report: &BenchmarkReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn report_table(report: &BenchmarkReport) -> String {
    let mut s = format!("{:<32} {:>8} {:>7} {:>7} {:>10}\n", "policy", "episodes", "SR", "SPL", "mean_steps");
    for p in &report.policies {
        let _ = writeln!(s, "{:<32} {:>8} {:>7.4} {:>7.4} {:>10.1}", p.name, p.episodes.len(), p.sr, p.spl, p.mean_steps);
    }
    s
}

/// Writes `out` and a `.txt` table next to it.
pub fn write_report(report: &BenchmarkReport, out: &Path) -> Result<(), NavIoError> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| NavIoError::io(dir, e))?;
    }
    std::fs::write(out, report_json(report)).map_err(|e| NavIoError::io(out, e))?;
    let table = out.with_extension("txt");
    std::fs::write(&table, report_table(report)).map_err(|e| NavIoError::io(&table, e))
}
