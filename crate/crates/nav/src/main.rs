use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use frontier_nav::bench::{run_benchmark, write_report, BenchConfig, PolicySpec};
use frontier_nav::dataset::write_dataset;
use frontier_nav::gendata::{generate_streams, scene_params, GenDataConfig};
use frontier_nav::scene_io::{read_scene, read_scene_dir, write_scene};
use frontier_nav::snapshot::write_snapshot;
use frontier_nav::config_hash;
use frontier_nav_core::datagen::MixtureConfig;
use frontier_nav_core::harness::{EpisodeRunner, ReplanTrigger};
use frontier_nav_core::world::{generate_scene, sample_episode, EpisodeKind};

#[derive(Parser)]
#[command(name = "frontier-nav", version, about = "Frontier-selection navigation: scenes, datasets, episodes, benchmarks")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate procedural scenes as JSON files.
    GenScenes {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        width: Option<usize>,
        #[arg(long)]
        height: Option<usize>,
        /// Comma-separated object categories.
        #[arg(long, value_delimiter = ',')]
        categories: Option<Vec<String>>,
    },
    /// Roll out the oracle over scenes and write a JSONL dataset.
    GenData {
        #[arg(long)]
        scenes: PathBuf,
        /// e.g. objectnav=260,ovon=260,imagenav=400,aux=300
        #[arg(long, value_parser = parse_mixture)]
        mixture: Option<Counts>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// Emit a navigation sample at every step.
        #[arg(long)]
        every_step: bool,
    },
    /// Run one episode and print its result as JSON.
    Run {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        episode_seed: u64,
        #[arg(long, default_value = "oracle")]
        policy: PolicySpec,
        #[arg(long, default_value = "arrival", value_parser = parse_replan)]
        replan: ReplanTrigger,
        #[arg(long, default_value = "objectnav", value_parser = parse_kind)]
        kind: EpisodeKind,
        #[arg(long)]
        snapshot_dir: Option<PathBuf>,
        #[arg(long, default_value_t = 5000)]
        timeout_ms: u64,
    },
    /// Run every policy on every episode and write a report.
    Bench {
        #[arg(long)]
        scenes: PathBuf,
        #[arg(long, default_value_t = 1)]
        episodes_per_scene: usize,
        #[arg(long, value_delimiter = ',', default_value = "nearest,oracle")]
        policies: Vec<PolicySpec>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 5000)]
        timeout_ms: u64,
        #[arg(long, default_value = "arrival", value_parser = parse_replan)]
        replan: ReplanTrigger,
        #[arg(long, default_value = "objectnav", value_parser = parse_kind)]
        kind: EpisodeKind,
        /// Send ground-truth letters to external policies.
        #[arg(long)]
        debug_labels: bool,
    },
}

#[derive(Clone, Debug)]
struct Counts(BTreeMap<String, usize>);

fn parse_mixture(s: &str) -> Result<Counts, String> {
    let mut m = BTreeMap::new();
    for part in s.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = part.split_once('=').ok_or_else(|| format!("expected key=count, got {part:?}"))?;
        let key = match k {
            "objectnav" | "ovon" | "imagenav" => k,
            "aux" | "aux_spatial" => "aux",
            _ => return Err(format!("unknown task kind {k:?}")),
        };
        m.insert(key.to_string(), v.parse().map_err(|_| format!("bad count {v:?}"))?);
    }
    Ok(Counts(m))
}

fn parse_replan(s: &str) -> Result<ReplanTrigger, String> {
    match s {
        "arrival" => Ok(ReplanTrigger::OnFrontierChangeOrArrival),
        "step" => Ok(ReplanTrigger::EveryStep),
        _ => match s.strip_prefix("n:").map(str::parse::<u32>) {
            Some(Ok(n)) if n >= 1 => Ok(ReplanTrigger::EveryNSteps(n)),
            _ => Err(format!("expected arrival, step or n:K with K >= 1, got {s:?}")),
        },
    }
}

fn parse_kind(s: &str) -> Result<EpisodeKind, String> {
    match s {
        "objectnav" => Ok(EpisodeKind::ObjectNav),
        "imagenav" => Ok(EpisodeKind::ImageNav),
        _ => Err(format!("expected objectnav or imagenav, got {s:?}")),
    }
}

fn run(cmd: Cmd) -> Result<()> {
    match cmd {
        Cmd::GenScenes { seed, count, out, width, height, categories } => {
            let mut params = scene_params();
            params.width = width.unwrap_or(params.width);
            params.height = height.unwrap_or(params.height);
            if let Some(c) = categories {
                params.categories = c;
            }
            std::fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for i in 0..count as u64 {
                let scene = generate_scene(seed + i, &params)?;
                write_scene(&out.join(format!("{}.json", scene.id)), &scene)?;
            }
        }
        Cmd::GenData { scenes, mixture, seed, out, every_step } => {
            let scenes = read_scene_dir(&scenes)?;
            if scenes.is_empty() {
                bail!("no scenes found");
            }
            let mut cfg = GenDataConfig { seed, ..GenDataConfig::default() };
            cfg.rollout.every_step = every_step;
            cfg.aux.seed = seed;
            cfg.mixture.seed = seed;
            if let Some(Counts(m)) = mixture {
                let get = |k: &str| m.get(k).copied().unwrap_or(0);
                cfg.mixture = MixtureConfig { objectnav: get("objectnav"), ovon: get("ovon"), imagenav: get("imagenav"), aux_spatial: get("aux"), seed };
            }
            let (streams, stats) = generate_streams(&scenes, &cfg);
            let seeds = BTreeMap::from([("seed".to_string(), seed), ("shuffle".to_string(), cfg.mixture.seed)]);
            let scene_keys: Vec<(&str, u64)> = scenes.iter().map(|s| (s.id.as_str(), s.seed)).collect();
            let manifest = write_dataset(&streams, &cfg.mixture, &out, seeds, config_hash(&(&cfg, scene_keys)))?;
            eprintln!("episodes {:?}, skipped {:?}", stats.episodes, stats.skipped);
            if !manifest.truncated.is_empty() {
                eprintln!("truncated: {}", manifest.truncated.join(", "));
            }
        }
        Cmd::Run { scene, episode_seed, policy, replan, kind, snapshot_dir, timeout_ms } => {
            let scene = read_scene(&scene)?;
            let cfg = BenchConfig { kind, ..BenchConfig::default() };
            let mut runtime = cfg.runtime;
            runtime.replan = replan;
            let ep = sample_episode(&scene, episode_seed, kind, &cfg.sampling)?;
            let mut policy = policy.instantiate(episode_seed, Duration::from_millis(timeout_ms), false);
            let mut runner = EpisodeRunner::new(&scene, &ep, &runtime)?;
            while runner.termination().is_none() {
                let step = runner.steps();
                runner.step(&mut policy, &mut ())?;
                if let Some(dir) = &snapshot_dir {
                    write_snapshot(dir, &ep.id(), step, runner.belief(), runner.frontiers())?;
                }
            }
            println!("{}", serde_json::to_string_pretty(&runner.finish())?);
        }
        Cmd::Bench { scenes, episodes_per_scene, policies, out, timeout_ms, replan, kind, debug_labels } => {
            let scenes = read_scene_dir(&scenes)?;
            let mut cfg = BenchConfig { episodes_per_scene, policies, kind, timeout_ms, debug_labels, ..BenchConfig::default() };
            cfg.runtime.replan = replan;
            let report = run_benchmark(&scenes, &cfg)?;
            write_report(&report, &out)?;
            print!("{}", frontier_nav::bench::report_table(&report));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
