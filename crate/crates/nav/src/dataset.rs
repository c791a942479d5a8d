//! JSONL export of a sample mixture plus its manifest.

use std::collections::BTreeMap;
use std::path::Path;

use frontier_nav_core::datagen::{MixtureConfig, TrainingSample};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::wire::SampleLine;
use crate::{sha256_hex, NavIoError};

pub const COMBINED_FILE: &str = "combined.jsonl";
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KindCount {
    pub requested: usize,
    pub written: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub counts: BTreeMap<String, KindCount>,
    /// Kinds whose stream could not fill the requested count.
    pub truncated: Vec<String>,
    pub seeds: BTreeMap<String, u64>,
    pub config_hash: String,
    /// File name to SHA-256 of its bytes.
    pub files: BTreeMap<String, String>,
}

pub fn sample_to_line(s: &TrainingSample) -> String {
    serde_json::to_string(&SampleLine::from(s)).expect("sample serializes")
}

pub fn line_to_sample(line: &str) -> Result<TrainingSample, NavIoError> {
    Ok(serde_json::from_str::<SampleLine>(line)?.into())
}

pub fn read_jsonl(path: &Path) -> Result<Vec<TrainingSample>, NavIoError> {
    let text = std::fs::read_to_string(path).map_err(|e| NavIoError::io(path, e))?;
    text.lines().filter(|l| !l.is_empty()).map(line_to_sample).collect()
}

fn write_lines(path: &Path, samples: &[&TrainingSample]) -> Result<String, NavIoError> {
    let mut body = String::new();
    for s in samples {
        body.push_str(&sample_to_line(s));
        body.push('\n');
    }
    std::fs::write(path, &body).map_err(|e| NavIoError::io(path, e))?;
    Ok(sha256_hex(body.as_bytes()))
}

/// Take up to the requested count from each kind's stream (in stream
/// order), write `{kind}.jsonl` files, a seeded shuffle of everything into
/// `combined.jsonl`, and `manifest.json`.
pub fn write_dataset(
    streams: &BTreeMap<String, Vec<TrainingSample>>,
    mixture: &MixtureConfig,
    out: &Path,
    seeds: BTreeMap<String, u64>,
    config_hash: String,
) -> Result<DatasetManifest, NavIoError> {
    std::fs::create_dir_all(out).map_err(|e| NavIoError::io(out, e))?;
    let mut counts = BTreeMap::new();
    let mut truncated = Vec::new();
    let mut files = BTreeMap::new();
    let mut all: Vec<&TrainingSample> = Vec::new();
    for (kind, requested) in mixture.counts() {
        let stream = streams.get(kind).map(Vec::as_slice).unwrap_or(&[]);
        let taken: Vec<&TrainingSample> = stream.iter().take(requested).collect();
        if taken.len() < requested {
            truncated.push(kind.to_string());
        }
        let name = format!("{kind}.jsonl");
        files.insert(name.clone(), write_lines(&out.join(&name), &taken)?);
        counts.insert(kind.to_string(), KindCount { requested, written: taken.len() });
        all.extend(taken);
    }
    all.shuffle(&mut ChaCha8Rng::seed_from_u64(mixture.seed));
    files.insert(COMBINED_FILE.to_string(), write_lines(&out.join(COMBINED_FILE), &all)?);
    let manifest = DatasetManifest { counts, truncated, seeds, config_hash, files };
    let path = out.join(MANIFEST_FILE);
    let mut text = serde_json::to_string_pretty(&manifest)?;
    text.push('\n');
    std::fs::write(&path, text).map_err(|e| NavIoError::io(&path, e))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use frontier_nav_core::datagen::{generate_aux_samples, AuxParams};
    use frontier_nav_core::mapping::ViewRecord;
    use frontier_nav_core::world::Pose;

    fn aux_stream(n: usize) -> Vec<TrainingSample> {
        let traj: Vec<ViewRecord> =
            (0..80).map(|i| ViewRecord { frame_index: i, pose: Pose::new(1.0 + 0.25 * (i % 40) as f64, 2.0 + 0.1 * i as f64, 90.0) }).collect();
        let params = AuxParams { samples_per_trajectory: n, ..AuxParams::default() };
        generate_aux_samples(&traj, &params, "x").unwrap()
    }

    #[test]
    fn writes_requested_counts_and_reports_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let mut streams = BTreeMap::new();
        streams.insert("aux_spatial".to_string(), aux_stream(6));
        let mix = MixtureConfig { objectnav: 2, ovon: 0, imagenav: 0, aux_spatial: 4, seed: 3 };
        let m = write_dataset(&streams, &mix, dir.path(), BTreeMap::new(), "h".into()).unwrap();
        assert_eq!(m.counts["aux_spatial"], KindCount { requested: 4, written: 4 });
        assert_eq!(m.truncated, vec!["objectnav".to_string()]);
        let back = read_jsonl(&dir.path().join("aux_spatial.jsonl")).unwrap();
        assert_eq!(back, streams["aux_spatial"][..4].to_vec());
        assert_eq!(read_jsonl(&dir.path().join(COMBINED_FILE)).unwrap().len(), 4);
    }
}
