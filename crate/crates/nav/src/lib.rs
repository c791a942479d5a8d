//! File formats, dataset export, the HTTP policy client, benchmarking and
//! the command-line front end over `frontier-nav-core`.

use std::path::{Path, PathBuf};

use frontier_nav_core::NavError;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub mod bench;
pub mod dataset;
pub mod external;
pub mod gendata;
pub mod scene_io;
pub mod snapshot;
pub mod wire;

#[derive(Debug, thiserror::Error)]
pub enum NavIoError {
    #[error("{}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("format: {0}")]
    Format(String),
    #[error(transparent)]
    Nav(#[from] NavError),
}

impl NavIoError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of the compact JSON form of a config.
pub fn config_hash<T: Serialize>(cfg: &T) -> String {
    sha256_hex(&serde_json::to_vec(cfg).expect("config serializes"))
}
