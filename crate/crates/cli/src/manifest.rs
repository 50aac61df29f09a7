use std::collections::BTreeMap;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Serialize, Debug)]
pub struct OutputRecord {
    pub name: String,
    pub sha256: String,
    pub bytes: usize,
}

/// Record of one invocation: re-running the same command line on inputs
/// with the same digests reproduces the listed outputs byte for byte.
#[derive(Serialize, Debug)]
pub struct RunManifest {
    pub command_line: Vec<String>,
    pub input_digests: BTreeMap<String, String>,
    pub precision: u32,
    pub seed: u64,
    pub threads: Option<usize>,
    pub artifact_version: String,
    pub wall_clock_seconds: f64,
    pub exit_code: i32,
    pub outputs: Vec<OutputRecord>,
}
