//! Output files: `<subcommand>-<hash>.csv` plus a `.meta` sidecar that
//! parses back as a scenario config.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};
use squeezelab::trace::RNG_ALGORITHM;

use crate::config::{Scenario, ASSUMPTIONS};

pub struct Artifact {
    pub subcommand: &'static str,
    pub csv: String,
    /// Subcommand arguments outside the scenario, recorded as `args.*`.
    pub args: Vec<(String, String)>,
}

/// First 16 hex digits of SHA-256 over the serialized scenario and any extra args.
pub fn scenario_hash(scenario: &Scenario, args: &[(String, String)]) -> String {
    let mut h = Sha256::new();
    h.update(scenario.to_text().as_bytes());
    for (k, v) in args {
        h.update(format!("args.{k} = {v}\n").as_bytes());
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn metadata_text(scenario: &Scenario, artifact: &Artifact, hash: &str) -> String {
    let mut out = String::from("# squeezelab output metadata; usable as --config\n");
    out += &format!("meta.subcommand = {}\n", artifact.subcommand);
    out += &format!("meta.version = {}\n", env!("CARGO_PKG_VERSION"));
    out += &format!("meta.scenario_hash = {hash}\n");
    out += &format!("meta.seed = {}\n", scenario.trace.seed);
    out += &format!("meta.rng = {RNG_ALGORITHM}\n");
    for (k, v) in &artifact.args {
        out += &format!("args.{k} = {v}\n");
    }
    for (k, why) in ASSUMPTIONS {
        out += &format!("assumption.{k} = {why}\n");
    }
    out.push('\n');
    out += &scenario.to_text();
    out
}

/// Writes the CSV and its sidecar into `dir`; returns both paths.
pub fn write_artifact(dir: &Path, scenario: &Scenario, artifact: &Artifact) -> io::Result<(PathBuf, PathBuf)> {
    fs::create_dir_all(dir)?;
    let hash = scenario_hash(scenario, &artifact.args);
    let stem = format!("{}-{hash}", artifact.subcommand);
    let csv = dir.join(format!("{stem}.csv"));
    let meta = dir.join(format!("{stem}.meta"));
    fs::write(&csv, &artifact.csv)?;
    fs::write(&meta, metadata_text(scenario, artifact, &hash))?;
    Ok((csv, meta))
}
