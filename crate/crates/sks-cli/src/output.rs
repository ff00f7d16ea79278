//! Deterministic artifact emission: NDJSON reports, CSV trajectories, and
//! the run manifest.
//!
//! Scientific outputs are byte-identical across runs and thread counts for
//! a fixed (config, seed): floats use shortest round-trip formatting, JSON
//! object keys are sorted, and wall time lives only in the manifest (the
//! single field excluded from the determinism contract).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};
use sks_core::DiagnosticsRecord;
use sks_harness::VerificationReport;

/// Run provenance written alongside the artifacts as `manifest.json`.
#[derive(Debug, Serialize)]
pub struct Manifest {
    /// Subcommand that produced the run.
    pub command: String,
    /// Master seed actually used (after overrides).
    pub seed: u64,
    /// Echo of the resolved configuration the experiment ran.
    pub config: serde_json::Value,
    /// SHA-256 hex digest of every artifact written by this run.
    pub artifacts: BTreeMap<String, String>,
    /// Wall-clock runtime; excluded from the byte-identity contract.
    pub wall_time_s: f64,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest {
        s.push_str(&format!("{b:02x}"));
    }
    s
}

/// Renders diagnostics as CSV: fixed header, one row per record, shortest
/// round-trip floats. An empty record list yields a header-only file.
pub fn render_csv(records: &[DiagnosticsRecord]) -> String {
    let mut s = String::with_capacity(64 * (records.len() + 1));
    s.push_str(DiagnosticsRecord::CSV_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row());
        s.push('\n');
    }
    s
}

/// Renders verification reports as NDJSON, one object per line.
pub fn render_ndjson(reports: &[VerificationReport]) -> String {
    let mut s = String::new();
    for r in reports {
        s.push_str(&r.to_json_line());
        s.push('\n');
    }
    s
}

/// Writes every artifact plus the manifest into `dir` (created if missing).
/// Nothing is written outside `dir`.
pub fn write_run(
    dir: &Path,
    command: &str,
    seed: u64,
    config_echo: serde_json::Value,
    reports: &[VerificationReport],
    files: &[(String, String)],
    wall_time_s: f64,
) -> Result<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;

    let mut artifacts = BTreeMap::new();
    let mut write_artifact = |name: &str, content: &str| -> Result<()> {
        let path = dir.join(name);
        fs::write(&path, content).with_context(|| format!("writing {}", path.display()))?;
        artifacts.insert(name.to_string(), sha256_hex(content.as_bytes()));
        Ok(())
    };

    if !reports.is_empty() {
        write_artifact("reports.ndjson", &render_ndjson(reports))?;
    }
    for (name, content) in files {
        write_artifact(name, content)?;
    }

    let manifest = Manifest {
        command: command.to_string(),
        seed,
        config: config_echo,
        artifacts,
        wall_time_s,
    };
    let path = dir.join("manifest.json");
    let mut text =
        serde_json::to_string_pretty(&manifest).context("serializing the run manifest")?;
    text.push('\n');
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_record_list_yields_header_only_csv() {
        let csv = render_csv(&[]);
        assert_eq!(csv, format!("{}\n", DiagnosticsRecord::CSV_HEADER));
    }

    #[test]
    fn sha256_matches_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn ndjson_is_one_line_per_report() {
        let mut r = VerificationReport::new("demo");
        r.observed = 1.0;
        r.predicted = 2.0;
        r.pass = true;
        let text = render_ndjson(&[r.clone(), r]);
        assert_eq!(text.lines().count(), 2);
        for line in text.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["name"], "demo");
            assert_eq!(v["observed"], 1.0);
            assert_eq!(v["predicted"], 2.0);
        }
    }
}
