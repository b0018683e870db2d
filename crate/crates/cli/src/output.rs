//! CSV trajectories and the JSON run manifest.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lieobs::dynamics::{Scenario, Trajectory};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const LIBRARY_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const MANIFEST_FILE: &str = "manifest.json";
pub const MEASUREMENT_HOLD: &str =
    "Y = X N with N drawn once per output sample and held until the next sample; Y = X when sigma = 0";

/// Column names for a chain of length `d`.
pub fn csv_columns(d: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "err_state", "err_El", "err_Er", "err_el", "err_er"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((2..=d).map(|k| format!("err_x{k}")));
    cols
}

/// 17 significant digits.
fn fmt_sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Column data only: header row plus one row per record.
pub fn csv_body(d: usize, traj: &Trajectory) -> String {
    let mut out = csv_columns(d).join(",");
    out.push('\n');
    for r in &traj.records {
        let n = &r.norms;
        let opt = |v: Option<f64>| v.map(fmt_sig17).unwrap_or_default();
        let mut cells = vec![
            fmt_sig17(r.t),
            fmt_sig17(n.state),
            fmt_sig17(n.left),
            fmt_sig17(n.right),
            opt(n.log_left),
            opt(n.log_right),
        ];
        cells.extend(n.chain.iter().map(|&v| fmt_sig17(v)));
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

/// `#`-prefixed metadata lines followed by [`csv_body`].
pub fn csv_document(scenario: &Scenario, seed: Option<u64>, traj: &Trajectory) -> String {
    let mut out = String::new();
    let cfg = &scenario.integrator;
    let seed = seed.map_or_else(|| "none".to_owned(), |s| s.to_string());
    let _ = writeln!(out, "# lieobs {LIBRARY_VERSION}");
    let _ = writeln!(out, "# scenario: {}", scenario.name);
    let _ = writeln!(
        out,
        "# observer: {} on {}, chain length {}",
        scenario.observer.name(),
        scenario.family,
        scenario.order()
    );
    let _ = writeln!(
        out,
        "# integrator: {}, dt = {:?}, output period = {:?}",
        cfg.scheme.name(),
        cfg.dt,
        scenario.output_period
    );
    let _ = writeln!(out, "# noise: sigma = {:?}, seed = {seed}", scenario.noise_sigma);
    let _ = writeln!(out, "# measurement: {MEASUREMENT_HOLD}");
    let _ = writeln!(out, "# norms: induced 2-norm; empty log cells mean the logarithm is undefined");
    if let Some(f) = &traj.failure {
        let _ = writeln!(out, "# failure: {f}");
    }
    out.push_str(&csv_body(scenario.order(), traj));
    out
}

/// Drops the leading `#` metadata lines of a CSV document.
pub fn strip_metadata(doc: &str) -> &str {
    let mut rest = doc;
    while rest.starts_with('#') {
        rest = rest.split_once('\n').map_or("", |(_, tail)| tail);
    }
    rest
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorInfo {
    pub scenario: String,
    pub scheme: String,
    pub dt: f64,
    pub reproject_tol: f64,
    pub output_period: f64,
    pub measurement: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunEntry {
    pub scenario: String,
    pub observer: String,
    pub chain_length: usize,
    pub sigma: f64,
    pub seed: Option<u64>,
    /// Relative to the manifest's directory.
    pub csv: String,
    pub records: usize,
    pub terminal_time: Option<f64>,
    pub terminal_error: Option<f64>,
    /// Decay rate of `‖X̂ − X‖`; noiseless runs only.
    pub fitted_rate: Option<f64>,
    /// Mean of `‖X̂ − X‖` over the second half of the horizon.
    pub late_mean_error: Option<f64>,
    pub failure_time: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseStatistics {
    pub scenario: String,
    pub observer: String,
    pub sigma: f64,
    pub seeds: Vec<u64>,
    /// Runs without a step failure, the ones the statistics use.
    pub completed: usize,
    pub mean: f64,
    pub std_dev: f64,
}

/// Descriptive two-sample comparison of late mean errors at equal sigma.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub first: String,
    pub second: String,
    pub sigma: f64,
    pub mean_difference: f64,
    pub welch_t: Option<f64>,
    pub lower_mean: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub study: String,
    pub library_version: String,
    /// Serialized scenarios exactly as run, overrides applied.
    pub scenario_echo: String,
    pub scenario_file: String,
    pub integrators: Vec<IntegratorInfo>,
    pub runs: Vec<RunEntry>,
    pub noise_statistics: Vec<NoiseStatistics>,
    pub comparisons: Vec<Comparison>,
}

impl RunManifest {
    pub fn any_failure(&self) -> bool {
        self.runs.iter().any(|r| r.failure.is_some())
    }

    pub fn read(path: &Path) -> Result<RunManifest, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|source| CliError::Manifest {
            path: path.to_owned(),
            source,
        })
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(self).map_err(|source| CliError::Manifest {
            path: path.to_owned(),
            source,
        })?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| CliError::io(path, e))
    }

    /// Absolute paths of every CSV, resolved against `dir`.
    pub fn csv_paths(&self, dir: &Path) -> Vec<PathBuf> {
        self.runs.iter().map(|r| dir.join(&r.csv)).collect()
    }
}
