//! gnuplot scripts from run manifests.
//!
//! Rows are noise levels in increasing order; the first column is
//! `‖X̂ − X‖` and, when any run has a chain, a second column shows
//! `‖x̂₂ − x₂‖`. Each panel draws one line per scenario; batched scenarios
//! contribute their first seed only.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::CliError;
use crate::output::{RunEntry, RunManifest, LIBRARY_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Quantity {
    State,
    FirstChainSlot,
}

impl Quantity {
    /// 1-based CSV column.
    fn column(self) -> usize {
        match self {
            Quantity::State => 2,
            Quantity::FirstChainSlot => 7,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Quantity::State => "||Xhat - X||",
            Quantity::FirstChainSlot => "||x2hat - x2||",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Line {
    pub csv: String,
    pub title: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Panel {
    pub sigma: f64,
    pub quantity: Quantity,
    pub lines: Vec<Line>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    pub rows: usize,
    pub columns: usize,
    /// Row-major.
    pub panels: Vec<Panel>,
}

fn representatives(runs: &[RunEntry]) -> Vec<&RunEntry> {
    let mut seen: Vec<&str> = Vec::new();
    runs.iter()
        .filter(|r| {
            if seen.contains(&r.scenario.as_str()) {
                false
            } else {
                seen.push(&r.scenario);
                true
            }
        })
        .collect()
}

pub fn layout(manifest: &RunManifest) -> Result<Layout, CliError> {
    if manifest.runs.is_empty() {
        return Err(CliError::MissingData(format!("manifest of `{}` lists no runs", manifest.study)));
    }
    let reps = representatives(&manifest.runs);
    let mut sigmas: Vec<f64> = reps.iter().map(|r| r.sigma).collect();
    sigmas.sort_by(f64::total_cmp);
    sigmas.dedup();
    let mut quantities = vec![Quantity::State];
    if reps.iter().any(|r| r.chain_length >= 2) {
        quantities.push(Quantity::FirstChainSlot);
    }
    let mut panels = Vec::new();
    for &sigma in &sigmas {
        for &quantity in &quantities {
            let lines = reps
                .iter()
                .filter(|r| r.sigma == sigma)
                .filter(|r| quantity == Quantity::State || r.chain_length >= 2)
                .map(|r| Line {
                    csv: r.csv.clone(),
                    title: r.observer.clone(),
                })
                .collect();
            panels.push(Panel {
                sigma,
                quantity,
                lines,
            });
        }
    }
    Ok(Layout {
        rows: sigmas.len(),
        columns: quantities.len(),
        panels,
    })
}

fn quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', "''"))
}

/// Script text; CSV paths are relative to `dir`, the manifest's directory.
pub fn script(manifest: &RunManifest, dir: &Path, log_y: bool) -> Result<String, CliError> {
    let layout = layout(manifest)?;
    for path in manifest.csv_paths(dir) {
        if !path.is_file() {
            return Err(CliError::MissingData(format!("{} does not exist", path.display())));
        }
    }
    let mut out = String::new();
    let _ = writeln!(out, "# lieobs {LIBRARY_VERSION}: {}", manifest.study);
    let _ = writeln!(out, "# run from the manifest directory: gnuplot {}.gp", manifest.study);
    let _ = writeln!(
        out,
        "set terminal pngcairo size {},{}",
        480 * layout.columns,
        320 * layout.rows
    );
    let _ = writeln!(out, "set output {}", quote(&format!("{}.png", manifest.study)));
    let _ = writeln!(out, "set datafile separator ','");
    let _ = writeln!(out, "set datafile columnheaders");
    if log_y {
        let _ = writeln!(out, "set logscale y");
    }
    let _ = writeln!(out, "set xlabel 't'");
    let _ = writeln!(
        out,
        "set multiplot layout {},{} title {}",
        layout.rows,
        layout.columns,
        quote(&manifest.study)
    );
    for panel in &layout.panels {
        let _ = writeln!(
            out,
            "set title {}",
            quote(&format!("{} versus time, sigma = {:?}", panel.quantity.label(), panel.sigma))
        );
        let plots: Vec<String> = panel
            .lines
            .iter()
            .map(|l| {
                format!(
                    "{} using 1:{} with lines title {}",
                    quote(&l.csv),
                    panel.quantity.column(),
                    quote(&l.title)
                )
            })
            .collect();
        let _ = writeln!(out, "plot {}", plots.join(", \\\n     "));
    }
    let _ = writeln!(out, "unset multiplot");
    Ok(out)
}

/// Writes `<study>.gp` next to the manifest and returns its path.
pub fn emit_plot_script(manifest_path: &Path, log_y: bool) -> Result<PathBuf, CliError> {
    let manifest = RunManifest::read(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let text = script(&manifest, dir, log_y)?;
    let out = dir.join(format!("{}.gp", manifest.study));
    std::fs::write(&out, text).map_err(|e| CliError::io(&out, e))?;
    Ok(out)
}
