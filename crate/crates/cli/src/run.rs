//! Loading, expanding and running a study, then writing its artifacts.

use std::path::{Path, PathBuf};

use lieobs::dynamics::{simulate, Scenario, Trajectory};
use rayon::prelude::*;

use crate::builtins;
use crate::error::CliError;
use crate::output::{
    csv_document, Comparison, IntegratorInfo, NoiseStatistics, RunEntry, RunManifest, LIBRARY_VERSION,
    MANIFEST_FILE, MEASUREMENT_HOLD,
};
use crate::scenario_file::{parse_scenarios, serialize_scenarios, ScenarioSpec};
use crate::stats::{fitted_rate, late_mean_error, mean_std, welch_t};

/// Scenarios loaded from one file or builtin.
#[derive(Clone, Debug)]
pub struct Study {
    pub name: String,
    pub specs: Vec<ScenarioSpec>,
}

/// Command-line overrides applied to every scenario of a study.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    /// Batch size for noisy scenarios.
    pub seeds: Option<u32>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

/// One simulation: a scenario with its seed fixed.
#[derive(Clone, Debug)]
pub struct Job {
    pub spec_index: usize,
    pub label: String,
    pub scenario: Scenario,
}

#[derive(Debug)]
pub struct StudyOutcome {
    pub manifest: RunManifest,
    pub manifest_path: PathBuf,
}

/// Resolves `target` as a builtin name first, then as a file path.
pub fn load_study(target: &str) -> Result<Study, CliError> {
    if let Some(b) = builtins::find(target) {
        return Ok(Study {
            name: b.name.to_owned(),
            specs: b.scenarios()?,
        });
    }
    let path = Path::new(target);
    if !path.is_file() {
        return Err(CliError::UnknownTarget(target.to_owned()));
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("study")
        .to_owned();
    Ok(Study {
        name,
        specs: parse_scenarios(&text)?,
    })
}

impl Study {
    pub fn apply(&mut self, o: &Overrides) {
        for spec in &mut self.specs {
            let s = &mut spec.scenario;
            if let Some(dt) = o.dt {
                s.integrator.dt = dt;
            }
            if let Some(t) = o.t_end {
                s.t_end = t;
            }
            if let (Some(k), true) = (o.seeds, s.noise_sigma > 0.0) {
                spec.batch = k;
            }
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let mut names = std::collections::HashSet::new();
        for spec in &self.specs {
            let s = &spec.scenario;
            if !names.insert(s.name.as_str()) {
                return Err(CliError::Invalid {
                    scenario: s.name.clone(),
                    source: lieobs::Error::ScenarioInvalid("scenario names must be unique".into()),
                });
            }
            s.validate().map_err(|source| CliError::Invalid {
                scenario: s.name.clone(),
                source,
            })?;
        }
        Ok(())
    }

    /// One job per scenario, or per seed for batched scenarios with a seed.
    pub fn jobs(&self) -> Vec<Job> {
        let mut jobs = Vec::new();
        for (i, spec) in self.specs.iter().enumerate() {
            match spec.scenario.seed {
                Some(seed0) if spec.batch > 1 => {
                    for k in 0..u64::from(spec.batch) {
                        let seed = seed0.wrapping_add(k);
                        let mut scenario = spec.scenario.clone();
                        scenario.seed = Some(seed);
                        jobs.push(Job {
                            spec_index: i,
                            label: format!("{}-seed{seed}", spec.scenario.name),
                            scenario,
                        });
                    }
                }
                _ => jobs.push(Job {
                    spec_index: i,
                    label: spec.scenario.name.clone(),
                    scenario: spec.scenario.clone(),
                }),
            }
        }
        jobs
    }
}

/// Simulates every job in parallel; results keep the job order.
pub fn run_jobs(jobs: &[Job]) -> Vec<Result<Trajectory, lieobs::Error>> {
    jobs.par_iter().map(|j| simulate(&j.scenario)).collect()
}

fn run_entry(job: &Job, csv: String, traj: &Trajectory) -> RunEntry {
    let s = &job.scenario;
    let last = traj.last();
    RunEntry {
        scenario: s.name.clone(),
        observer: s.observer.name().to_owned(),
        chain_length: s.order(),
        sigma: s.noise_sigma,
        seed: s.seed,
        csv,
        records: traj.records.len(),
        terminal_time: last.map(|r| r.t),
        terminal_error: last.map(|r| r.norms.state),
        fitted_rate: if s.noise_sigma == 0.0 { fitted_rate(traj) } else { None },
        late_mean_error: if traj.failure.is_none() {
            late_mean_error(traj, s.t_end)
        } else {
            None
        },
        failure_time: traj.failure_time(),
        failure: traj.failure.as_ref().map(|e| e.to_string()),
    }
}

/// Per-scenario statistics of the late mean error for every noisy scenario.
pub fn noise_statistics(study: &Study, runs: &[RunEntry]) -> Vec<NoiseStatistics> {
    study
        .specs
        .iter()
        .filter(|spec| spec.scenario.noise_sigma > 0.0)
        .filter_map(|spec| {
            let s = &spec.scenario;
            let mine: Vec<&RunEntry> = runs.iter().filter(|r| r.scenario == s.name).collect();
            let values: Vec<f64> = mine.iter().filter_map(|r| r.late_mean_error).collect();
            let (mean, std_dev) = mean_std(&values)?;
            Some(NoiseStatistics {
                scenario: s.name.clone(),
                observer: s.observer.name().to_owned(),
                sigma: s.noise_sigma,
                seeds: mine.iter().filter_map(|r| r.seed).collect(),
                completed: values.len(),
                mean,
                std_dev,
            })
        })
        .collect()
}

/// Pairwise comparisons between noisy scenarios that share a sigma.
pub fn comparisons(stats: &[NoiseStatistics], runs: &[RunEntry]) -> Vec<Comparison> {
    let values = |name: &str| -> Vec<f64> {
        runs.iter()
            .filter(|r| r.scenario == name)
            .filter_map(|r| r.late_mean_error)
            .collect()
    };
    let mut out = Vec::new();
    for (i, a) in stats.iter().enumerate() {
        for b in &stats[i + 1..] {
            if a.sigma != b.sigma {
                continue;
            }
            out.push(Comparison {
                first: a.scenario.clone(),
                second: b.scenario.clone(),
                sigma: a.sigma,
                mean_difference: a.mean - b.mean,
                welch_t: welch_t(&values(&a.scenario), &values(&b.scenario)),
                lower_mean: if a.mean <= b.mean { &a.scenario } else { &b.scenario }.clone(),
            });
        }
    }
    out
}

/// Validates, simulates and writes CSVs, `scenario.txt` and the manifest
/// under `out_root/<study name>/`.
///
/// Step failures do not make this an `Err`; they are recorded in the
/// manifest (see [`RunManifest::any_failure`]).
pub fn run_study(mut study: Study, overrides: &Overrides, out_root: &Path) -> Result<StudyOutcome, CliError> {
    study.apply(overrides);
    study.validate()?;
    let jobs = study.jobs();
    let results = run_jobs(&jobs);

    let dir = out_root.join(&study.name);
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;

    let echo = serialize_scenarios(&study.specs);
    let scenario_file = "scenario.txt";
    let echo_path = dir.join(scenario_file);
    std::fs::write(&echo_path, &echo).map_err(|e| CliError::io(&echo_path, e))?;

    let mut runs = Vec::with_capacity(jobs.len());
    for (job, result) in jobs.iter().zip(results) {
        let traj = result.map_err(|source| CliError::Invalid {
            scenario: job.scenario.name.clone(),
            source,
        })?;
        let csv = format!("{}.csv", job.label);
        let path = dir.join(&csv);
        std::fs::write(&path, csv_document(&job.scenario, job.scenario.seed, &traj))
            .map_err(|e| CliError::io(&path, e))?;
        runs.push(run_entry(job, csv, &traj));
    }

    let noise_statistics = noise_statistics(&study, &runs);
    let comparisons = comparisons(&noise_statistics, &runs);
    let manifest = RunManifest {
        study: study.name.clone(),
        library_version: LIBRARY_VERSION.to_owned(),
        scenario_echo: echo,
        scenario_file: scenario_file.to_owned(),
        integrators: study
            .specs
            .iter()
            .map(|spec| {
                let s = &spec.scenario;
                IntegratorInfo {
                    scenario: s.name.clone(),
                    scheme: s.integrator.scheme.name().to_owned(),
                    dt: s.integrator.dt,
                    reproject_tol: s.integrator.reproject_tol,
                    output_period: s.output_period,
                    measurement: MEASUREMENT_HOLD.to_owned(),
                }
            })
            .collect(),
        runs,
        noise_statistics,
        comparisons,
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    manifest.write(&manifest_path)?;
    Ok(StudyOutcome {
        manifest,
        manifest_path,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig3() -> Study {
        load_study("fig3-noisy-lfso").unwrap()
    }

    #[test]
    fn batches_expand_to_consecutive_seeds() {
        let mut s = fig3();
        s.apply(&Overrides {
            seeds: Some(3),
            ..Overrides::default()
        });
        let jobs = s.jobs();
        assert_eq!(jobs.len(), 6);
        assert_eq!(jobs[2].label, "fig3-passive-seed3");
        assert_eq!(jobs[3].scenario.seed, Some(1));
        assert_eq!(jobs[5].spec_index, 1);
    }

    #[test]
    fn overrides_touch_every_scenario() {
        let mut s = load_study("fig2-noiseless-lfso").unwrap();
        s.apply(&Overrides {
            seeds: Some(9),
            dt: Some(2e-3),
            t_end: Some(1.0),
        });
        for spec in &s.specs {
            assert_eq!(spec.batch, 1, "noiseless scenarios are not batched");
            assert_eq!(spec.scenario.integrator.dt, 2e-3);
            assert_eq!(spec.scenario.t_end, 1.0);
        }
        assert_eq!(s.jobs().len(), 2);
    }

    #[test]
    fn unknown_targets_are_reported() {
        let e = load_study("no-such-study").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn duplicate_names_are_invalid() {
        let mut s = load_study("fig2-noiseless-lfso").unwrap();
        let first = s.specs[0].clone();
        s.specs.push(first);
        assert!(matches!(s.validate(), Err(CliError::Invalid { .. })));
    }
}
