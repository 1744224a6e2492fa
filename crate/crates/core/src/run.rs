//! Scenario dispatch shared by the binary and the C ABI.

use std::path::{Path, PathBuf};

use crate::config::{Emit, Mode, ParsedArgs, ScenarioConfig};
use crate::ensemble::{compare, default_threads, run_ensemble, DeviationReport, EnsembleResult};
use crate::error::{Error, Result};
use crate::grid::TimeGrid;
use crate::models::{
    bloch_from_exact, exact_evolve, lindblad_evolve, BlochVector, DensityMatrix, SystemModel,
};
use crate::output::{emit_csv, emit_trajectory_csv, write_series};
use crate::sse::{Scenario, TrajectoryRecord, Unraveling};

/// Exact Bloch curve of the two-mode TLA on `grid`.
pub fn exact_curve(g: f64, delta: f64, grid: TimeGrid) -> Vec<BlochVector> {
    exact_evolve(g, delta, grid).iter().map(bloch_from_exact).collect()
}

/// Lindblad curve of the damped TLA started in `|e⟩`.
pub fn master_curve(gamma: f64, grid: TimeGrid) -> Result<Vec<BlochVector>> {
    let model = SystemModel::two_level_atom();
    let rho0 = DensityMatrix::pure(&model.excited_state());
    Ok(lindblad_evolve(&model, gamma, &rho0, grid)?
        .iter()
        .map(DensityMatrix::bloch)
        .collect())
}

/// The curve an SSE ensemble of `config` should reproduce.
pub fn reference_curve(config: &ScenarioConfig) -> Result<Vec<BlochVector>> {
    let grid = config.grid()?;
    if config.unraveling.is_markov() {
        master_curve(config.gamma()?, grid)
    } else {
        Ok(exact_curve(config.g, config.delta, grid))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RunOutput {
    Curve(Vec<BlochVector>),
    Ensemble(Box<EnsembleResult>),
    Trajectory(TrajectoryRecord),
    Both(Box<EnsembleResult>, TrajectoryRecord),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub grid: TimeGrid,
    pub output: RunOutput,
    pub comparison: Option<DeviationReport>,
}

fn threads(config: &ScenarioConfig) -> usize {
    config.threads.unwrap_or_else(default_threads)
}

/// Runs a validated scenario without writing anything.
pub fn execute(args: &ParsedArgs) -> Result<RunOutcome> {
    let config = &args.config;
    config.validate()?;
    let grid = config.grid()?;
    let output = match config.mode {
        Mode::Exact => RunOutput::Curve(exact_curve(config.g, config.delta, grid)),
        Mode::Master => RunOutput::Curve(master_curve(config.gamma()?, grid)?),
        Mode::Sse => {
            let scenario = Scenario::new(config)?;
            let ensemble = || -> Result<Box<EnsembleResult>> {
                Ok(Box::new(run_ensemble(&scenario, config.n_traj, threads(config))?))
            };
            match config.emit {
                Emit::Ensemble => RunOutput::Ensemble(ensemble()?),
                Emit::Trajectory => RunOutput::Trajectory(scenario.run_trajectory(0)?),
                Emit::Both => RunOutput::Both(ensemble()?, scenario.run_trajectory(0)?),
            }
        }
    };
    let comparison = match (args.tolerance, &output) {
        (Some(tol), RunOutput::Ensemble(r) | RunOutput::Both(r, _)) => {
            Some(compare(r, &reference_curve(config)?, tol)?)
        }
        (Some(_), _) => {
            return Err(Error::config("tolerance", "needs an ensemble to compare"));
        }
        (None, _) => None,
    };
    Ok(RunOutcome {
        grid,
        output,
        comparison,
    })
}

/// Path of the trajectory file written next to the ensemble with
/// `emit=both`.
pub fn trajectory_path(ensemble_path: &Path) -> PathBuf {
    let stem = ensemble_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    ensemble_path.with_file_name(format!("{stem}.trajectory.csv"))
}

/// Writes the outcome's CSV(s) to `path` (stdout if `None`).
pub fn write_outcome(outcome: &RunOutcome, path: Option<&Path>) -> Result<()> {
    match &outcome.output {
        RunOutput::Curve(c) => write_series(outcome.grid, c, None, path),
        RunOutput::Ensemble(r) => emit_csv(r, path),
        RunOutput::Trajectory(t) => emit_trajectory_csv(t, path),
        RunOutput::Both(r, t) => {
            let path = path.ok_or_else(|| Error::config("output", "emit=both needs --output"))?;
            emit_csv(r, Some(path))?;
            emit_trajectory_csv(t, Some(&trajectory_path(path)))
        }
    }
}

/// Runs, writes, and turns a failed comparison into an error.
pub fn run(args: &ParsedArgs) -> Result<RunOutcome> {
    if args.config.emit == Emit::Both && args.config.output_path.is_none() {
        return Err(Error::config("output", "emit=both needs --output"));
    }
    let outcome = execute(args)?;
    write_outcome(&outcome, args.config.output_path.as_deref())?;
    if let Some(rep) = &outcome.comparison {
        if !rep.passed {
            return Err(Error::ComparisonFailed {
                max_deviation: rep.max_component(),
                tolerance: rep.tolerance,
            });
        }
    }
    Ok(outcome)
}

/// Files written by [`reproduce_figures`].
pub const FIGURE_FILES: &[&str] = &[
    "fig1_exact.csv",
    "fig1_linear.csv",
    "fig1_actual.csv",
    "fig2_coherent_trajectory.csv",
    "fig2_quadrature_trajectory.csv",
    "fig3_exact.csv",
    "fig3_linear.csv",
    "fig3_actual.csv",
];

/// Runs the figure scenarios on `base` (its unraveling, variant and emit are
/// overridden) and writes one CSV per curve into `dir`.
pub fn reproduce_figures(base: &ScenarioConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    use crate::sse::Variant;
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let base = ScenarioConfig {
        mode: Mode::Sse,
        ..base.clone()
    };
    base.validate()?;
    let grid = base.grid()?;
    let exact = exact_curve(base.g, base.delta, grid);
    let mut written = Vec::new();
    let mut put = |name: &str, f: &dyn Fn(&Path) -> Result<()>| -> Result<()> {
        let p = dir.join(name);
        f(&p)?;
        written.push(p);
        Ok(())
    };
    for (fig, unraveling) in [(1, Unraveling::Coherent), (3, Unraveling::Quadrature)] {
        put(&format!("fig{fig}_exact.csv"), &|p| {
            write_series(grid, &exact, None, Some(p))
        })?;
        for variant in [Variant::Linear, Variant::Actual] {
            let cfg = ScenarioConfig {
                unraveling,
                variant,
                ..base.clone()
            };
            let r = run_ensemble(&Scenario::new(&cfg)?, cfg.n_traj, threads(&cfg))?;
            put(&format!("fig{fig}_{}.csv", variant.as_str()), &|p| {
                emit_csv(&r, Some(p))
            })?;
        }
    }
    for unraveling in [Unraveling::Coherent, Unraveling::Quadrature] {
        let cfg = ScenarioConfig {
            unraveling,
            variant: Variant::Actual,
            ..base.clone()
        };
        let t = Scenario::new(&cfg)?.run_trajectory(0)?;
        put(&format!("fig2_{}_trajectory.csv", unraveling.as_str()), &|p| {
            emit_trajectory_csv(&t, Some(p))
        })?;
    }
    Ok(written)
}
