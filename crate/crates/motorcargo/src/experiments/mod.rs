//! Figure-level experiments. Each writes its CSV and JSON files under the
//! spec's output directory and returns the verdict of its encoded checks.

mod density;
mod fv1;
mod fv2;
mod regime;
mod stall;
mod visc;

use std::path::PathBuf;

use anyhow::{bail, Result};
use motorcargo_core::{EffectiveTransport, TrajectoryEnsemble};

use crate::config::ExperimentSpec;
use crate::output;
use crate::report::Report;

pub const EXPERIMENTS: [&str; 6] = ["fv1", "visc-sweep", "fv2", "regime-panels", "stall", "density-dump"];

pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    std::fs::create_dir_all(&spec.out_dir)?;
    match spec.experiment.as_str() {
        "fv1" => fv1::run(spec),
        "visc-sweep" => visc::run(spec),
        "fv2" => fv2::run(spec),
        "regime-panels" => regime::run(spec),
        "stall" => stall::run(spec),
        "density-dump" => density::run(spec),
        other => bail!("unknown experiment `{other}`"),
    }
}

/// Row annotation for a quadrature result.
fn quad_flag(t: &EffectiveTransport, tol: f64) -> &'static str {
    if t.flagged || t.quad_error.is_nan() || t.quad_error > tol {
        "flagged"
    } else {
        ""
    }
}

fn any_flagged(flags: &[&str]) -> usize {
    flags.iter().filter(|f| !f.is_empty()).count()
}

/// Path dumps for the first `spec.dump_replicas` replicas.
fn dump(spec: &ExperimentSpec, stem: &str, ens: &TrajectoryEnsemble, report: &mut Report) -> Result<()> {
    if spec.dump_replicas > 0 {
        let dir = spec.out_dir.join("trajectories");
        report.files.extend(output::write_trajectories(&dir, stem, spec, ens, spec.dump_replicas)?);
    }
    Ok(())
}

fn out(spec: &ExperimentSpec, name: &str) -> PathBuf {
    spec.out_dir.join(name)
}

/// `|a - b| <= tol * |b|`.
fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs()
}

/// Trapezoid integral of `|a - b|` over `x`.
fn integrated_abs_deviation(x: &[f64], a: &[f64], b: &[f64]) -> f64 {
    (1..x.len()).map(|k| 0.5 * (x[k] - x[k - 1]) * ((a[k] - b[k]).abs() + (a[k - 1] - b[k - 1]).abs())).sum()
}
