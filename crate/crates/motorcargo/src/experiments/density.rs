//! Stationary densities as `grid,density` CSVs: the one-motor separation,
//! the two-motor separation and the cargo about motors held at zero.

use anyhow::Result;
use motorcargo_core::{
    cargo_density_general, compute_groups, pi_r_density, pi_y_density, SpringLaw, StationaryDensity1D,
};
use serde::Serialize;

use super::out;
use crate::config::ExperimentSpec;
use crate::output::{write_density, write_json};
use crate::report::Report;
use crate::theory;

pub const NORMALIZATION_TOL: f64 = 1e-8;
pub const EVENNESS_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Serialize)]
pub struct DensityInfo {
    pub name: &'static str,
    pub nodes: usize,
    pub bounds: (f64, f64),
    pub mean: f64,
    pub variance: f64,
    pub quad_error: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    densities: &'a [DensityInfo],
    report: &'a Report,
}

fn info(name: &'static str, pi: &StationaryDensity1D) -> DensityInfo {
    DensityInfo {
        name,
        nodes: pi.len(),
        bounds: pi.truncation_bounds(),
        mean: pi.mean(),
        variance: pi.variance(),
        quad_error: pi.quad_error(),
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let curve = spec.force_velocity()?;
    let law = spec.spring_law()?;
    let p = spec.params;
    let g = compute_groups(&p, &law)?;
    let n = p.motor_count as usize;
    let mut report = Report::new("density-dump");
    let mut dens: Vec<(&'static str, StationaryDensity1D)> = Vec::new();

    match law {
        SpringLaw::Linear { .. } => dens.push(("pi_y", pi_y_density(&curve, &g)?)),
        SpringLaw::General { .. } => report.note("pi_y is only available for Hookean tails"),
    }
    let drift = theory::pair(&curve, &law, &g)?;
    let pi_r = pi_r_density(drift.as_ref(), g.rho, g.theta_tilde)?;
    if g.theta_tilde == 0.0 && !matches!(spec.spring, crate::config::SpringSpec::Custom(_)) {
        let pdf = pi_r.pdf();
        let m = pdf.len();
        let worst = (0..m).map(|k| (pdf[k] - pdf[m - 1 - k]).abs()).fold(0.0, f64::max);
        report.check(
            "pi_r even at zero load",
            worst <= EVENNESS_TOL,
            format!("max |pi(r) - pi(-r)| = {worst:e}"),
            format!("<= {EVENNESS_TOL:e}"),
        );
    }
    dens.push(("pi_r", pi_r));
    dens.push(("pi_z", cargo_density_general(&vec![0.0; n], g.theta_tilde, &theory::spring_set(&law, &g, n)?)?));

    let mut infos = Vec::new();
    for (name, pi) in &dens {
        let mass = pi.integrate(|_| 1.0);
        report.check(
            format!("{name} normalized"),
            (mass - 1.0).abs() <= NORMALIZATION_TOL,
            format!("mass {mass:.12}"),
            format!("1 to {NORMALIZATION_TOL:e}"),
        );
        let path = out(spec, &format!("{name}.csv"));
        write_density(&path, spec, pi)?;
        report.files.push(path);
        infos.push(info(name, pi));
    }
    let json = out(spec, "densities.json");
    report.files.push(json.clone());
    write_json(&json, spec, &Summary { densities: &infos, report: &report })?;
    Ok(report)
}
