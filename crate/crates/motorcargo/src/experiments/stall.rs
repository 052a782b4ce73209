//! Stall forces of one and two motors by bisection on the averaged velocity.

use anyhow::Result;
use motorcargo_core::compute_groups;
use serde::Serialize;

use super::fv2::check_stall;
use super::out;
use crate::config::ExperimentSpec;
use crate::output::{write_csv, write_json, Cell};
use crate::report::Report;
use crate::theory::{self, StallPoint, StallSummary};

#[derive(Serialize)]
struct Summary<'a> {
    stall: &'a StallSummary,
    report: &'a Report,
}

pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let curve = spec.force_velocity()?;
    let law = spec.spring_law()?;
    let p = spec.params.with_trap_force(0.0);
    let g = compute_groups(&p, &law)?;
    let stall = theory::stall_forces(&curve, &law, &g, p.stall_force)?;
    let mut report = Report::new("stall");
    check_stall(&mut report, &stall);

    let row = |motors: &str, cargo: &str, s: &StallPoint| -> Vec<Cell> {
        vec![
            motors.into(),
            cargo.into(),
            s.theta_tilde.into(),
            s.theta_pn.into(),
            if s.flagged { "flagged" } else { "" }.into(),
        ]
    };
    let mut rows = vec![row("1", "fluctuating", &stall.one_motor), row("2", "fluctuating", &stall.two_motor)];
    if let Some(f) = &stall.two_motor_fixed_cargo {
        rows.push(row("2", "fixed", f));
    }
    let csv = out(spec, "stall.csv");
    write_csv(&csv, spec, &["motors", "cargo", "theta_tilde_star", "theta_star_pN", "flag"], &rows)?;
    report.files.push(csv);
    let json = out(spec, "stall.json");
    report.files.push(json.clone());
    write_json(&json, spec, &Summary { stall: &stall, report: &report })?;
    Ok(report)
}
