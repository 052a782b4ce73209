//! Single-motor force-velocity: simulation, averaged theory and the
//! instantaneous curve `v g(theta / F*)`.

use anyhow::Result;
use motorcargo_core::{compute_groups, DimensionlessGroups};
use rayon::prelude::*;
use serde::Serialize;

use super::{any_flagged, dump, out, quad_flag};
use crate::config::ExperimentSpec;
use crate::ensemble::{sim_config, simulate};
use crate::output::{write_csv, write_json, Cell};
use crate::report::Report;
use crate::theory;

/// Largest allowed `|v_avg - v_inst| / v` over the grid.
pub const COINCIDENCE_TOL: f64 = 0.02;
/// Allowed `|v_avg(0) - v| / v`.
pub const FREE_VELOCITY_TOL: f64 = 0.02;

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub theta_pn: f64,
    pub v_sim: f64,
    pub v_sim_se: f64,
    pub v_avg: f64,
    pub v_instantaneous: f64,
    pub quad_flag: &'static str,
}

#[derive(Serialize)]
struct Summary<'a> {
    groups_at_first_point: DimensionlessGroups,
    rows: &'a [Row],
    max_coincidence_deviation: f64,
    max_sim_z_score: f64,
    report: &'a Report,
}

pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let curve = spec.force_velocity()?;
    let law = spec.spring_law()?;
    let p0 = spec.params.with_motor_count(1);
    let v = p0.free_velocity;
    let points = spec
        .theta_grid_pn
        .par_iter()
        .map(|&th| {
            let p = p0.with_trap_force(th);
            let g = compute_groups(&p, &law)?;
            let avg = theory::one_motor(&curve, &law, &g)?;
            let sim = simulate(&p, &curve, &law, &sim_config(spec, g.epsilon))?;
            let row = Row {
                theta_pn: th,
                v_sim: sim.summary.velocity_nm_s,
                v_sim_se: sim.summary.velocity_nm_s_se,
                v_avg: avg.velocity_nm_s,
                v_instantaneous: v * curve.value(th / p.stall_force),
                quad_flag: quad_flag(&avg, spec.tol_quad),
            };
            Ok((row, g, sim.ensemble))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = Report::new("fv1");
    for (k, (_, _, ens)) in points.iter().enumerate() {
        dump(spec, &format!("fv1_p{k}"), ens, &mut report)?;
    }
    let rows: Vec<Row> = points.iter().map(|p| p.0.clone()).collect();
    let (worst, at) = rows
        .iter()
        .map(|r| ((r.v_avg - r.v_instantaneous).abs() / v, r.theta_pn))
        .fold((0.0, f64::NAN), |a, b| if b.0 > a.0 { b } else { a });
    report.check(
        "averaged and instantaneous curves coincide",
        worst < COINCIDENCE_TOL,
        format!("max |v_avg - v_inst| / v = {:.4} at {at} pN", worst),
        format!("< {COINCIDENCE_TOL}"),
    );
    if let Some(r) = rows.iter().find(|r| r.theta_pn == 0.0) {
        let dev = (r.v_avg - v).abs() / v;
        report.check(
            "averaged free velocity",
            dev < FREE_VELOCITY_TOL,
            format!("v_avg(0) = {:.3} nm/s ({:.4} off)", r.v_avg, dev),
            format!("within {FREE_VELOCITY_TOL} of {v} nm/s"),
        );
    }
    let z = rows.iter().map(|r| (r.v_sim - r.v_avg).abs() / r.v_sim_se).fold(0.0, f64::max);
    report.note(format!("largest |v_sim - v_avg| is {z:.2} standard errors"));
    let flagged = any_flagged(&rows.iter().map(|r| r.quad_flag).collect::<Vec<_>>());
    if flagged > 0 {
        report.note(format!("{flagged} rows carry flagged quadrature"));
    }

    let csv = out(spec, "fv1.csv");
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.theta_pn.into(),
                r.v_sim.into(),
                r.v_sim_se.into(),
                r.v_avg.into(),
                r.v_instantaneous.into(),
                r.quad_flag.into(),
            ]
        })
        .collect();
    write_csv(&csv, spec, &["theta_pN", "v_sim", "v_sim_se", "v_avg", "v_instantaneous", "quad_flag"], &table)?;
    report.files.push(csv);
    let json = out(spec, "fv1.json");
    report.files.push(json.clone());
    let summary = Summary {
        groups_at_first_point: points[0].1,
        rows: &rows,
        max_coincidence_deviation: worst,
        max_sim_z_score: z,
        report: &report,
    };
    write_json(&json, spec, &summary)?;
    Ok(report)
}
