//! Two-motor force-velocity at raised cargo friction: simulation against
//! averaged theory and force balance.

use anyhow::Result;
use motorcargo_core::compute_groups;
use rayon::prelude::*;
use serde::Serialize;

use super::{dump, integrated_abs_deviation, out, quad_flag, rel_close};
use crate::config::ExperimentSpec;
use crate::ensemble::{sim_config, simulate};
use crate::output::{write_csv, write_json, Cell};
use crate::report::Report;
use crate::theory;

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub theta_pn: f64,
    pub v_sim: f64,
    pub v_sim_se: f64,
    pub v_avg: f64,
    pub v_force_balance: f64,
    pub quad_flag: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct Panel {
    pub gamma: f64,
    pub epsilon: f64,
    pub rows: Vec<Row>,
    /// Integrated `|v_sim - v_avg|` over the trap-force grid (nm/s pN).
    pub deviation_avg: f64,
    pub deviation_force_balance: f64,
    /// Mean of `(v_sim - v_avg) / v_avg` where `v_avg` is at least half its first-row value.
    pub low_load_relative_deviation: f64,
}

#[derive(Serialize)]
struct Summary<'a> {
    panels: &'a [Panel],
    report: &'a Report,
}

pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let curve = spec.force_velocity()?;
    let law = spec.spring_law()?;
    let (v, fstar) = (spec.params.free_velocity, spec.params.stall_force);
    let mut report = Report::new("regime-panels");
    let mut panels = Vec::new();
    for (gi, &gamma) in spec.gamma_grid.iter().enumerate() {
        let p2 = spec.params.with_friction(gamma).with_motor_count(2);
        let points = spec
            .theta_grid_pn
            .par_iter()
            .map(|&th| {
                let p = p2.with_trap_force(th);
                let g = compute_groups(&p, &law)?;
                let avg = theory::two_motor(&curve, &law, &g, false)?;
                let sim = simulate(&p, &curve, &law, &sim_config(spec, g.epsilon))?;
                let row = Row {
                    theta_pn: th,
                    v_sim: sim.summary.velocity_nm_s,
                    v_sim_se: sim.summary.velocity_nm_s_se,
                    v_avg: avg.velocity_nm_s,
                    v_force_balance: v * curve.value(th / (2.0 * fstar)),
                    quad_flag: quad_flag(&avg, spec.tol_quad),
                };
                Ok((row, sim.ensemble))
            })
            .collect::<Result<Vec<_>>>()?;
        for (k, (_, ens)) in points.iter().enumerate() {
            dump(spec, &format!("regime_g{gi}_p{k}"), ens, &mut report)?;
        }
        let rows: Vec<Row> = points.into_iter().map(|p| p.0).collect();
        let th: Vec<f64> = rows.iter().map(|r| r.theta_pn).collect();
        let sim: Vec<f64> = rows.iter().map(|r| r.v_sim).collect();
        let avg: Vec<f64> = rows.iter().map(|r| r.v_avg).collect();
        let fb: Vec<f64> = rows.iter().map(|r| r.v_force_balance).collect();
        let half = 0.5 * rows[0].v_avg;
        let low: Vec<f64> = rows.iter().filter(|r| r.v_avg >= half).map(|r| (r.v_sim - r.v_avg) / r.v_avg).collect();
        let panel = Panel {
            gamma,
            epsilon: compute_groups(&p2, &law)?.epsilon,
            deviation_avg: integrated_abs_deviation(&th, &sim, &avg),
            deviation_force_balance: integrated_abs_deviation(&th, &sim, &fb),
            low_load_relative_deviation: low.iter().sum::<f64>() / low.len().max(1) as f64,
            rows,
        };

        if rel_close(gamma, 1e-3, 1e-9) {
            report.check(
                "averaged theory beats force balance at gamma 1e-3",
                panel.deviation_avg < panel.deviation_force_balance,
                format!(
                    "integrated |sim - avg| = {:.1}, |sim - force balance| = {:.1}",
                    panel.deviation_avg, panel.deviation_force_balance
                ),
                "averaged deviation smaller",
            );
        } else {
            report.note(format!(
                "gamma {gamma:e} (epsilon {:.3}): simulation departs from averaged theory by {:+.1}% on average at low load",
                panel.epsilon,
                100.0 * panel.low_load_relative_deviation
            ));
        }

        let csv = out(spec, &format!("regime_gamma_{gamma:e}.csv"));
        let table: Vec<Vec<Cell>> = panel
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.theta_pn.into(),
                    r.v_sim.into(),
                    r.v_sim_se.into(),
                    r.v_avg.into(),
                    r.v_force_balance.into(),
                    r.quad_flag.into(),
                ]
            })
            .collect();
        write_csv(&csv, spec, &["theta_pN", "v_sim", "v_sim_se", "v_avg", "v_force_balance", "quad_flag"], &table)?;
        report.files.push(csv);
        panels.push(panel);
    }
    let json = out(spec, "regime_panels.json");
    report.files.push(json.clone());
    write_json(&json, spec, &Summary { panels: &panels, report: &report })?;
    Ok(report)
}
