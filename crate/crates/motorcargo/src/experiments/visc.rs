//! Velocity of one- and two-motor cargo across cargo friction.

use anyhow::Result;
use motorcargo_core::{compute_groups, one_motor_velocity_exact, one_motor_velocity_linear_approx, SpringLaw};
use rayon::prelude::*;
use serde::Serialize;

use super::{dump, out, rel_close};
use crate::config::ExperimentSpec;
use crate::ensemble::{sim_config, simulate};
use crate::output::{write_csv, write_json, Cell};
use crate::report::Report;
use crate::theory;

/// One-motor velocity stays within this fraction of its smallest-friction
/// value while `epsilon <= 0.1`.
pub const FLAT_TOL: f64 = 0.05;
/// Velocities read off the published high-friction simulations (nm/s).
pub const HIGH_FRICTION_V1: f64 = 275.0;
pub const HIGH_FRICTION_V2: f64 = 350.0;
pub const HIGH_FRICTION_TOL: f64 = 0.10;
/// Band the one-motor simulation must fall in at the highest friction (nm/s).
pub const HIGH_FRICTION_BAND: (f64, f64) = (250.0, 310.0);
/// Linearized force-balance velocity at friction 1e-2 and zero load (nm/s).
pub const LINEAR_AT_HIGH_FRICTION: f64 = 291.7;

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub gamma: f64,
    pub epsilon: f64,
    pub v_sim_1: f64,
    pub v_sim_1_se: f64,
    pub v_exact_1: Option<f64>,
    pub v_linear_1: Option<f64>,
    pub v_eps0_1: f64,
    pub v_sim_2: f64,
    pub v_sim_2_se: f64,
    pub v_eps0_2: f64,
    pub quad_flag: &'static str,
}

#[derive(Serialize)]
struct Summary<'a> {
    rows: &'a [Row],
    report: &'a Report,
}

pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let curve = spec.force_velocity()?;
    let law = spec.spring_law()?;
    let linear = matches!(law, SpringLaw::Linear { .. });
    let theta = spec.params.trap_force;
    let points = spec
        .gamma_grid
        .par_iter()
        .map(|&gamma| {
            let p1 = spec.params.with_friction(gamma).with_motor_count(1);
            let p2 = p1.with_motor_count(2);
            let g = compute_groups(&p1, &law)?;
            let cfg = sim_config(spec, g.epsilon);
            let sim1 = simulate(&p1, &curve, &law, &cfg)?;
            let sim2 = simulate(&p2, &curve, &law, &cfg)?;
            let exact = if linear { Some(one_motor_velocity_exact(&curve, &g)?) } else { None };
            let avg1 = theory::one_motor(&curve, &law, &g)?;
            let avg2 = theory::two_motor(&curve, &law, &g, false)?;
            let flagged = [Some(&avg1), Some(&avg2), exact.as_ref()]
                .into_iter()
                .flatten()
                .any(|t| !super::quad_flag(t, spec.tol_quad).is_empty());
            let row = Row {
                gamma,
                epsilon: g.epsilon,
                v_sim_1: sim1.summary.velocity_nm_s,
                v_sim_1_se: sim1.summary.velocity_nm_s_se,
                v_exact_1: exact.map(|e| e.velocity_nm_s),
                v_linear_1: one_motor_velocity_linear_approx(&p1).ok(),
                v_eps0_1: avg1.velocity_nm_s,
                v_sim_2: sim2.summary.velocity_nm_s,
                v_sim_2_se: sim2.summary.velocity_nm_s_se,
                v_eps0_2: avg2.velocity_nm_s,
                quad_flag: if flagged { "flagged" } else { "" },
            };
            Ok((row, sim1.ensemble, sim2.ensemble))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = Report::new("visc-sweep");
    for (k, (_, e1, e2)) in points.iter().enumerate() {
        dump(spec, &format!("visc_p{k}_n1"), e1, &mut report)?;
        dump(spec, &format!("visc_p{k}_n2"), e2, &mut report)?;
    }
    let rows: Vec<Row> = points.into_iter().map(|p| p.0).collect();

    if linear {
        let base = rows[0].v_exact_1.unwrap_or(f64::NAN);
        let low: Vec<&Row> = rows.iter().filter(|r| r.epsilon <= 0.1).collect();
        let worst = low.iter().map(|r| (r.v_exact_1.unwrap_or(f64::NAN) - base).abs() / base).fold(0.0, f64::max);
        report.check(
            "one-motor velocity flat while epsilon <= 0.1",
            !low.is_empty() && worst <= FLAT_TOL,
            format!("max deviation {worst:.4} over {} rows from {base:.2} nm/s at gamma {}", low.len(), rows[0].gamma),
            format!("<= {FLAT_TOL}"),
        );
    } else {
        report.note("no exact one-motor velocity for non-Hookean tails; flatness not checked");
    }

    if let Some(r) = rows.iter().find(|r| rel_close(r.gamma, 1e-2, 1e-9)).filter(|_| theta == 0.0) {
        let near = |v: f64, se: f64, target: f64| (v - target).abs() <= HIGH_FRICTION_TOL * target + 2.0 * se;
        report.check(
            "one-motor simulation at gamma 1e-2",
            near(r.v_sim_1, r.v_sim_1_se, HIGH_FRICTION_V1),
            format!("{:.1} +- {:.1} nm/s", r.v_sim_1, r.v_sim_1_se),
            format!("{HIGH_FRICTION_V1} nm/s within {HIGH_FRICTION_TOL} plus 2 SE"),
        );
        let (lo, hi) = HIGH_FRICTION_BAND;
        report.check(
            "one-motor simulation inside the high-friction band",
            (lo..=hi).contains(&r.v_sim_1),
            format!("{:.1} nm/s", r.v_sim_1),
            format!("[{lo}, {hi}] nm/s"),
        );
        report.check(
            "two-motor simulation at gamma 1e-2",
            near(r.v_sim_2, r.v_sim_2_se, HIGH_FRICTION_V2),
            format!("{:.1} +- {:.1} nm/s", r.v_sim_2, r.v_sim_2_se),
            format!("{HIGH_FRICTION_V2} nm/s within {HIGH_FRICTION_TOL} plus 2 SE"),
        );
        let vl = r.v_linear_1.unwrap_or(f64::NAN);
        report.check(
            "linearized velocity at gamma 1e-2",
            (vl - LINEAR_AT_HIGH_FRICTION).abs() < 0.05,
            format!("{vl:.3} nm/s"),
            format!("{LINEAR_AT_HIGH_FRICTION} nm/s to 0.05"),
        );
    }

    let csv = out(spec, "visc_sweep.csv");
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.gamma.into(),
                r.epsilon.into(),
                r.v_sim_1.into(),
                r.v_sim_1_se.into(),
                r.v_exact_1.into(),
                r.v_linear_1.into(),
                r.v_eps0_1.into(),
                r.v_sim_2.into(),
                r.v_sim_2_se.into(),
                r.v_eps0_2.into(),
                r.quad_flag.into(),
            ]
        })
        .collect();
    write_csv(
        &csv,
        spec,
        &[
            "gamma",
            "epsilon",
            "v_sim_1",
            "v_sim_1_se",
            "v_exact_1",
            "v_linear_1",
            "v_eps0_1",
            "v_sim_2",
            "v_sim_2_se",
            "v_eps0_2",
            "quad_flag",
        ],
        &table,
    )?;
    report.files.push(csv);
    let json = out(spec, "visc_sweep.json");
    report.files.push(json.clone());
    write_json(&json, spec, &Summary { rows: &rows, report: &report })?;
    Ok(report)
}
