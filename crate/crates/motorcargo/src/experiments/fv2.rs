//! Two-motor force-velocity and force-diffusivity curves, with the stall
//! forces of one and two motors.

use anyhow::Result;
use motorcargo_core::compute_groups;
use rayon::prelude::*;
use serde::Serialize;

use super::{dump, out, quad_flag};
use crate::config::ExperimentSpec;
use crate::ensemble::{sim_config, simulate};
use crate::output::{write_csv, write_json, Cell};
use crate::report::Report;
use crate::theory::{self, StallSummary};

/// Reported stall ratio must land here.
pub const RATIO_BAND: (f64, f64) = (2.2, 3.8);
/// Smallest nondimensional margin by which two motors must beat twice one.
pub const SUPERADDITIVE_GAP: f64 = 1e-3;
/// Rows with `theta <= LOW_LOAD * F*` count as low load.
pub const LOW_LOAD: f64 = 0.125;

#[derive(Debug, Clone, Serialize)]
pub struct Row {
    pub theta_pn: f64,
    pub v2_sim: f64,
    pub v2_sim_se: f64,
    pub v2_avg: f64,
    pub v_force_balance: f64,
    pub d2_sim: f64,
    pub d2_sim_se: Option<f64>,
    pub d2_avg: Option<f64>,
    pub d1: f64,
    pub v1_avg: f64,
    pub quad_flag: &'static str,
}

#[derive(Serialize)]
struct Summary<'a> {
    rows: &'a [Row],
    stall: &'a StallSummary,
    theta1_star_pn: f64,
    theta2_star_pn: f64,
    ratio: f64,
    report: &'a Report,
}

/// Stall checks shared with the `stall` experiment.
pub(super) fn check_stall(report: &mut Report, st: &StallSummary) {
    let (one, two) = (st.one_motor.theta_tilde, st.two_motor.theta_tilde);
    report.check(
        "two-motor stall exceeds twice the one-motor stall",
        two - 2.0 * one > SUPERADDITIVE_GAP,
        format!("theta2~ = {two:.5}, 2 theta1~ = {:.5}", 2.0 * one),
        format!("gap > {SUPERADDITIVE_GAP}"),
    );
    let (lo, hi) = RATIO_BAND;
    report.check(
        "stall ratio",
        (lo..=hi).contains(&st.ratio),
        format!("{:.3}", st.ratio),
        format!("[{lo}, {hi}], about 3"),
    );
    if st.one_motor.flagged || st.two_motor.flagged {
        report.note("stall bisection saw a non-monotone velocity; the smallest root is reported");
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<Report> {
    let curve = spec.force_velocity()?;
    let law = spec.spring_law()?;
    let p1 = spec.params.with_motor_count(1);
    let p2 = spec.params.with_motor_count(2);
    let (v, fstar) = (p1.free_velocity, p1.stall_force);
    let d1 = p1.motor_diffusion_sigma2 / 2.0;
    let points = spec
        .theta_grid_pn
        .par_iter()
        .map(|&th| {
            let p = p2.with_trap_force(th);
            let g = compute_groups(&p, &law)?;
            let two = theory::two_motor(&curve, &law, &g, true)?;
            let one = theory::one_motor(&curve, &law, &g)?;
            let sim = simulate(&p, &curve, &law, &sim_config(spec, g.epsilon))?;
            let flag =
                if quad_flag(&two, spec.tol_quad).is_empty() { quad_flag(&one, spec.tol_quad) } else { "flagged" };
            let row = Row {
                theta_pn: th,
                v2_sim: sim.summary.velocity_nm_s,
                v2_sim_se: sim.summary.velocity_nm_s_se,
                v2_avg: two.velocity_nm_s,
                v_force_balance: v * curve.value(th / (2.0 * fstar)),
                d2_sim: sim.summary.diffusivity_nm2_s,
                d2_sim_se: sim.summary.diffusivity_nm2_s_se,
                d2_avg: two.diffusivity_nm2_s,
                d1,
                v1_avg: one.velocity_nm_s,
                quad_flag: flag,
            };
            Ok((row, sim.ensemble))
        })
        .collect::<Result<Vec<_>>>()?;
    let g0 = compute_groups(&p1.with_trap_force(0.0), &law)?;
    let stall = theory::stall_forces(&curve, &law, &g0, fstar)?;

    let mut report = Report::new("fv2");
    for (k, (_, ens)) in points.iter().enumerate() {
        dump(spec, &format!("fv2_p{k}"), ens, &mut report)?;
    }
    let rows: Vec<Row> = points.into_iter().map(|p| p.0).collect();

    let low: Vec<&Row> = rows.iter().filter(|r| r.theta_pn <= LOW_LOAD * fstar).collect();
    let slower = low.iter().all(|r| r.v2_avg < r.v1_avg);
    report.check(
        "two motors slower than one at low load",
        !low.is_empty() && slower,
        format!(
            "{} low-load rows, v2_avg - v1_avg in [{:.2}, {:.2}] nm/s",
            low.len(),
            low.iter().map(|r| r.v2_avg - r.v1_avg).fold(f64::INFINITY, f64::min),
            low.iter().map(|r| r.v2_avg - r.v1_avg).fold(f64::NEG_INFINITY, f64::max)
        ),
        format!("v2_avg < v1_avg on every row with theta <= {} pN", LOW_LOAD * fstar),
    );
    if let Some(w) = rows.windows(2).find(|w| w[0].v2_avg < w[0].v1_avg && w[1].v2_avg >= w[1].v1_avg) {
        let (d0, d1) = (w[0].v2_avg - w[0].v1_avg, w[1].v2_avg - w[1].v1_avg);
        let cross = w[0].theta_pn + (w[1].theta_pn - w[0].theta_pn) * d0 / (d0 - d1);
        report.note(format!("two motors overtake one near {cross:.2} pN"));
    }
    check_stall(&mut report, &stall);
    if let Some(r) = rows.iter().find(|r| r.theta_pn == 0.0) {
        let d = r.d2_avg.unwrap_or(f64::NAN);
        let (lo, hi) = (d1 / 2.0, d1);
        report.check(
            "two-motor diffusivity between a quarter and a half of sigma^2",
            d > lo && d < hi,
            format!("{d:.2} nm^2/s"),
            format!("({lo}, {hi}) nm^2/s"),
        );
    }

    let csv = out(spec, "fv2.csv");
    let table: Vec<Vec<Cell>> = rows
        .iter()
        .map(|r| {
            vec![
                r.theta_pn.into(),
                r.v2_sim.into(),
                r.v2_sim_se.into(),
                r.v2_avg.into(),
                r.v_force_balance.into(),
                r.d2_sim.into(),
                r.d2_sim_se.into(),
                r.d2_avg.into(),
                r.d1.into(),
                r.v1_avg.into(),
                r.quad_flag.into(),
            ]
        })
        .collect();
    write_csv(
        &csv,
        spec,
        &[
            "theta_pN",
            "v2_sim",
            "v2_sim_se",
            "v2_avg",
            "v_force_balance",
            "d2_sim",
            "d2_sim_se",
            "d2_avg",
            "d1",
            "v1_avg",
            "quad_flag",
        ],
        &table,
    )?;
    report.files.push(csv);
    let json = out(spec, "fv2.json");
    report.files.push(json.clone());
    let summary = Summary {
        rows: &rows,
        stall: &stall,
        theta1_star_pn: stall.one_motor.theta_pn,
        theta2_star_pn: stall.two_motor.theta_pn,
        ratio: stall.ratio,
        report: &report,
    };
    write_json(&json, spec, &summary)?;
    Ok(report)
}
