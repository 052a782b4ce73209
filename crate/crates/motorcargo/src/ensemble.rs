//! Replica ensembles on the rayon pool.
//!
//! Each replica owns its random stream, so the merged ensemble does not
//! depend on the number of threads or the order replicas finish in.

use motorcargo_core::sde::integrate_replica;
use motorcargo_core::{
    estimate_transport, DimensionlessGroups, ForceVelocityCurve, MotorCargoModel, PhysicalParams, SimConfig, SpringLaw,
    TrajectoryEnsemble, TransportSummary,
};
use rayon::prelude::*;

use crate::config::ExperimentSpec;

/// Shortest simulated horizon in fast time units.
pub const MIN_HORIZON: f64 = 1000.0;
/// Samples kept per replica by [`sim_config`].
pub const SAMPLES_PER_REPLICA: u64 = 1000;

pub fn run_ensemble(model: &MotorCargoModel, cfg: &SimConfig) -> motorcargo_core::Result<TrajectoryEnsemble> {
    cfg.validate()?;
    let replicas = (0..cfg.n_replicas as u64)
        .into_par_iter()
        .map(|r| integrate_replica(model, cfg, r))
        .collect::<motorcargo_core::Result<Vec<_>>>()?;
    Ok(TrajectoryEnsemble::from_replicas(model, cfg, replicas))
}

/// Fast-time horizon for `t_bar` slow units at `epsilon`.
pub fn horizon(t_bar: f64, epsilon: f64) -> f64 {
    (t_bar / epsilon).max(MIN_HORIZON)
}

pub fn sim_config(spec: &ExperimentSpec, epsilon: f64) -> SimConfig {
    let mut cfg = SimConfig {
        dt: spec.dt,
        t_final: horizon(spec.t_bar, epsilon),
        burn_in: spec.burn_in,
        n_replicas: spec.replicas,
        seed: spec.seed,
        ..SimConfig::for_epsilon(epsilon)
    };
    cfg.record_stride = cfg.n_steps().div_ceil(SAMPLES_PER_REPLICA).max(1) as usize;
    cfg
}

/// One simulated parameter point.
#[derive(Debug, Clone)]
pub struct SimPoint {
    pub groups: DimensionlessGroups,
    pub summary: TransportSummary,
    pub ensemble: TrajectoryEnsemble,
}

pub fn simulate(
    p: &PhysicalParams,
    curve: &ForceVelocityCurve,
    law: &SpringLaw,
    cfg: &SimConfig,
) -> anyhow::Result<SimPoint> {
    let (model, groups) = MotorCargoModel::from_physical(p, curve.clone(), law)?;
    let ensemble = run_ensemble(&model, cfg)?;
    let summary = estimate_transport(&ensemble, &groups)?;
    Ok(SimPoint { groups, summary, ensemble })
}
