//! Euler–Maruyama integration of the rescaled motor-cargo system in fast time
//!
//! ```text
//! dX_i = eps g(s F(X_i - Z)) dt + sqrt(eps rho) dW_i
//! dZ   = (sum_i F(X_i - Z) - theta~) dt + dW_z
//! ```
//!
//! with `F` the rescaled tail force, and the replica estimators of long-run
//! velocity and diffusivity.

use alloc::vec;
use alloc::vec::Vec;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::curve::ForceVelocityCurve;
use crate::error::{invalid, Error, Result};
use crate::nondim::{compute_groups, DimensionlessGroups};
use crate::params::PhysicalParams;
use crate::spring::{SpringLaw, SpringPotential, Tether};
use crate::stats;

pub const DEFAULT_DT: f64 = 0.01;
pub const MAX_DT: f64 = 0.05;
pub const DEFAULT_BURN_IN: f64 = 0.1;
/// Shortest post-burn-in window accepted by the estimators (fast units).
pub const MIN_WINDOW: f64 = 100.0;
/// Replicas needed before the diffusivity gets a standard error.
pub const MIN_REPLICAS_FOR_DIFFUSIVITY_SE: usize = 8;

/// Starting state of every replica.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum InitialCondition {
    /// Motors at 0, cargo at `-theta~ / N`.
    Default,
    /// `[X_1, .., X_N, Z]`.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimConfig {
    /// Step in fast time.
    pub dt: f64,
    /// Horizon in fast time.
    pub t_final: f64,
    /// Fraction of the horizon discarded before estimating.
    pub burn_in: f64,
    pub n_replicas: usize,
    pub seed: u64,
    /// Steps between recorded samples.
    pub record_stride: usize,
    pub initial_condition: InitialCondition,
}

impl SimConfig {
    /// Defaults for a given `epsilon`: horizon `max(10 / eps, 1000)` fast units.
    pub fn for_epsilon(epsilon: f64) -> Self {
        let t_final = if epsilon > 0.0 { (10.0 / epsilon).max(1000.0) } else { 1000.0 };
        Self {
            dt: DEFAULT_DT,
            t_final,
            burn_in: DEFAULT_BURN_IN,
            n_replicas: 64,
            seed: 0,
            record_stride: 100,
            initial_condition: InitialCondition::Default,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt <= MAX_DT) {
            return Err(invalid("dt", "must lie in (0, 0.05]"));
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(invalid("t_final", "must be positive"));
        }
        if !(self.burn_in >= 0.0 && self.burn_in < 1.0) {
            return Err(invalid("burn_in", "must lie in [0, 1)"));
        }
        if self.n_replicas == 0 {
            return Err(invalid("n_replicas", "need at least one replica"));
        }
        if self.record_stride == 0 {
            return Err(invalid("record_stride", "must be positive"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> u64 {
        (self.t_final / self.dt).round() as u64
    }

    pub fn burn_in_step(&self) -> u64 {
        (self.burn_in * self.n_steps() as f64).round() as u64
    }
}

/// Rescaled motor-cargo system.
#[derive(Debug, Clone)]
pub struct MotorCargoModel {
    pub epsilon: f64,
    /// `eps rho`, the motor noise variance per fast time unit.
    pub motor_noise_var: f64,
    /// Scale of the cargo noise; 1 for the thermal system, 0 for the
    /// deterministic limit.
    pub cargo_noise: f64,
    pub stallibility: f64,
    pub theta_tilde: f64,
    pub motors: usize,
    pub tether: Tether,
    pub curve: ForceVelocityCurve,
}

impl MotorCargoModel {
    /// `epsilon = 0` with zero motor noise freezes the motors.
    pub fn new(
        curve: ForceVelocityCurve,
        epsilon: f64,
        motor_noise_var: f64,
        stallibility: f64,
        theta_tilde: f64,
        motors: usize,
        tether: Tether,
    ) -> Result<Self> {
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(invalid("epsilon", "must be nonnegative"));
        }
        if !(motor_noise_var >= 0.0 && motor_noise_var.is_finite()) {
            return Err(invalid("motor_noise_var", "must be nonnegative"));
        }
        if !(stallibility > 0.0) || !theta_tilde.is_finite() {
            return Err(invalid("stallibility", "must be positive, with finite trap force"));
        }
        if motors == 0 {
            return Err(invalid("motors", "need at least one motor"));
        }
        Ok(Self { epsilon, motor_noise_var, cargo_noise: 1.0, stallibility, theta_tilde, motors, tether, curve })
    }

    pub fn with_cargo_noise(mut self, scale: f64) -> Self {
        self.cargo_noise = scale;
        self
    }

    pub fn from_groups(
        curve: ForceVelocityCurve,
        g: &DimensionlessGroups,
        motors: usize,
        tether: Tether,
    ) -> Result<Self> {
        Self::new(curve, g.epsilon, g.sigma_mc2(), g.stallibility, g.theta_tilde, motors, tether)
    }

    /// Model and groups for physical parameters; general laws become tethers
    /// with the law's `lambda`.
    pub fn from_physical(
        p: &PhysicalParams,
        curve: ForceVelocityCurve,
        law: &SpringLaw,
    ) -> Result<(Self, DimensionlessGroups)> {
        let g = compute_groups(p, law)?;
        let tether = match law {
            SpringLaw::Linear { .. } => Tether::Linear,
            SpringLaw::General { potential, .. } => {
                Tether::General { potential: potential.clone(), lambda: g.lambda.expect("general laws carry lambda") }
            }
        };
        Ok((Self::from_groups(curve, &g, p.motor_count as usize, tether)?, g))
    }

    /// State dimension `N + 1`.
    pub fn dim(&self) -> usize {
        self.motors + 1
    }

    pub fn initial_state(&self, ic: &InitialCondition) -> Result<Vec<f64>> {
        match ic {
            InitialCondition::Default => {
                let mut s = vec![0.0; self.dim()];
                s[self.motors] = -self.theta_tilde / self.motors as f64;
                Ok(s)
            }
            InitialCondition::Explicit(v) if v.len() == self.dim() && v.iter().all(|x| x.is_finite()) => Ok(v.clone()),
            InitialCondition::Explicit(_) => Err(invalid("initial_condition", "need N + 1 finite values")),
        }
    }

    /// One Euler–Maruyama step; `noise` holds `N + 1` standard normal draws.
    #[inline]
    pub fn step(&self, state: &mut [f64], dt: f64, noise: &[f64]) {
        let n = self.motors;
        let z = state[n];
        let motor_scale = (self.motor_noise_var * dt).sqrt();
        let mut pull = 0.0;
        for i in 0..n {
            let f = self.tether.force(state[i] - z);
            pull += f;
            state[i] += self.epsilon * self.curve.value(self.stallibility * f) * dt + motor_scale * noise[i];
        }
        state[n] = z + (pull - self.theta_tilde) * dt + self.cargo_noise * dt.sqrt() * noise[n];
    }

    fn check(&self, state: &[f64], replica: u64, step: u64) -> Result<()> {
        if state.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { replica, step, state: state.to_vec() });
        }
        if let Tether::General { .. } = self.tether {
            let z = state[self.motors];
            for &x in &state[..self.motors] {
                if !self.tether.in_domain(x - z) {
                    return Err(Error::SpringDomainExit { replica, step, separation: x - z });
                }
            }
        }
        Ok(())
    }
}

/// Random stream of replica `r`: ChaCha8 keyed by `seed`, stream `r`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// One replica's recorded path.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ReplicaPath {
    pub replica: u64,
    /// Samples at steps `0, stride, 2 stride, ...`, flattened `[X.., Z]` rows.
    pub samples: Vec<f64>,
    /// State at the burn-in step.
    pub burn_in_state: Vec<f64>,
    pub final_state: Vec<f64>,
}

pub fn integrate_replica(model: &MotorCargoModel, cfg: &SimConfig, replica: u64) -> Result<ReplicaPath> {
    cfg.validate()?;
    let mut rng = replica_rng(cfg.seed, replica);
    let mut state = model.initial_state(&cfg.initial_condition)?;
    model.check(&state, replica, 0)?;
    let n_steps = cfg.n_steps();
    let burn = cfg.burn_in_step();
    let stride = cfg.record_stride as u64;
    let dim = model.dim();
    let mut samples = Vec::with_capacity((n_steps / stride + 1) as usize * dim);
    samples.extend_from_slice(&state);
    let mut burn_in_state = if burn == 0 { state.clone() } else { Vec::new() };
    let mut noise = vec![0.0; dim];
    for k in 1..=n_steps {
        for w in noise.iter_mut() {
            *w = StandardNormal.sample(&mut rng);
        }
        model.step(&mut state, cfg.dt, &noise);
        model.check(&state, replica, k)?;
        if k % stride == 0 {
            samples.extend_from_slice(&state);
        }
        if k == burn {
            burn_in_state = state.clone();
        }
    }
    Ok(ReplicaPath { replica, samples, burn_in_state, final_state: state })
}

/// Replica paths sharing one time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryEnsemble {
    pub motors: usize,
    pub dt: f64,
    pub record_stride: usize,
    pub n_steps: u64,
    pub burn_in_step: u64,
    pub seed: u64,
    /// In replica order.
    pub replicas: Vec<ReplicaPath>,
}

impl TrajectoryEnsemble {
    /// Assembles replicas (in any order) into replica-index order.
    pub fn from_replicas(model: &MotorCargoModel, cfg: &SimConfig, mut replicas: Vec<ReplicaPath>) -> Self {
        replicas.sort_by_key(|r| r.replica);
        Self {
            motors: model.motors,
            dt: cfg.dt,
            record_stride: cfg.record_stride,
            n_steps: cfg.n_steps(),
            burn_in_step: cfg.burn_in_step(),
            seed: cfg.seed,
            replicas,
        }
    }

    pub fn dim(&self) -> usize {
        self.motors + 1
    }

    /// Fast time of the `k`-th recorded sample.
    pub fn sample_time(&self, k: usize) -> f64 {
        (k * self.record_stride) as f64 * self.dt
    }

    pub fn n_samples(&self) -> usize {
        self.replicas.first().map_or(0, |r| r.samples.len() / self.dim())
    }

    /// Fast time between burn-in and the end.
    pub fn window(&self) -> f64 {
        (self.n_steps - self.burn_in_step) as f64 * self.dt
    }

    /// `f(state)` over every recorded sample strictly after burn-in, all replicas.
    pub fn post_burn_in_samples(&self, mut f: impl FnMut(&[f64]) -> f64) -> Vec<f64> {
        let dim = self.dim();
        let first = (self.burn_in_step / self.record_stride as u64 + 1) as usize;
        let mut out = Vec::new();
        for r in &self.replicas {
            for row in r.samples.chunks_exact(dim).skip(first) {
                out.push(f(row));
            }
        }
        out
    }

    /// Post-burn-in displacement of the mean motor position, per replica.
    pub fn displacements(&self) -> Vec<f64> {
        let n = self.motors as f64;
        let centroid = |s: &[f64]| s[..self.motors].iter().sum::<f64>() / n;
        self.replicas.iter().map(|r| centroid(&r.final_state) - centroid(&r.burn_in_state)).collect()
    }
}

pub fn integrate_system(model: &MotorCargoModel, cfg: &SimConfig) -> Result<TrajectoryEnsemble> {
    cfg.validate()?;
    let replicas = (0..cfg.n_replicas as u64).map(|r| integrate_replica(model, cfg, r)).collect::<Result<Vec<_>>>()?;
    Ok(TrajectoryEnsemble::from_replicas(model, cfg, replicas))
}

/// Long-run transport estimated across replicas.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct TransportSummary {
    /// Per fast time unit, in `length_ref` units.
    pub velocity_fast: f64,
    pub velocity_fast_se: f64,
    pub diffusivity_fast: f64,
    pub diffusivity_fast_se: Option<f64>,
    pub velocity_nm_s: f64,
    pub velocity_nm_s_se: f64,
    pub diffusivity_nm2_s: f64,
    pub diffusivity_nm2_s_se: Option<f64>,
    /// Post-burn-in displacements (nm).
    pub displacements_nm: Vec<f64>,
    pub elapsed_fast: f64,
    pub effective_sample_size: usize,
}

impl TransportSummary {
    /// Velocity in units of the free motor velocity.
    pub fn velocity_slow(&self, g: &DimensionlessGroups) -> f64 {
        self.velocity_nm_s / g.velocity_ref
    }

    pub fn diffusivity_slow(&self, g: &DimensionlessGroups) -> f64 {
        self.diffusivity_nm2_s / (g.length_ref * g.velocity_ref)
    }
}

/// Velocity `mean(dx) / T` and diffusivity `var(dx) / (2 T)` of the mean
/// motor position over the post-burn-in window `T`.
pub fn estimate_transport(ens: &TrajectoryEnsemble, g: &DimensionlessGroups) -> Result<TransportSummary> {
    let t = ens.window();
    if t < MIN_WINDOW {
        return Err(Error::WindowTooShort { window: t, required: MIN_WINDOW });
    }
    let dx = ens.displacements();
    let n = dx.len();
    let v = stats::mean(&dx) / t;
    let (v_se, d, d_se) = if n >= 2 {
        let d = stats::variance(&dx) / (2.0 * t);
        let d_se = (n >= MIN_REPLICAS_FOR_DIFFUSIVITY_SE).then(|| stats::variance_standard_error(&dx) / (2.0 * t));
        (stats::standard_error(&dx) / t, d, d_se)
    } else {
        (f64::NAN, f64::NAN, None)
    };
    let lv = g.length_ref / g.time_ref;
    let ld = g.length_ref * g.length_ref / g.time_ref;
    Ok(TransportSummary {
        velocity_fast: v,
        velocity_fast_se: v_se,
        diffusivity_fast: d,
        diffusivity_fast_se: d_se,
        velocity_nm_s: v * lv,
        velocity_nm_s_se: v_se * lv,
        diffusivity_nm2_s: d * ld,
        diffusivity_nm2_s_se: d_se.map(|e| e * ld),
        displacements_nm: dx.iter().map(|x| x * g.length_ref).collect(),
        elapsed_fast: t,
        effective_sample_size: n,
    })
}

/// Tether for a general potential at the given `lambda`.
pub fn general_tether(potential: SpringPotential, lambda: f64) -> Tether {
    Tether::General { potential, lambda }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn frozen(theta: f64, n: usize) -> MotorCargoModel {
        MotorCargoModel::new(ForceVelocityCurve::Linear, 0.0, 0.0, 0.24, theta, n, Tether::Linear).unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = SimConfig::for_epsilon(3e-3);
        assert_eq!(c.t_final, 10.0 / 3e-3);
        c.validate().unwrap();
        c.dt = 0.06;
        assert!(c.validate().is_err());
        let mut c = SimConfig::for_epsilon(3.0);
        assert_eq!(c.t_final, 1000.0);
        c.burn_in = 1.0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn frozen_motor_cargo_is_ou() {
        let model = frozen(0.0, 1);
        let cfg = SimConfig { n_replicas: 4, t_final: 2000.0, record_stride: 10, ..SimConfig::for_epsilon(0.0) };
        let ens = integrate_system(&model, &cfg).unwrap();
        let y = ens.post_burn_in_samples(|s| s[0] - s[1]);
        let m = stats::mean(&y);
        let v = stats::variance(&y);
        assert!(m.abs() < 0.03, "{m}");
        // Euler-Maruyama stationary variance is 1 / (2 - dt).
        assert!((v - 0.5).abs() < 0.03, "{v}");
        assert!(ens.replicas.iter().all(|r| r.final_state[0] == 0.0));
    }

    #[test]
    fn same_seed_same_paths() {
        let model = MotorCargoModel::new(
            ForceVelocityCurve::sigmoid(600.0, -50.0, 500.0).unwrap(),
            0.1,
            0.2,
            0.24,
            1.0,
            2,
            Tether::Linear,
        )
        .unwrap();
        let cfg = SimConfig { n_replicas: 3, t_final: 50.0, seed: 9, ..SimConfig::for_epsilon(0.1) };
        let a = integrate_system(&model, &cfg).unwrap();
        let b = integrate_system(&model, &cfg).unwrap();
        assert_eq!(a, b);
        let r2 = integrate_replica(&model, &cfg, 2).unwrap();
        assert_eq!(r2, a.replicas[2]);
        let other = integrate_system(&model, &SimConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(a.replicas[0].final_state, other.replicas[0].final_state);
    }

    #[test]
    fn wlc_domain_exit_reported() {
        let tether = Tether::General { potential: SpringPotential::wormlike_chain(0.34, 70.0).unwrap(), lambda: 0.5 };
        let model = MotorCargoModel::new(ForceVelocityCurve::Linear, 0.0, 0.0, 0.24, 0.0, 1, tether).unwrap();
        let cfg =
            SimConfig { initial_condition: InitialCondition::Explicit(vec![0.0, -2.5]), ..SimConfig::for_epsilon(0.0) };
        assert!(matches!(integrate_replica(&model, &cfg, 0), Err(Error::SpringDomainExit { .. })));
    }

    #[test]
    fn estimator_window_and_small_ensembles() {
        let model = frozen(0.0, 1);
        let g = DimensionlessGroups::from_values(1.0, 0.24, 1.0, 0.0).unwrap();
        let short = SimConfig { t_final: 100.0, n_replicas: 2, ..SimConfig::for_epsilon(1.0) };
        let ens = integrate_system(&model, &short).unwrap();
        assert!(matches!(estimate_transport(&ens, &g), Err(Error::WindowTooShort { .. })));
        let cfg = SimConfig { t_final: 200.0, n_replicas: 4, ..short };
        let s = estimate_transport(&integrate_system(&model, &cfg).unwrap(), &g).unwrap();
        assert!(s.diffusivity_nm2_s_se.is_none());
        assert_eq!(s.velocity_nm_s, 0.0);
        assert_relative_eq!(s.elapsed_fast, 180.0, max_relative = 1e-12);
    }
}
