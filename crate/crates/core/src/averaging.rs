//! Quadrature side of the averaged models: Gaussian averages of `g`, one-motor
//! velocity at low and arbitrary viscosity, the two-motor separation density
//! with its effective velocity and diffusivity, and stall-force bisection.

use alloc::vec;
use alloc::vec::Vec;

use crate::curve::ForceVelocityCurve;
use crate::density::{DensityOptions, StationaryDensity1D};
use crate::error::{invalid, Error, Result};
use crate::nondim::{regime_classify, DimensionlessGroups, Regime};
use crate::params::PhysicalParams;
use crate::quad::{GaussHermite, DEFAULT_HERMITE_NODES, HERMITE_FLAG_TOL};

/// Tolerance of the stationarity identity checked by the exact one-motor velocity.
pub const CONSISTENCY_TOL: f64 = 1e-6;

/// Bisection stops once the bracket is narrower than this.
pub const STALL_TOL: f64 = 1e-4;

/// Interior samples used to check monotonicity of the velocity in a bracket.
pub const STALL_SIGN_CHECKS: usize = 16;

/// A Gaussian average and whether doubling the node count moved it by more
/// than [`HERMITE_FLAG_TOL`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianAverage {
    pub value: f64,
    pub discrepancy: f64,
    pub flagged: bool,
}

/// Gauss–Hermite rules for Gaussian averages with a node-doubling check.
#[derive(Debug, Clone)]
pub struct GaussianAverager {
    rule: GaussHermite,
    check: GaussHermite,
}

impl Default for GaussianAverager {
    fn default() -> Self {
        Self::new(DEFAULT_HERMITE_NODES)
    }
}

impl GaussianAverager {
    pub fn new(nodes: usize) -> Self {
        Self { rule: GaussHermite::new(nodes), check: GaussHermite::new(2 * nodes) }
    }

    /// Unchecked average with the base rule.
    #[inline]
    pub fn value(&self, curve: &ForceVelocityCurve, mean: f64, variance: f64) -> f64 {
        self.rule.expectation(mean, variance, |f| curve.value(f))
    }

    pub fn average(&self, curve: &ForceVelocityCurve, mean: f64, variance: f64) -> Result<GaussianAverage> {
        if !(variance >= 0.0) || !mean.is_finite() {
            return Err(invalid("gaussian average", "variance must be nonnegative and mean finite"));
        }
        let value = self.value(curve, mean, variance);
        if variance == 0.0 {
            return Ok(GaussianAverage { value, discrepancy: 0.0, flagged: false });
        }
        let discrepancy = (self.check.expectation(mean, variance, |f| curve.value(f)) - value).abs();
        Ok(GaussianAverage { value, discrepancy, flagged: discrepancy > HERMITE_FLAG_TOL })
    }
}

/// `E[g(F)]` for `F ~ N(mean, variance)` with the default 64-node rule.
pub fn gaussian_average(curve: &ForceVelocityCurve, mean: f64, variance: f64) -> Result<GaussianAverage> {
    GaussianAverager::default().average(curve, mean, variance)
}

pub fn gaussian_average_with(
    averager: &GaussianAverager,
    curve: &ForceVelocityCurve,
    mean: f64,
    variance: f64,
) -> Result<GaussianAverage> {
    averager.average(curve, mean, variance)
}

/// Effective transport of a reduced model. Velocities are in units of the
/// free motor velocity (slow time), diffusivities in slow-time units.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct EffectiveTransport {
    pub velocity: f64,
    pub velocity_nm_s: f64,
    pub diffusivity: Option<f64>,
    pub diffusivity_nm2_s: Option<f64>,
    pub regime: Regime,
    pub quad_error: f64,
    pub flagged: bool,
}

impl EffectiveTransport {
    fn new(g: &DimensionlessGroups, velocity: f64, diffusivity: Option<f64>, quad_error: f64, flagged: bool) -> Self {
        Self {
            velocity,
            velocity_nm_s: g.velocity_to_physical(velocity),
            diffusivity,
            diffusivity_nm2_s: diffusivity.map(|d| g.diffusivity_to_physical(d)),
            regime: regime_classify(g),
            quad_error,
            flagged,
        }
    }
}

/// One motor with the cargo force averaged over its Gaussian quasi-stationary
/// law: velocity `<g>(s theta~, s^2 / 2)`, diffusivity `rho / 2`.
pub fn one_motor_velocity_low_visc(curve: &ForceVelocityCurve, g: &DimensionlessGroups) -> Result<EffectiveTransport> {
    let s = g.stallibility;
    let avg = gaussian_average(curve, s * g.theta_tilde, s * s / 2.0)?;
    Ok(EffectiveTransport::new(g, avg.value, Some(g.rho / 2.0), avg.discrepancy, avg.flagged))
}

fn pi_y_opts(g: &DimensionlessGroups) -> DensityOptions {
    DensityOptions { half_width: 8.0 * (1.0 + g.epsilon * g.rho).sqrt(), ..DensityOptions::default() }
}

/// Stationary law of the motor-cargo separation `Y` for one motor at any
/// `epsilon`: `log pi_Y(y) = [-(y - theta~)^2 + 2 eps int_0^y g(s u) du] / (1 + eps rho)`.
pub fn pi_y_density(curve: &ForceVelocityCurve, g: &DimensionlessGroups) -> Result<StationaryDensity1D> {
    pi_y_density_with(curve, g, &pi_y_opts(g))
}

pub fn pi_y_density_with(
    curve: &ForceVelocityCurve,
    g: &DimensionlessGroups,
    opts: &DensityOptions,
) -> Result<StationaryDensity1D> {
    if !(g.epsilon > 0.0) {
        return Err(invalid("epsilon", "must be positive"));
    }
    let (eps, s, th) = (g.epsilon, g.stallibility, g.theta_tilde);
    let diff = 1.0 + eps * g.rho;
    StationaryDensity1D::from_log_derivative(
        |y| 2.0 * (eps * curve.value(s * y) - (y - th)) / diff,
        th,
        (f64::NEG_INFINITY, f64::INFINITY),
        opts,
    )
}

/// One-motor velocity at arbitrary `epsilon`, averaging `g(s Y)` against
/// `pi_Y`. The stationarity identity `<g(sY)> = (<Y> - theta~) / eps` is
/// checked to [`CONSISTENCY_TOL`]; a mismatch flags the result.
pub fn one_motor_velocity_exact(curve: &ForceVelocityCurve, g: &DimensionlessGroups) -> Result<EffectiveTransport> {
    let pi = pi_y_density(curve, g)?;
    let s = g.stallibility;
    let (v, err) = pi.integrate_with_error(|y| curve.value(s * y));
    let balance = (pi.mean() - g.theta_tilde) / g.epsilon;
    let mismatch = (v - balance).abs() / v.abs().max(1e-300);
    let flagged = !(mismatch <= CONSISTENCY_TOL);
    Ok(EffectiveTransport::new(g, v, None, err + pi.quad_error(), flagged))
}

/// Force-balance velocity of the linearized motor, `v (1 - theta/F*) / (1 + gamma v / F*)` (nm/s).
pub fn one_motor_velocity_linear_approx(p: &PhysicalParams) -> Result<f64> {
    if p.trap_force.abs() > p.stall_force {
        return Err(Error::Domain { what: "linear force-velocity approximation", value: p.trap_force });
    }
    let f = p.stall_force;
    Ok(p.free_velocity * (1.0 - p.trap_force / f) / (1.0 + p.friction() * p.free_velocity / f))
}

/// Averaged drifts of a two-motor pair at separation `r = x1 - x2`.
pub trait PairDrift {
    /// `(drift of motor 1, drift of motor 2)` under rescaled trap force `theta`.
    fn drifts(&self, r: f64, theta: f64) -> (f64, f64);

    /// Open interval of admissible separations.
    fn domain(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }

    /// `G_-(r) = d2 - d1`, the restoring drift of the separation.
    fn g_minus(&self, r: f64, theta: f64) -> f64 {
        let (d1, d2) = self.drifts(r, theta);
        d2 - d1
    }

    /// `G_+(r) = d1 + d2`, twice the midpoint drift.
    fn g_plus(&self, r: f64, theta: f64) -> f64 {
        let (d1, d2) = self.drifts(r, theta);
        d1 + d2
    }

    /// Largest node-doubling discrepancy of the underlying averages on a
    /// sample of separations, when applicable.
    fn quadrature_discrepancy(&self, _rs: &[f64], _theta: f64) -> f64 {
        0.0
    }
}

/// Pair drifts built from a single profile `G`: motor 1 moves at
/// `G(-r - theta)`, motor 2 at `G(r - theta)`.
pub trait ProfileDrift {
    fn profile(&self, r: f64) -> f64;

    fn profile_discrepancy(&self, _r: f64) -> f64 {
        0.0
    }
}

impl<T: ProfileDrift> PairDrift for T {
    #[inline]
    fn drifts(&self, r: f64, theta: f64) -> (f64, f64) {
        (self.profile(-r - theta), self.profile(r - theta))
    }

    fn quadrature_discrepancy(&self, rs: &[f64], theta: f64) -> f64 {
        rs.iter()
            .flat_map(|&r| [self.profile_discrepancy(r - theta), self.profile_discrepancy(-r - theta)])
            .fold(0.0, f64::max)
    }
}

/// Cargo pinned at its mean: `G(r) = g(-s r / 2)`.
#[derive(Debug, Clone)]
pub struct FixedCargo<'a> {
    pub curve: &'a ForceVelocityCurve,
    pub s: f64,
}

impl ProfileDrift for FixedCargo<'_> {
    #[inline]
    fn profile(&self, r: f64) -> f64 {
        self.curve.value(-self.s * r / 2.0)
    }
}

/// Cargo fluctuations averaged out: `G(r) = <g>(-r s / 2, s^2 / 4)`.
#[derive(Debug, Clone)]
pub struct FluctuatingCargo<'a> {
    pub curve: &'a ForceVelocityCurve,
    pub s: f64,
    averager: GaussianAverager,
}

impl<'a> FluctuatingCargo<'a> {
    pub fn new(curve: &'a ForceVelocityCurve, s: f64) -> Self {
        Self { curve, s, averager: GaussianAverager::default() }
    }
}

impl ProfileDrift for FluctuatingCargo<'_> {
    #[inline]
    fn profile(&self, r: f64) -> f64 {
        self.averager.value(self.curve, -r * self.s / 2.0, self.s * self.s / 4.0)
    }

    fn profile_discrepancy(&self, r: f64) -> f64 {
        self.averager
            .average(self.curve, -r * self.s / 2.0, self.s * self.s / 4.0)
            .map(|a| a.discrepancy)
            .unwrap_or(f64::INFINITY)
    }
}

pub fn g_fixed_cargo(curve: &ForceVelocityCurve, r: f64, s: f64) -> f64 {
    FixedCargo { curve, s }.profile(r)
}

pub fn g_fluctuating_cargo(curve: &ForceVelocityCurve, r: f64, s: f64) -> Result<GaussianAverage> {
    gaussian_average(curve, -r * s / 2.0, s * s / 4.0)
}

/// Stationary law of the separation `R = X1 - X2`: `pi_R ~ exp(-U / rho)`
/// with `U(r) = int_0^r G_-`. Built on a grid symmetric about zero.
pub fn pi_r_density<D: PairDrift + ?Sized>(drift: &D, rho: f64, theta: f64) -> Result<StationaryDensity1D> {
    pi_r_density_with(drift, rho, theta, &pi_r_opts(rho))
}

fn pi_r_opts(rho: f64) -> DensityOptions {
    DensityOptions { half_width: 10.0 * rho.sqrt().max(1.0), ..DensityOptions::default() }
}

pub fn pi_r_density_with<D: PairDrift + ?Sized>(
    drift: &D,
    rho: f64,
    theta: f64,
    opts: &DensityOptions,
) -> Result<StationaryDensity1D> {
    if !(rho > 0.0) {
        return Err(invalid("rho", "must be positive"));
    }
    StationaryDensity1D::from_log_derivative(|r| -drift.g_minus(r, theta) / rho, 0.0, drift.domain(), opts).map_err(
        |e| match e {
            Error::NotLocalized { lo, hi } => Error::NotConfined(alloc::format!(
                "separation potential does not grow on [{lo}, {hi}]; G_- must be increasing at both ends"
            )),
            other => other,
        },
    )
}

fn pair_transport<D: PairDrift + ?Sized>(
    drift: &D,
    g: &DimensionlessGroups,
    theta: f64,
    with_diffusivity: bool,
) -> Result<EffectiveTransport> {
    let rho = g.rho;
    let pi = pi_r_density(drift, rho, theta)?;
    let (v2, err) = pi.integrate_with_error(|r| 0.5 * drift.g_plus(r, theta));
    let grid = pi.grid();
    let sample: Vec<f64> = grid.iter().step_by(50).copied().collect();
    let disc = drift.quadrature_discrepancy(&sample, theta);
    let mut flagged = disc > HERMITE_FLAG_TOL;
    let mut quad_error = err + pi.quad_error() + disc;

    let diffusivity = if with_diffusivity {
        let (d, decays, derr) = pair_diffusivity(drift, &pi, &grid, theta, rho, v2);
        flagged |= !decays;
        quad_error += derr;
        Some(d)
    } else {
        None
    };
    Ok(EffectiveTransport::new(g, v2, diffusivity, quad_error, flagged))
}

/// `rho / 4 + int I(r)^2 / (rho pi_R(r)) dr`, with `I(r)` the running
/// integral of the centered midpoint drift against `pi_R`. `I` is
/// accumulated from the left on the left half and from the right on the
/// right half so that it vanishes at both ends.
fn pair_diffusivity<D: PairDrift + ?Sized>(
    drift: &D,
    pi: &StationaryDensity1D,
    grid: &[f64],
    theta: f64,
    rho: f64,
    v2: f64,
) -> (f64, bool, f64) {
    let h = pi.spacing();
    let p = pi.pdf();
    let n = p.len();
    let u: Vec<f64> = grid.iter().zip(&p).map(|(&r, &pk)| (0.5 * drift.g_plus(r, theta) - v2) * pk).collect();
    // Derivative of u for the end-corrected trapezoid.
    let du: Vec<f64> = (0..n)
        .map(|k| match k {
            0 => (u[1] - u[0]) / h,
            k if k == n - 1 => (u[n - 1] - u[n - 2]) / h,
            k => (u[k + 1] - u[k - 1]) / (2.0 * h),
        })
        .collect();
    let seg = |k: usize| 0.5 * h * (u[k] + u[k + 1]) - h * h / 12.0 * (du[k + 1] - du[k]);
    let mid = n / 2;
    let mut inner = vec![0.0; n];
    for k in 1..=mid {
        inner[k] = inner[k - 1] + seg(k - 1);
    }
    for k in (mid + 1..n - 1).rev() {
        inner[k] = inner[k + 1] - seg(k);
    }
    let outer: Vec<f64> =
        inner.iter().zip(&p).map(|(i, pk)| if *pk > 0.0 { i * i / (rho * pk) } else { 0.0 }).collect();
    let peak = outer.iter().copied().fold(0.0, f64::max);
    let decays = outer[0] <= 1e-8 * peak && outer[n - 1] <= 1e-8 * peak;
    let fine = crate::quad::trapezoid(&outer, h);
    let coarse = crate::quad::trapezoid_coarse(&outer, h);
    (rho / 4.0 + fine, decays, (fine - coarse).abs())
}

/// Two-motor effective velocity `int G_+ / 2 pi_R`.
pub fn two_motor_velocity<D: PairDrift + ?Sized>(
    drift: &D,
    g: &DimensionlessGroups,
    theta: f64,
) -> Result<EffectiveTransport> {
    pair_transport(drift, g, theta, false)
}

/// Two-motor effective velocity and diffusivity.
pub fn two_motor_diffusivity<D: PairDrift + ?Sized>(
    drift: &D,
    g: &DimensionlessGroups,
    theta: f64,
) -> Result<EffectiveTransport> {
    pair_transport(drift, g, theta, true)
}

/// Outcome of a stall-force bisection.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct StallResult {
    pub theta: f64,
    pub flagged: bool,
    /// First interior sample whose sign breaks the single sign change.
    pub first_non_monotone: Option<f64>,
}

/// Smallest `theta` where the velocity turns nonpositive, by bisection on
/// the sign of `velocity` over `bracket`.
pub fn stall_force(mut velocity: impl FnMut(f64) -> Result<f64>, bracket: (f64, f64)) -> Result<StallResult> {
    let (mut lo, mut hi) = bracket;
    let (v_lo, v_hi) = (velocity(lo)?, velocity(hi)?);
    if !(lo < hi && v_lo > 0.0 && v_hi <= 0.0) {
        return Err(Error::InvalidBracket { lo, hi, v_lo, v_hi });
    }
    let mut first_non_monotone = None;
    let mut seen_nonpositive = false;
    for k in 1..=STALL_SIGN_CHECKS {
        let th = lo + (hi - lo) * k as f64 / (STALL_SIGN_CHECKS + 1) as f64;
        let positive = velocity(th)? > 0.0;
        if !positive {
            seen_nonpositive = true;
        } else if seen_nonpositive {
            first_non_monotone = Some(th);
            break;
        }
    }
    while hi - lo >= STALL_TOL {
        let mid = 0.5 * (lo + hi);
        if velocity(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(StallResult { theta: 0.5 * (lo + hi), flagged: first_non_monotone.is_some(), first_non_monotone })
}

/// Default bracket for a single motor, `[0, 2/s]`.
pub fn one_motor_bracket(s: f64) -> (f64, f64) {
    (0.0, 2.0 / s)
}

/// Default bracket for two motors, `[0, 4/s]`.
pub fn two_motor_bracket(s: f64) -> (f64, f64) {
    (0.0, 4.0 / s)
}
