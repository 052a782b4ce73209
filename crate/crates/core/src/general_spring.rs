//! Averaged motor drifts and the (non-Gaussian) quasi-stationary cargo law
//! for arbitrary, possibly per-motor, tail potentials.

use alloc::vec::Vec;

use crate::averaging::{EffectiveTransport, PairDrift};
use crate::curve::ForceVelocityCurve;
use crate::density::{DensityOptions, StationaryDensity1D};
use crate::error::{invalid, Error, Result};
use crate::nondim::DimensionlessGroups;
use crate::quad::trapezoid;
use crate::spline::CubicTable;
use crate::spring::{SpringPotential, Tether};

/// Above this `lambda` the rescaling is questionable; results carry a warning.
pub const LAMBDA_WARN: f64 = 1.0;
/// Above this `lambda` construction fails.
pub const LAMBDA_MAX: f64 = 1.5;

/// Per-motor tail potentials sharing the length scale behind `lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralSpringSet {
    potentials: Vec<SpringPotential>,
    lambda: f64,
}

impl GeneralSpringSet {
    pub fn new(potentials: Vec<SpringPotential>, lambda: f64) -> Result<Self> {
        if potentials.is_empty() {
            return Err(invalid("springs", "need at least one potential"));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid("lambda", "must be positive"));
        }
        if lambda > LAMBDA_MAX {
            return Err(invalid("lambda", alloc::format!("{lambda} exceeds {LAMBDA_MAX}")));
        }
        let set = Self { potentials, lambda };
        set.check_confinement()?;
        Ok(set)
    }

    /// `n` copies of the same potential.
    pub fn homogeneous(potential: SpringPotential, n: usize, lambda: f64) -> Result<Self> {
        Self::new(alloc::vec![potential; n], lambda)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.potentials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.potentials.is_empty()
    }

    pub fn potentials(&self) -> &[SpringPotential] {
        &self.potentials
    }

    /// True when `lambda` is above [`LAMBDA_WARN`].
    pub fn lambda_warning(&self) -> bool {
        self.lambda > LAMBDA_WARN
    }

    pub fn tether(&self, i: usize) -> Tether {
        Tether::General { potential: self.potentials[i].clone(), lambda: self.lambda }
    }

    /// Each tail alone must hold the cargo: `exp(-2 Phi(lambda y) / lambda^2)`
    /// has to be normalizable on the tail's domain.
    pub fn check_confinement(&self) -> Result<()> {
        for i in 0..self.len() {
            let single = Self { potentials: alloc::vec![self.potentials[i].clone()], lambda: self.lambda };
            cargo_density_general(&[0.0], 0.0, &single).map_err(|e| match e {
                Error::NotLocalized { lo, hi } => {
                    Error::NotConfined(alloc::format!("tail {i} does not confine the cargo on [{lo}, {hi}]"))
                }
                other => other,
            })?;
        }
        Ok(())
    }

    /// Open interval of cargo positions compatible with all tails.
    fn cargo_domain(&self, x: &[f64]) -> (f64, f64) {
        let mut lo = f64::NEG_INFINITY;
        let mut hi = f64::INFINITY;
        for (xi, p) in x.iter().zip(&self.potentials) {
            let (a, b) = p.domain();
            // lambda (x_i - z) in (a, b)  <=>  z in (x_i - b / lambda, x_i - a / lambda)
            lo = lo.max(xi - b / self.lambda);
            hi = hi.min(xi - a / self.lambda);
        }
        (lo, hi)
    }

    fn log_cargo(&self, x: &[f64], theta: f64, z: f64) -> f64 {
        let l2 = self.lambda * self.lambda;
        let mut e = theta * z;
        for (xi, p) in x.iter().zip(&self.potentials) {
            let xi_arg = self.lambda * (xi - z);
            if !p.in_domain(xi_arg) {
                return f64::NEG_INFINITY;
            }
            e += p.energy_unchecked(xi_arg) / l2;
        }
        -2.0 * e
    }
}

fn cargo_opts(n: usize) -> DensityOptions {
    DensityOptions { half_width: 6.0 / (n as f64).sqrt(), ..DensityOptions::default() }
}

/// Quasi-stationary cargo law for motors frozen at `x`:
/// `m(z) ~ exp(-2 [theta~ z + lambda^-2 sum_i Phi_i(lambda (x_i - z))])`.
pub fn cargo_density_general(x: &[f64], theta: f64, springs: &GeneralSpringSet) -> Result<StationaryDensity1D> {
    cargo_density_general_with(x, theta, springs, &cargo_opts(x.len()))
}

pub fn cargo_density_general_with(
    x: &[f64],
    theta: f64,
    springs: &GeneralSpringSet,
    opts: &DensityOptions,
) -> Result<StationaryDensity1D> {
    if x.len() != springs.len() {
        return Err(invalid("motor positions", "one position per tail potential"));
    }
    let (lo, hi) = springs.cargo_domain(x);
    if !(lo < hi) {
        return Err(Error::Domain { what: "cargo position (tails cannot all reach)", value: hi - lo });
    }
    let n = x.len() as f64;
    let guess = (x.iter().sum::<f64>() - theta) / n;
    let center = if guess > lo && guess < hi {
        guess
    } else if lo.is_finite() && hi.is_finite() {
        0.5 * (lo + hi)
    } else if lo.is_finite() {
        lo + 1.0
    } else {
        hi - 1.0
    };
    StationaryDensity1D::from_log_fn(|z| springs.log_cargo(x, theta, z), center, (lo, hi), opts)
}

/// Averaged drift of motor `i`: `int g(s Phi_i'(lambda (x_i - z)) / lambda) m(z) dz`.
pub fn averaged_drift_general(
    curve: &ForceVelocityCurve,
    s: f64,
    x: &[f64],
    theta: f64,
    springs: &GeneralSpringSet,
    i: usize,
) -> Result<f64> {
    let m = cargo_density_general(x, theta, springs)?;
    Ok(drift_against(curve, s, x, springs, i, &m))
}

fn drift_against(
    curve: &ForceVelocityCurve,
    s: f64,
    x: &[f64],
    springs: &GeneralSpringSet,
    i: usize,
    m: &StationaryDensity1D,
) -> f64 {
    let lambda = springs.lambda;
    let p = &springs.potentials[i];
    let pdf = m.pdf();
    let vals: Vec<f64> = pdf
        .iter()
        .enumerate()
        .map(|(k, w)| {
            let f = p.force_unchecked(lambda * (x[i] - m.node(k))) / lambda;
            w * curve.value(s * f)
        })
        .collect();
    trapezoid(&vals, m.spacing())
}

/// One-motor averaged velocity under a general tail (slow-time units), with
/// diffusivity `rho / 2`.
pub fn one_motor_velocity_general(
    curve: &ForceVelocityCurve,
    g: &DimensionlessGroups,
    springs: &GeneralSpringSet,
) -> Result<EffectiveTransport> {
    if springs.len() != 1 {
        return Err(invalid("springs", "one-motor velocity needs exactly one tail"));
    }
    let m = cargo_density_general(&[0.0], g.theta_tilde, springs)?;
    let v = drift_against(curve, g.stallibility, &[0.0], springs, 0, &m);
    Ok(EffectiveTransport {
        velocity: v,
        velocity_nm_s: g.velocity_to_physical(v),
        diffusivity: Some(g.rho / 2.0),
        diffusivity_nm2_s: Some(g.diffusivity_to_physical(g.rho / 2.0)),
        regime: crate::nondim::regime_classify(g),
        quad_error: m.quad_error(),
        flagged: springs.lambda_warning(),
    })
}

/// Two-motor pair drift under general tails, tabulated in the separation
/// for one trap force and interpolated by cubic splines; separations off
/// the table, or other trap forces, are evaluated directly.
#[derive(Debug, Clone)]
pub struct GeneralPair<'a> {
    curve: &'a ForceVelocityCurve,
    s: f64,
    springs: GeneralSpringSet,
    theta: f64,
    d1: CubicTable,
    d2: CubicTable,
    domain: (f64, f64),
}

/// Separation half-range tabulated when the tails do not bound it.
pub const PAIR_TABLE_RANGE: f64 = 80.0;
pub const PAIR_TABLE_NODES: usize = 1601;

impl<'a> GeneralPair<'a> {
    pub fn new(curve: &'a ForceVelocityCurve, s: f64, springs: GeneralSpringSet, theta: f64) -> Result<Self> {
        if springs.len() != 2 {
            return Err(invalid("springs", "pair drift needs exactly two tails"));
        }
        let (a1, b1) = springs.potentials[0].domain();
        let (a2, b2) = springs.potentials[1].domain();
        // Finite bounds are pulled in slightly and become the reported domain,
        // so densities never query the stiff edge layer off the table.
        let shrink = |b: f64| if b.is_finite() { b * (1.0 - 1e-6) } else { b };
        let domain = (shrink((a1 - b2) / springs.lambda), shrink((b1 - a2) / springs.lambda));
        let (lo, hi) = (domain.0.max(-PAIR_TABLE_RANGE), domain.1.min(PAIR_TABLE_RANGE));
        let h = (hi - lo) / (PAIR_TABLE_NODES - 1) as f64;
        let opts = DensityOptions { nodes: 801, coarse_nodes: 201, ..cargo_opts(2) };
        let mut v1 = Vec::with_capacity(PAIR_TABLE_NODES);
        let mut v2 = Vec::with_capacity(PAIR_TABLE_NODES);
        for k in 0..PAIR_TABLE_NODES {
            let r = lo + k as f64 * h;
            let (d1, d2) = direct_drifts(curve, s, &springs, r, theta, &opts)?;
            v1.push(d1);
            v2.push(d2);
        }
        Ok(Self { curve, s, theta, d1: CubicTable::new(lo, h, v1)?, d2: CubicTable::new(lo, h, v2)?, springs, domain })
    }
}

fn direct_drifts(
    curve: &ForceVelocityCurve,
    s: f64,
    springs: &GeneralSpringSet,
    r: f64,
    theta: f64,
    opts: &DensityOptions,
) -> Result<(f64, f64)> {
    // Only separations matter; put the pair at (r/2, -r/2).
    let x = [0.5 * r, -0.5 * r];
    let m = cargo_density_general_with(&x, theta, springs, opts)?;
    Ok((drift_against(curve, s, &x, springs, 0, &m), drift_against(curve, s, &x, springs, 1, &m)))
}

impl PairDrift for GeneralPair<'_> {
    fn drifts(&self, r: f64, theta: f64) -> (f64, f64) {
        if theta == self.theta && self.d1.contains(r) {
            return (self.d1.value(r), self.d2.value(r));
        }
        direct_drifts(self.curve, self.s, &self.springs, r, theta, &cargo_opts(2)).unwrap_or((f64::NAN, f64::NAN))
    }

    fn domain(&self) -> (f64, f64) {
        self.domain
    }
}
