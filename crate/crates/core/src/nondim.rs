//! Dimensionless groups and conversions between rescaled and physical paths.

use alloc::vec::Vec;
use core::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::params::PhysicalParams;
use crate::spring::SpringLaw;

/// Default `epsilon` threshold between the two transport regimes (inclusive
/// on the diffusion-dominated side).
pub const DEFAULT_REGIME_THRESHOLD: f64 = 0.1;

/// Groups governing the rescaled system.
///
/// Lengths are in units of `length_ref = sqrt(2 k_B T / kappa)` (with the
/// factor of two, about 4.9 nm for kinesin rather than the 3.5 nm of
/// `sqrt(k_B T / kappa)`); fast time in units of `time_ref = gamma / kappa`;
/// slow time in units of `length_ref / v`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DimensionlessGroups {
    pub epsilon: f64,
    /// Stallibility `s`.
    pub stallibility: f64,
    pub theta_tilde: f64,
    pub sigma_mc: f64,
    pub rho: f64,
    /// Thermal tail extension over the spring length scale; general laws only.
    pub lambda: Option<f64>,
    /// nm.
    pub length_ref: f64,
    /// s.
    pub time_ref: f64,
    /// Free motor velocity (nm/s).
    pub velocity_ref: f64,
}

impl DimensionlessGroups {
    /// Groups from nondimensional values alone, with `length_ref = 1` and
    /// `velocity_ref = 1`, so that dimensional outputs equal slow-time ones.
    pub fn from_values(epsilon: f64, stallibility: f64, rho: f64, theta_tilde: f64) -> Result<Self> {
        if !(epsilon > 0.0 && stallibility > 0.0 && rho > 0.0) {
            return Err(invalid("groups", "epsilon, s and rho must be positive"));
        }
        if !theta_tilde.is_finite() {
            return Err(invalid("theta_tilde", "must be finite"));
        }
        Ok(Self {
            epsilon,
            stallibility,
            theta_tilde,
            sigma_mc: (epsilon * rho).sqrt(),
            rho,
            lambda: None,
            length_ref: 1.0,
            time_ref: epsilon,
            velocity_ref: 1.0,
        })
    }

    pub fn with_theta_tilde(mut self, theta_tilde: f64) -> Self {
        self.theta_tilde = theta_tilde;
        self
    }

    pub fn sigma_mc2(&self) -> f64 {
        self.sigma_mc * self.sigma_mc
    }

    /// Seconds per slow time unit.
    pub fn slow_time_unit(&self) -> f64 {
        self.length_ref / self.velocity_ref
    }

    /// Slow-time velocity to nm/s.
    pub fn velocity_to_physical(&self, v: f64) -> f64 {
        v * self.velocity_ref
    }

    /// Slow-time diffusivity to nm^2/s.
    pub fn diffusivity_to_physical(&self, d: f64) -> f64 {
        d * self.length_ref * self.velocity_ref
    }

    /// Trap force in pN for a rescaled value, given the stall force.
    pub fn trap_force_physical(&self, theta_tilde: f64, stall_force: f64) -> f64 {
        theta_tilde * stall_force * self.stallibility
    }
}

/// Groups for `p` with tail law `law`; for general laws the stiffness is the
/// linear-regime value `F / L_c`.
pub fn compute_groups(p: &PhysicalParams, law: &SpringLaw) -> Result<DimensionlessGroups> {
    p.validate()?;
    let kappa = law.stiffness();
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(invalid("spring", "stiffness must be positive"));
    }
    let gamma = p.friction();
    let thermal_force = (2.0 * p.kbt * kappa).sqrt();
    let length_ref = (2.0 * p.kbt / kappa).sqrt();
    let sigma_mc2 = p.motor_diffusion_sigma2 * gamma / (2.0 * p.kbt);
    Ok(DimensionlessGroups {
        epsilon: p.free_velocity * gamma / thermal_force,
        stallibility: thermal_force / p.stall_force,
        theta_tilde: p.trap_force / thermal_force,
        sigma_mc: sigma_mc2.sqrt(),
        rho: p.motor_diffusion_sigma2 * kappa.sqrt() / (p.free_velocity * (2.0 * p.kbt).sqrt()),
        lambda: law.length_scale().map(|lc| length_ref / lc),
        length_ref,
        time_ref: gamma / kappa,
        velocity_ref: p.free_velocity,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Regime {
    DiffusionDominated,
    DragDominated,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::DiffusionDominated => "diffusion_dominated",
            Self::DragDominated => "drag_dominated",
        }
    }
}

pub fn regime_classify(g: &DimensionlessGroups) -> Regime {
    regime_classify_with(g, DEFAULT_REGIME_THRESHOLD)
}

pub fn regime_classify_with(g: &DimensionlessGroups, threshold: f64) -> Regime {
    if g.epsilon <= threshold {
        Regime::DiffusionDominated
    } else {
        Regime::DragDominated
    }
}

/// Which rescaled clock a path is sampled on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TimeBase {
    /// `t_bar`, in units of `length_ref / v`.
    Slow,
    /// `t_tilde`, in units of `gamma / kappa`.
    Fast,
}

impl FromStr for TimeBase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "slow" | "t_bar" => Ok(Self::Slow),
            "fast" | "t_tilde" => Ok(Self::Fast),
            _ => Err(invalid("time_base", alloc::format!("unknown time base `{s}` (expected slow or fast)"))),
        }
    }
}

impl TimeBase {
    fn seconds_per_unit(&self, g: &DimensionlessGroups) -> f64 {
        match self {
            Self::Slow => g.slow_time_unit(),
            Self::Fast => g.time_ref,
        }
    }
}

/// Path in rescaled units; `positions` holds `width` coordinates per time.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionlessPath {
    pub time_base: TimeBase,
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub width: usize,
}

/// Path in seconds and nanometres.
#[derive(Debug, Clone, PartialEq)]
pub struct PhysicalPath {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub width: usize,
}

fn check_shape(times: &[f64], positions: &[f64], width: usize) -> Result<()> {
    if width == 0 || positions.len() != times.len() * width {
        return Err(invalid("path", "positions must hold `width` values per time"));
    }
    Ok(())
}

pub fn rescale_trajectory(path: &DimensionlessPath, g: &DimensionlessGroups) -> Result<PhysicalPath> {
    check_shape(&path.times, &path.positions, path.width)?;
    let tu = path.time_base.seconds_per_unit(g);
    Ok(PhysicalPath {
        times: path.times.iter().map(|t| t * tu).collect(),
        positions: path.positions.iter().map(|x| x * g.length_ref).collect(),
        width: path.width,
    })
}

/// Inverse of [`rescale_trajectory`].
pub fn nondimensionalize_trajectory(
    path: &PhysicalPath,
    base: TimeBase,
    g: &DimensionlessGroups,
) -> Result<DimensionlessPath> {
    check_shape(&path.times, &path.positions, path.width)?;
    let tu = base.seconds_per_unit(g);
    Ok(DimensionlessPath {
        time_base: base,
        times: path.times.iter().map(|t| t / tu).collect(),
        positions: path.positions.iter().map(|x| x / g.length_ref).collect(),
        width: path.width,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn preset() -> DimensionlessGroups {
        compute_groups(&PhysicalParams::kinesin_invitro(), &SpringLaw::linear(0.34)).unwrap()
    }

    #[test]
    fn preset_groups() {
        let g = preset();
        assert_relative_eq!(g.epsilon, 2.9945e-3, max_relative = 1e-4);
        assert_relative_eq!(g.stallibility, 0.2385329, max_relative = 1e-6);
        assert_relative_eq!(g.rho, 2.03626, max_relative = 1e-5);
        assert_relative_eq!(g.sigma_mc2(), 6.0976e-3, max_relative = 1e-4);
        assert_relative_eq!(g.length_ref, 4.91098, max_relative = 1e-5);
        assert_eq!(g.theta_tilde, 0.0);
        assert!(g.lambda.is_none());
    }

    #[test]
    fn identities() {
        let g = preset();
        assert_relative_eq!(g.epsilon * g.rho, g.sigma_mc2(), max_relative = 1e-12);
        assert_relative_eq!(g.time_ref * g.velocity_ref / g.length_ref, g.epsilon, max_relative = 1e-12);
    }

    #[test]
    fn thousandfold_viscosity() {
        let p = PhysicalParams::kinesin_invitro().with_friction(1e-2);
        let g = compute_groups(&p, &SpringLaw::linear(0.34)).unwrap();
        assert_relative_eq!(g.epsilon, 2.9945, max_relative = 1e-4);
        assert_eq!(regime_classify(&g), Regime::DragDominated);
    }

    #[test]
    fn regime_boundary_inclusive() {
        let g = DimensionlessGroups::from_values(0.1, 0.2, 2.0, 0.0).unwrap();
        assert_eq!(regime_classify(&g), Regime::DiffusionDominated);
        assert_eq!(regime_classify(&preset()), Regime::DiffusionDominated);
        assert_eq!(regime_classify_with(&g, 0.05), Regime::DragDominated);
    }

    #[test]
    fn wlc_lambda() {
        let law = SpringLaw::wormlike_chain(0.34, 70.0).unwrap();
        let g = compute_groups(&PhysicalParams::kinesin_invitro(), &law).unwrap();
        assert_relative_eq!(g.lambda.unwrap(), 4.91098 / 70.0, max_relative = 1e-5);
        assert_relative_eq!(g.epsilon, preset().epsilon, max_relative = 1e-12);
    }

    #[test]
    fn unit_slow_point() {
        let g = preset();
        let path = DimensionlessPath { time_base: TimeBase::Slow, times: vec![1.0], positions: vec![1.0], width: 1 };
        let out = rescale_trajectory(&path, &g).unwrap();
        assert_relative_eq!(out.positions[0], 4.91098, max_relative = 1e-5);
        assert_relative_eq!(out.times[0], 9.82196e-3, max_relative = 1e-5);
    }

    #[test]
    fn time_base_parsing() {
        assert_eq!("fast".parse::<TimeBase>().unwrap(), TimeBase::Fast);
        assert_eq!("t_bar".parse::<TimeBase>().unwrap(), TimeBase::Slow);
        assert!("".parse::<TimeBase>().is_err());
        assert!("seconds".parse::<TimeBase>().is_err());
    }

    #[test]
    fn bad_shape_rejected() {
        let path =
            DimensionlessPath { time_base: TimeBase::Fast, times: vec![0.0, 1.0], positions: vec![1.0], width: 1 };
        assert!(rescale_trajectory(&path, &preset()).is_err());
    }
}
