//! Averaged-theory predictions for whichever tail law a spec names.

use anyhow::{Context, Result};
use motorcargo_core::averaging::{one_motor_bracket, two_motor_bracket};
use motorcargo_core::general_spring::{one_motor_velocity_general, GeneralPair};
use motorcargo_core::{
    gaussian_average, one_motor_velocity_low_visc, stall_force, two_motor_diffusivity, two_motor_velocity,
    DimensionlessGroups, EffectiveTransport, FixedCargo, FluctuatingCargo, ForceVelocityCurve, GeneralSpringSet,
    PairDrift, SpringLaw, SpringPotential, StallResult,
};
use serde::Serialize;

/// Springs of `n` identical tails following `law`.
pub fn spring_set(law: &SpringLaw, g: &DimensionlessGroups, n: usize) -> Result<GeneralSpringSet> {
    let (potential, lambda) = match law {
        // Any lambda gives the Hookean tail for the quadratic potential.
        SpringLaw::Linear { .. } => (SpringPotential::Quadratic, 1.0),
        SpringLaw::General { potential, .. } => (potential.clone(), g.lambda.context("general law without lambda")?),
    };
    Ok(GeneralSpringSet::homogeneous(potential, n, lambda)?)
}

/// One-motor averaged transport at `g.theta_tilde`.
pub fn one_motor(curve: &ForceVelocityCurve, law: &SpringLaw, g: &DimensionlessGroups) -> Result<EffectiveTransport> {
    Ok(match law {
        SpringLaw::Linear { .. } => one_motor_velocity_low_visc(curve, g)?,
        SpringLaw::General { .. } => one_motor_velocity_general(curve, g, &spring_set(law, g, 1)?)?,
    })
}

/// Pair drift with the cargo averaged out, tabulated at `g.theta_tilde` for general tails.
pub fn pair<'a>(
    curve: &'a ForceVelocityCurve,
    law: &SpringLaw,
    g: &DimensionlessGroups,
) -> Result<Box<dyn PairDrift + Send + Sync + 'a>> {
    Ok(match law {
        SpringLaw::Linear { .. } => Box::new(FluctuatingCargo::new(curve, g.stallibility)),
        SpringLaw::General { .. } => {
            Box::new(GeneralPair::new(curve, g.stallibility, spring_set(law, g, 2)?, g.theta_tilde)?)
        }
    })
}

/// Two-motor averaged transport, with diffusivity when `diffusivity` is set.
pub fn two_motor(
    curve: &ForceVelocityCurve,
    law: &SpringLaw,
    g: &DimensionlessGroups,
    diffusivity: bool,
) -> Result<EffectiveTransport> {
    let drift = pair(curve, law, g)?;
    Ok(if diffusivity {
        two_motor_diffusivity(drift.as_ref(), g, g.theta_tilde)?
    } else {
        two_motor_velocity(drift.as_ref(), g, g.theta_tilde)?
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StallPoint {
    pub theta_tilde: f64,
    pub theta_pn: f64,
    pub flagged: bool,
    pub first_non_monotone_tilde: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StallSummary {
    pub one_motor: StallPoint,
    /// Cargo fluctuations averaged into the pair drift.
    pub two_motor: StallPoint,
    /// Cargo pinned at its mean; Hookean tails only.
    pub two_motor_fixed_cargo: Option<StallPoint>,
    pub ratio: f64,
}

fn point(r: StallResult, g: &DimensionlessGroups, stall_force_pn: f64) -> StallPoint {
    StallPoint {
        theta_tilde: r.theta,
        theta_pn: g.trap_force_physical(r.theta, stall_force_pn),
        flagged: r.flagged,
        first_non_monotone_tilde: r.first_non_monotone,
    }
}

/// Softer tails can stall past the default bracket; its upper end is
/// doubled up to this many times before bisecting.
pub const BRACKET_DOUBLINGS: u32 = 3;

fn stall(
    mut velocity: impl FnMut(f64) -> motorcargo_core::Result<f64>,
    (lo, mut hi): (f64, f64),
) -> motorcargo_core::Result<StallResult> {
    for _ in 0..BRACKET_DOUBLINGS {
        if velocity(hi)? <= 0.0 {
            break;
        }
        hi *= 2.0;
    }
    stall_force(velocity, (lo, hi))
}

/// Stall forces by bisection; `g` supplies the groups at any trap force.
pub fn stall_forces(
    curve: &ForceVelocityCurve,
    law: &SpringLaw,
    g: &DimensionlessGroups,
    stall_force_pn: f64,
) -> Result<StallSummary> {
    let s = g.stallibility;
    let one = match law {
        SpringLaw::Linear { .. } => {
            stall(|th| Ok(gaussian_average(curve, s * th, s * s / 2.0)?.value), one_motor_bracket(s))?
        }
        SpringLaw::General { .. } => {
            let springs = spring_set(law, g, 1)?;
            stall(
                |th| Ok(one_motor_velocity_general(curve, &g.with_theta_tilde(th), &springs)?.velocity),
                one_motor_bracket(s),
            )?
        }
    };
    let (two, fixed) = match law {
        SpringLaw::Linear { .. } => {
            let fl = FluctuatingCargo::new(curve, s);
            let fx = FixedCargo { curve, s };
            let two = stall(|th| Ok(two_motor_velocity(&fl, g, th)?.velocity), two_motor_bracket(s))?;
            let fixed = stall(|th| Ok(two_motor_velocity(&fx, g, th)?.velocity), two_motor_bracket(s))?;
            (two, Some(fixed))
        }
        SpringLaw::General { .. } => {
            let two = stall(
                |th| {
                    let gt = g.with_theta_tilde(th);
                    Ok(two_motor(curve, law, &gt, false)
                        .map_err(|e| motorcargo_core::Error::Config(e.to_string()))?
                        .velocity)
                },
                two_motor_bracket(s),
            )?;
            (two, None)
        }
    };
    Ok(StallSummary {
        ratio: two.theta / one.theta,
        one_motor: point(one, g, stall_force_pn),
        two_motor: point(two, g, stall_force_pn),
        two_motor_fixed_cargo: fixed.map(|f| point(f, g, stall_force_pn)),
    })
}
