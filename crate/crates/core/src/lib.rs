//! Motor-cargo transport along a microtubule: dimensional parameters,
//! force-velocity curves and tail springs, the rescaled SDE system with an
//! Euler–Maruyama ensemble integrator, and the quadrature side of the
//! stochastic-averaging reductions for one and two motors.
//!
//! The crate is `no_std` with `alloc`; file formats, configuration, the
//! parallel runner and the experiments live in the `motorcargo` crate.

#![no_std]
// `!(x > 0.0)` style guards are meant to reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod averaging;
pub mod curve;
pub mod density;
pub mod error;
pub mod general_spring;
pub mod nondim;
pub mod params;
pub mod quad;
pub mod sde;
pub mod spline;
pub mod spring;
pub mod stats;

pub use averaging::{
    gaussian_average, gaussian_average_with, one_motor_velocity_exact, one_motor_velocity_linear_approx,
    one_motor_velocity_low_visc, pi_r_density, pi_y_density, stall_force, two_motor_diffusivity, two_motor_velocity,
    EffectiveTransport, FixedCargo, FluctuatingCargo, GaussianAverage, PairDrift, StallResult,
};
pub use curve::{check_assumption_1, AssumptionReport, ForceGrid, ForceVelocityCurve, Sigmoid};
pub use density::StationaryDensity1D;
pub use error::{Error, Result};
pub use general_spring::{averaged_drift_general, cargo_density_general, GeneralSpringSet};
pub use nondim::{compute_groups, regime_classify, rescale_trajectory, DimensionlessGroups, Regime, TimeBase};
pub use params::PhysicalParams;
pub use sde::{estimate_transport, integrate_system, MotorCargoModel, SimConfig, TrajectoryEnsemble, TransportSummary};
pub use spring::{spring_force, SpringLaw, SpringPotential, Tether};
