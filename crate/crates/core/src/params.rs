use core::f64::consts::PI;

use crate::curve::ForceVelocityCurve;
use crate::error::{invalid, Result};

/// Dimensional constants of a motor-cargo system (nm, pN, s).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PhysicalParams {
    /// Motor step size (nm).
    pub step_size: f64,
    /// Single-motor stall force `F*` (pN).
    pub stall_force: f64,
    /// Unloaded motor velocity `v` (nm/s).
    pub free_velocity: f64,
    /// Tail spring constant `kappa` (pN/nm).
    pub spring_kappa: f64,
    /// Motor diffusion `sigma^2` (nm^2/s); the unloaded diffusivity is half of it.
    pub motor_diffusion_sigma2: f64,
    /// Effective cargo radius `a` (nm).
    pub cargo_radius: f64,
    /// Dynamic viscosity `eta` (pN s / nm^2).
    pub viscosity: f64,
    /// Trap force `theta` opposing the motion (pN).
    pub trap_force: f64,
    /// Thermal energy `k_B T` (pN nm).
    pub kbt: f64,
    /// Velocity under strong assisting load (nm/s).
    pub v_max: f64,
    /// Velocity under strong superstall load (nm/s); nonpositive.
    pub v_min: f64,
    pub motor_count: u32,
}

impl PhysicalParams {
    /// Cargo friction of kinesin bead assays in water.
    pub const WATER_FRICTION: f64 = 1e-5;

    /// Kinesin-1 in vitro: 8 nm steps, 7 pN stall, 500 nm/s, 0.34 pN/nm,
    /// 5000 nm^2/s, 500 nm bead, friction 1e-5 pN s/nm, k_B T = 4.1 pN nm,
    /// and the 600 / -50 nm/s sigmoid asymptotes.
    ///
    /// The viscosity is the value that makes `6 pi a eta` equal the tabulated
    /// friction `1e-5` (about 1.06e-9 pN s/nm^2; the rounded water value
    /// 1e-9 would give 9.42e-6).
    pub fn kinesin_invitro() -> Self {
        let cargo_radius = 500.0;
        Self {
            step_size: 8.0,
            stall_force: 7.0,
            free_velocity: 500.0,
            spring_kappa: 0.34,
            motor_diffusion_sigma2: 5000.0,
            cargo_radius,
            viscosity: Self::WATER_FRICTION / (6.0 * PI * cargo_radius),
            trap_force: 0.0,
            kbt: 4.1,
            v_max: 600.0,
            v_min: -50.0,
            motor_count: 1,
        }
    }

    /// Stokes drag `6 pi a eta`.
    pub fn friction(&self) -> f64 {
        6.0 * PI * self.cargo_radius * self.viscosity
    }

    /// Same parameters with the viscosity rescaled so that `friction() == gamma`.
    pub fn with_friction(mut self, gamma: f64) -> Self {
        self.viscosity = gamma / (6.0 * PI * self.cargo_radius);
        self
    }

    pub fn with_trap_force(mut self, theta: f64) -> Self {
        self.trap_force = theta;
        self
    }

    pub fn with_motor_count(mut self, n: u32) -> Self {
        self.motor_count = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("stall_force", self.stall_force),
            ("free_velocity", self.free_velocity),
            ("spring_kappa", self.spring_kappa),
            ("motor_diffusion_sigma2", self.motor_diffusion_sigma2),
            ("cargo_radius", self.cargo_radius),
            ("viscosity", self.viscosity),
            ("kbt", self.kbt),
        ];
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(invalid(name, "must be strictly positive and finite"));
            }
        }
        if !self.trap_force.is_finite() {
            return Err(invalid("trap_force", "must be finite"));
        }
        if !(self.v_min <= 0.0 && self.free_velocity < self.v_max) {
            return Err(invalid("v_min/v_max", "need v_min <= 0 < v < v_max"));
        }
        if self.v_min.abs() >= self.v_max {
            return Err(invalid("v_min/v_max", "need |v_min| < v_max"));
        }
        if self.free_velocity <= 0.5 * (self.v_max + self.v_min) {
            return Err(invalid("free_velocity", "need v > (v_max + v_min) / 2"));
        }
        if self.motor_count == 0 {
            return Err(invalid("motor_count", "need at least one motor"));
        }
        Ok(())
    }

    /// Sigmoid force-velocity curve built from `v_max`, `v_min` and `v`.
    pub fn sigmoid_curve(&self) -> Result<ForceVelocityCurve> {
        ForceVelocityCurve::sigmoid(self.v_max, self.v_min, self.free_velocity)
    }
}
