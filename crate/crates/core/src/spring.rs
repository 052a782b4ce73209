//! Motor-tail force laws, dimensional (`SpringLaw`) and in the rescaled
//! separation coordinate (`Tether`).

use crate::error::{invalid, Error, Result};
use crate::spline::CubicTable;

/// Dimensionless tail potential `Phi(xi)`, with `Phi(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SpringPotential {
    /// `Phi(xi) = xi^2 / 2`; reproduces the Hookean tail.
    Quadratic,
    /// Wormlike chain in units of its contour length:
    /// `Phi'(xi) = xi + c sgn(xi) ((1 - |xi|)^-2 - 1)` for `|xi| < 1`.
    WormlikeChain { coeff: f64 },
    /// `Phi'` tabulated on a uniform grid; `Phi` is its spline antiderivative.
    Tabulated(CubicTable),
}

impl SpringPotential {
    /// Wormlike chain with linear stiffness `kappa` (pN/nm) and contour
    /// length `contour` (nm); the stiffening term carries a 1/4 pN scale.
    pub fn wormlike_chain(kappa: f64, contour: f64) -> Result<Self> {
        if !(kappa > 0.0 && contour > 0.0) {
            return Err(invalid("wlc", "stiffness and contour length must be positive"));
        }
        Ok(Self::WormlikeChain { coeff: 1.0 / (4.0 * kappa * contour) })
    }

    pub fn tabulated(xi0: f64, h: f64, dphi: alloc::vec::Vec<f64>) -> Result<Self> {
        let table = CubicTable::new(xi0, h, dphi)?;
        if !table.contains(0.0) {
            return Err(invalid("spring table", "grid must contain xi = 0"));
        }
        Ok(Self::Tabulated(table))
    }

    /// Open (or closed, for tables) domain of `xi`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Quadratic => (f64::NEG_INFINITY, f64::INFINITY),
            Self::WormlikeChain { .. } => (-1.0, 1.0),
            Self::Tabulated(t) => (t.lo(), t.hi()),
        }
    }

    pub fn in_domain(&self, xi: f64) -> bool {
        match self {
            Self::Quadratic => xi.is_finite(),
            Self::WormlikeChain { .. } => xi.abs() < 1.0,
            Self::Tabulated(t) => t.contains(xi),
        }
    }

    fn check(&self, xi: f64) -> Result<()> {
        if self.in_domain(xi) {
            Ok(())
        } else {
            Err(Error::Domain { what: "spring potential", value: xi })
        }
    }

    /// `Phi'(xi)`.
    pub fn force(&self, xi: f64) -> Result<f64> {
        self.check(xi)?;
        Ok(self.force_unchecked(xi))
    }

    #[inline]
    pub(crate) fn force_unchecked(&self, xi: f64) -> f64 {
        match self {
            Self::Quadratic => xi,
            Self::WormlikeChain { coeff } => {
                let u = 1.0 - xi.abs();
                xi + coeff * xi.signum() * (1.0 / (u * u) - 1.0)
            }
            Self::Tabulated(t) => t.value(xi),
        }
    }

    /// `Phi(xi)`, zero at the origin.
    pub fn energy(&self, xi: f64) -> Result<f64> {
        self.check(xi)?;
        Ok(self.energy_unchecked(xi))
    }

    #[inline]
    pub(crate) fn energy_unchecked(&self, xi: f64) -> f64 {
        match self {
            Self::Quadratic => 0.5 * xi * xi,
            Self::WormlikeChain { coeff } => 0.5 * xi * xi + coeff * xi * xi / (1.0 - xi.abs()),
            Self::Tabulated(t) => t.antiderivative(xi) - t.antiderivative(0.0),
        }
    }
}

/// Dimensional tail force law.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum SpringLaw {
    /// `F(r) = kappa r`.
    Linear { kappa: f64 },
    /// `F(r) = force_scale * Phi'(r / length_scale)`.
    General { potential: SpringPotential, length_scale: f64, force_scale: f64 },
}

impl SpringLaw {
    pub fn linear(kappa: f64) -> Self {
        Self::Linear { kappa }
    }

    /// Wormlike chain with `L_c` equal to the contour length and `F = kappa L_c`.
    pub fn wormlike_chain(kappa: f64, contour: f64) -> Result<Self> {
        Ok(Self::General {
            potential: SpringPotential::wormlike_chain(kappa, contour)?,
            length_scale: contour,
            force_scale: kappa * contour,
        })
    }

    /// Stiffness of the linear regime (`F / L_c` for general laws).
    pub fn stiffness(&self) -> f64 {
        match self {
            Self::Linear { kappa } => *kappa,
            Self::General { length_scale, force_scale, .. } => force_scale / length_scale,
        }
    }

    /// Length scale `L_c` where the law departs from Hooke, if any.
    pub fn length_scale(&self) -> Option<f64> {
        match self {
            Self::Linear { .. } => None,
            Self::General { length_scale, .. } => Some(*length_scale),
        }
    }

    /// Force (pN) opposing a motor that is `r` nm ahead of the cargo.
    pub fn force(&self, r: f64) -> Result<f64> {
        match self {
            Self::Linear { kappa } => Ok(kappa * r),
            Self::General { potential, length_scale, force_scale } => {
                potential.force(r / length_scale).map(|f| force_scale * f)
            }
        }
    }
}

/// Force (pN) exerted by `law` at signed separation `r` (nm).
pub fn spring_force(law: &SpringLaw, r: f64) -> Result<f64> {
    law.force(r)
}

/// Tail force in the rescaled separation `y`: `y` for Hookean tails,
/// `Phi'(lambda y) / lambda` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Tether {
    Linear,
    General { potential: SpringPotential, lambda: f64 },
}

impl Tether {
    #[inline]
    pub fn force(&self, y: f64) -> f64 {
        match self {
            Self::Linear => y,
            Self::General { potential, lambda } => potential.force_unchecked(lambda * y) / lambda,
        }
    }

    /// Tail energy `Phi(lambda y) / lambda^2`.
    pub fn energy(&self, y: f64) -> Result<f64> {
        match self {
            Self::Linear => Ok(0.5 * y * y),
            Self::General { potential, lambda } => Ok(potential.energy(lambda * y)? / (lambda * lambda)),
        }
    }

    #[inline]
    pub fn in_domain(&self, y: f64) -> bool {
        match self {
            Self::Linear => y.is_finite(),
            Self::General { potential, lambda } => potential.in_domain(lambda * y),
        }
    }

    /// Domain of `y`.
    pub fn domain(&self) -> (f64, f64) {
        match self {
            Self::Linear => (f64::NEG_INFINITY, f64::INFINITY),
            Self::General { potential, lambda } => {
                let (lo, hi) = potential.domain();
                (lo / lambda, hi / lambda)
            }
        }
    }
}
