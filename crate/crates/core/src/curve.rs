//! Nondimensional force-velocity curves `g(f)` and the structural checks
//! (monotonicity, concavity near zero and stall, strong concavity) that the
//! averaging theory relies on.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::spline::CubicTable;

/// Tolerance on the normalization `g(0) = 1`, `g(1) = 0`.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// Step for centered second differences of tabulated curves.
pub const TABULATED_CURVATURE_STEP: f64 = 1e-4;

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Sigmoid `g(f) = A - B tanh(C f - D)`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sigmoid {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Sigmoid {
    /// Constants fixed by `g(0) = 1`, `g(1) = 0` and the asymptotes
    /// `v_max / v` (assisting load) and `v_min / v` (superstall load).
    pub fn from_velocities(v_max: f64, v_min: f64, v: f64) -> Result<Self> {
        if !(v_min <= 0.0 && 0.0 < v && v < v_max) {
            return Err(invalid("velocities", "need v_min <= 0 < v < v_max"));
        }
        if v_min.abs() >= v_max {
            return Err(invalid("velocities", "need |v_min| < v_max"));
        }
        if v <= 0.5 * (v_max + v_min) {
            return Err(invalid("velocities", "need v > (v_max + v_min) / 2"));
        }
        let span = v_max - v_min;
        let d = checked_atanh((2.0 * v - v_max - v_min) / span)?;
        let c = checked_atanh((v_max + v_min) / span)? - checked_atanh((v_max + v_min - 2.0 * v) / span)?;
        Ok(Self { a: (v_max + v_min) / (2.0 * v), b: span / (2.0 * v), c, d })
    }

    #[inline]
    pub fn value(&self, f: f64) -> f64 {
        self.a - self.b * (self.c * f - self.d).tanh()
    }

    pub fn derivative(&self, f: f64) -> f64 {
        let ch = (self.c * f - self.d).cosh();
        -self.b * self.c / (ch * ch)
    }

    pub fn second_derivative(&self, f: f64) -> f64 {
        let u = self.c * f - self.d;
        let ch = u.cosh();
        2.0 * self.b * self.c * self.c * u.tanh() / (ch * ch)
    }
}

fn checked_atanh(x: f64) -> Result<f64> {
    if x.abs() >= 1.0 || x.is_nan() {
        return Err(Error::Domain { what: "arctanh", value: x });
    }
    Ok(x.atanh())
}

/// User-supplied curve: closed form with analytic derivatives, or a table
/// interpolated by a natural cubic spline and held constant outside.
#[derive(Clone)]
pub enum CustomCurve {
    Analytic { g: ScalarFn, dg: ScalarFn, d2g: ScalarFn, asymptotes: (f64, f64) },
    Tabulated(CubicTable),
}

impl fmt::Debug for CustomCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Analytic { asymptotes, .. } => {
                f.debug_struct("Analytic").field("asymptotes", asymptotes).finish_non_exhaustive()
            }
            Self::Tabulated(t) => f.debug_tuple("Tabulated").field(t).finish(),
        }
    }
}

/// Dimensionless force-velocity relation `g`, with `g(0) = 1`, `g(1) = 0`.
#[derive(Debug, Clone)]
pub enum ForceVelocityCurve {
    Sigmoid(Sigmoid),
    /// `g(f) = 1 - f`; unbounded, used as an exactness reference.
    Linear,
    Custom(CustomCurve),
}

impl ForceVelocityCurve {
    pub fn sigmoid(v_max: f64, v_min: f64, v: f64) -> Result<Self> {
        Ok(Self::Sigmoid(Sigmoid::from_velocities(v_max, v_min, v)?))
    }

    pub fn analytic(
        g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        dg: impl Fn(f64) -> f64 + Send + Sync + 'static,
        d2g: impl Fn(f64) -> f64 + Send + Sync + 'static,
        asymptotes: (f64, f64),
    ) -> Result<Self> {
        let curve =
            Self::Custom(CustomCurve::Analytic { g: Arc::new(g), dg: Arc::new(dg), d2g: Arc::new(d2g), asymptotes });
        curve.check_normalization()?;
        Ok(curve)
    }

    /// Tabulated curve on the uniform grid `f0 + k h`; must cover `[0, 1]`.
    pub fn tabulated(f0: f64, h: f64, values: Vec<f64>) -> Result<Self> {
        let table = CubicTable::new(f0, h, values)?;
        if !(table.contains(0.0) && table.contains(1.0)) {
            return Err(invalid("table", "force grid must cover [0, 1]"));
        }
        let curve = Self::Custom(CustomCurve::Tabulated(table));
        curve.check_normalization()?;
        Ok(curve)
    }

    fn check_normalization(&self) -> Result<()> {
        let (g0, g1) = (self.value(0.0), self.value(1.0));
        if (g0 - 1.0).abs() > NORMALIZATION_TOL || g1.abs() > NORMALIZATION_TOL {
            return Err(invalid("curve", alloc::format!("need g(0)=1 and g(1)=0, got {g0} and {g1}")));
        }
        Ok(())
    }

    #[inline]
    pub fn value(&self, f: f64) -> f64 {
        match self {
            Self::Sigmoid(s) => s.value(f),
            Self::Linear => 1.0 - f,
            Self::Custom(CustomCurve::Analytic { g, .. }) => g(f),
            Self::Custom(CustomCurve::Tabulated(t)) => {
                if f <= t.lo() {
                    t.first()
                } else if f >= t.hi() {
                    t.last()
                } else {
                    t.value(f)
                }
            }
        }
    }

    pub fn derivative(&self, f: f64) -> f64 {
        match self {
            Self::Sigmoid(s) => s.derivative(f),
            Self::Linear => -1.0,
            Self::Custom(CustomCurve::Analytic { dg, .. }) => dg(f),
            Self::Custom(CustomCurve::Tabulated(t)) => {
                if t.contains(f) {
                    t.derivative(f)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn second_derivative(&self, f: f64) -> f64 {
        match self {
            Self::Sigmoid(s) => s.second_derivative(f),
            Self::Linear => 0.0,
            Self::Custom(CustomCurve::Analytic { d2g, .. }) => d2g(f),
            Self::Custom(CustomCurve::Tabulated(_)) => {
                let h = TABULATED_CURVATURE_STEP;
                (self.value(f + h) - 2.0 * self.value(f) + self.value(f - h)) / (h * h)
            }
        }
    }

    /// `(g(-inf), g(+inf))`; infinite for the linear reference curve.
    pub fn asymptotes(&self) -> (f64, f64) {
        match self {
            Self::Sigmoid(s) => (s.a + s.b, s.a - s.b),
            Self::Linear => (f64::INFINITY, f64::NEG_INFINITY),
            Self::Custom(CustomCurve::Analytic { asymptotes, .. }) => *asymptotes,
            Self::Custom(CustomCurve::Tabulated(t)) => (t.first(), t.last()),
        }
    }
}

/// Uniform force grid for sampled structural checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceGrid {
    lo: f64,
    hi: f64,
    n: usize,
}

impl ForceGrid {
    pub const MIN_LO: f64 = -3.0;
    pub const MIN_HI: f64 = 4.0;
    pub const MAX_SPACING: f64 = 1e-3;

    /// Grid on `[lo, hi]` with spacing at most `spacing`. Must cover
    /// `[-3, 4]` with spacing no larger than `1e-3`.
    pub fn new(lo: f64, hi: f64, spacing: f64) -> Result<Self> {
        if !(lo <= Self::MIN_LO && hi >= Self::MIN_HI) {
            return Err(invalid("force grid", "must cover [-3, 4]"));
        }
        if !(spacing > 0.0 && spacing <= Self::MAX_SPACING) {
            return Err(invalid("force grid", "spacing must be in (0, 1e-3]"));
        }
        let n = ((hi - lo) / spacing).ceil() as usize + 1;
        Ok(Self { lo, hi, n })
    }

    pub fn spacing(&self) -> f64 {
        (self.hi - self.lo) / (self.n - 1) as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.n).map(move |k| self.lo + k as f64 * h)
    }
}

impl Default for ForceGrid {
    fn default() -> Self {
        Self::new(Self::MIN_LO, Self::MIN_HI, Self::MAX_SPACING).expect("default grid is valid")
    }
}

/// Outcome of one clause of the structural check.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClauseResult {
    pub passed: bool,
    /// First grid point where the clause fails.
    pub first_violation: Option<f64>,
}

impl ClauseResult {
    fn pass() -> Self {
        Self { passed: true, first_violation: None }
    }

    fn fail(at: f64) -> Self {
        Self { passed: false, first_violation: Some(at) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct AssumptionReport {
    pub monotone: ClauseResult,
    pub concavity: ClauseResult,
    /// Largest admissible inflection margin found, when the concavity clause holds.
    pub f_star: Option<f64>,
    pub strong_concavity: ClauseResult,
}

impl AssumptionReport {
    pub fn all_passed(&self) -> bool {
        self.monotone.passed && self.concavity.passed && self.strong_concavity.passed
    }
}

/// Sampled check of the structural assumptions on `g`.
///
/// Non-monotone curves are reported, not rejected.
pub fn check_assumption_1(curve: &ForceVelocityCurve, grid: &ForceGrid) -> AssumptionReport {
    let pts: Vec<f64> = grid.points().collect();
    let h = grid.spacing();

    let mut monotone = ClauseResult::pass();
    let mut prev = curve.value(pts[0]);
    for &f in &pts[1..] {
        let cur = curve.value(f);
        if !(cur < prev) {
            monotone = ClauseResult::fail(f);
            break;
        }
        prev = cur;
    }

    // Concave run from the left edge and convex run from the right edge.
    let curv: Vec<f64> = pts.iter().map(|&f| curve.second_derivative(f)).collect();
    let neg_run_end = pts.iter().zip(&curv).take_while(|(_, c)| **c < 0.0).map(|(f, _)| *f).last();
    let pos_run_start = pts.iter().zip(&curv).rev().take_while(|(_, c)| **c > 0.0).map(|(f, _)| *f).last();
    let (concavity, f_star) = match (neg_run_end, pos_run_start) {
        (Some(a), Some(b)) => {
            let f_star = a.min(1.0 - b).min(0.5 - h);
            if f_star > 0.0 {
                (ClauseResult::pass(), Some(f_star))
            } else {
                let at = if a <= 0.0 { a + h } else { b - h };
                (ClauseResult::fail(at), None)
            }
        }
        (None, _) => (ClauseResult::fail(pts[0]), None),
        (Some(_), None) => (ClauseResult::fail(pts[pts.len() - 1]), None),
    };

    // eta(f) = g(f) + g(-f) decreasing and eta~(f) = g(1+f) + g(1-f) increasing, f > 0.
    let mut strong = ClauseResult::pass();
    let eta_max = grid.hi.min(-grid.lo);
    let eta_tilde_max = (grid.hi - 1.0).min(1.0 - grid.lo);
    let mut k = 1usize;
    let mut prev_eta = curve.value(0.0) * 2.0;
    let mut prev_eta_t = curve.value(1.0) * 2.0;
    loop {
        let f = k as f64 * h;
        if f > eta_max && f > eta_tilde_max {
            break;
        }
        if f <= eta_max {
            let eta = curve.value(f) + curve.value(-f);
            if !(eta < prev_eta) {
                strong = ClauseResult::fail(f);
                break;
            }
            prev_eta = eta;
        }
        if f <= eta_tilde_max {
            let eta_t = curve.value(1.0 + f) + curve.value(1.0 - f);
            if !(eta_t > prev_eta_t) {
                strong = ClauseResult::fail(1.0 + f);
                break;
            }
            prev_eta_t = eta_t;
        }
        k += 1;
    }

    AssumptionReport { monotone, concavity, f_star, strong_concavity: strong }
}
