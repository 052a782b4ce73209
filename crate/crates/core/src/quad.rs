//! Quadrature rules: Gauss–Hermite for Gaussian averages, adaptive Simpson
//! for potentials, and uniform-grid trapezoid sums for densities.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

/// Default node count for Gaussian averages.
pub const DEFAULT_HERMITE_NODES: usize = 64;

/// Node-doubling discrepancy above which a Gaussian average is flagged.
pub const HERMITE_FLAG_TOL: f64 = 1e-9;

/// Gauss–Hermite rule for the weight `exp(-x^2)` on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Builds an `n`-point rule by Newton iteration on the orthonormal
    /// Hermite recurrence (stable for a few hundred nodes).
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Hermite rule needs at least one node");
        let pim4 = PI.powf(-0.25);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        let nf = n as f64;
        let mut z = 0.0;
        for i in 0..m {
            z = match i {
                0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * nf.powf(0.426) / z,
                2 => 1.86 * z - 0.86 * nodes[0],
                3 => 1.91 * z - 0.91 * nodes[1],
                _ => 2.0 * z - nodes[i - 2],
            };
            let mut pp = 0.0;
            for _ in 0..100 {
                let mut p1 = pim4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * nf).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            nodes[i] = z;
            nodes[n - 1 - i] = -z;
            weights[i] = 2.0 / (pp * pp);
            weights[n - 1 - i] = weights[i];
        }
        if n % 2 == 1 {
            nodes[m - 1] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[f(Y)]` for `Y ~ N(mean, variance)`. Zero variance returns `f(mean)`.
    pub fn expectation(&self, mean: f64, variance: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
        if variance <= 0.0 {
            return f(mean);
        }
        let scale = (2.0 * variance).sqrt();
        let sum: f64 = self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(mean + scale * x)).sum();
        sum / PI.sqrt()
    }
}

/// Result of an adaptive integration together with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Converges when the Richardson difference is below
/// `max(rel_tol * |whole|, abs_tol)` on each panel. `a > b` is allowed and
/// flips the sign.
pub fn adaptive_simpson(mut f: impl FnMut(f64) -> f64, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> Integral {
    if a == b {
        return Integral { value: 0.0, error: 0.0, converged: true };
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut state = SimpsonState { error: 0.0, converged: true, evals_left: MAX_SIMPSON_EVALS };
    let value = simpson_step(&mut f, a, b, fa, fm, fb, whole, rel_tol, abs_tol, 48, &mut state);
    Integral { value, error: state.error, converged: state.converged }
}

/// Evaluation budget of one adaptive Simpson call; noisy integrands stop
/// refining here instead of recursing to full depth.
pub const MAX_SIMPSON_EVALS: usize = 100_000;

struct SimpsonState {
    error: f64,
    converged: bool,
    evals_left: usize,
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &mut impl FnMut(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    abs_tol: f64,
    depth: u32,
    state: &mut SimpsonState,
) -> f64 {
    if state.evals_left < 2 {
        state.converged = false;
        return whole;
    }
    state.evals_left -= 2;
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if !delta.is_finite() {
        state.converged = false;
        state.error = f64::INFINITY;
        return f64::NAN;
    }
    let tol = (rel_tol * whole.abs()).max(abs_tol);
    if delta.abs() <= 15.0 * tol {
        state.error += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    if depth == 0 || (m - a).abs() <= f64::EPSILON * a.abs().max(1.0) {
        state.converged = false;
        state.error += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, rel_tol, abs_tol * 0.5, depth - 1, state)
        + simpson_step(f, m, b, fm, frm, fb, right, rel_tol, abs_tol * 0.5, depth - 1, state)
}

/// Trapezoid sum of samples on a uniform grid with spacing `h`.
///
/// For integrands that are smooth and negligible at both ends this rule is
/// spectrally accurate.
pub fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let interior: f64 = values[1..n - 1].iter().sum();
            h * (interior + 0.5 * (values[0] + values[n - 1]))
        }
    }
}

/// Trapezoid sum using every other sample (spacing `2h`); needs an odd count.
pub(crate) fn trapezoid_coarse(values: &[f64], h: f64) -> f64 {
    let coarse: Vec<f64> = values.iter().step_by(2).copied().collect();
    trapezoid(&coarse, 2.0 * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_integrates_polynomials_exactly() {
        let gh = GaussHermite::new(DEFAULT_HERMITE_NODES);
        let total: f64 = gh.weights().iter().sum();
        assert_relative_eq!(total, PI.sqrt(), max_relative = 1e-13);
        // E[Y^2] and E[Y^4] for Y ~ N(0.3, 0.7).
        let m2 = gh.expectation(0.3, 0.7, |y| y * y);
        assert_relative_eq!(m2, 0.7 + 0.09, max_relative = 1e-13);
        let m4 = gh.expectation(0.0, 0.7, |y| y.powi(4));
        assert_relative_eq!(m4, 3.0 * 0.49, max_relative = 1e-12);
    }

    #[test]
    fn hermite_nodes_symmetric_and_sorted() {
        for n in [1, 2, 5, 64, 128] {
            let gh = GaussHermite::new(n);
            let x = gh.nodes();
            for i in 0..n {
                assert!((x[i] + x[n - 1 - i]).abs() < 1e-12);
            }
            assert!(x.windows(2).all(|w| w[0] > w[1]));
        }
    }

    #[test]
    fn hermite_128_matches_64_on_smooth_integrand() {
        let a = GaussHermite::new(64).expectation(0.1, 0.03, |y| (3.0 * y - 0.8).tanh());
        let b = GaussHermite::new(128).expectation(0.1, 0.03, |y| (3.0 * y - 0.8).tanh());
        assert!((a - b).abs() < 1e-13);
    }

    #[test]
    fn zero_variance_is_point_evaluation() {
        let gh = GaussHermite::new(8);
        assert_eq!(gh.expectation(0.25, 0.0, |y| y * 3.0), 0.75);
    }

    #[test]
    fn adaptive_simpson_known_integrals() {
        let r = adaptive_simpson(|x| x.sin(), 0.0, PI, 1e-12, 1e-15);
        assert!(r.converged);
        assert_relative_eq!(r.value, 2.0, max_relative = 1e-11);
        let r = adaptive_simpson(|x| (-x * x).exp(), -8.0, 8.0, 1e-12, 1e-15);
        assert_relative_eq!(r.value, PI.sqrt(), max_relative = 1e-11);
        let back = adaptive_simpson(|x| x * x, 2.0, 0.0, 1e-12, 0.0);
        assert_relative_eq!(back.value, -8.0 / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn trapezoid_gaussian_is_spectral() {
        let h = 0.05;
        let v: Vec<f64> = (0..=400).map(|i| -10.0 + i as f64 * h).map(|x| (-x * x).exp()).collect();
        assert_relative_eq!(trapezoid(&v, h), PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(trapezoid_coarse(&v, h), PI.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn adaptive_simpson_gives_up_on_bad_integrands() {
        let r = adaptive_simpson(|x| if x > 0.7 { f64::NAN } else { x }, 0.0, 1.0, 1e-10, 1e-14);
        assert!(r.value.is_nan() && !r.converged);
        // Deterministic rounding-level noise cannot meet an absolute tolerance of 1e-30.
        let mut calls = 0usize;
        let r = adaptive_simpson(
            |x| {
                calls += 1;
                1.0 + 1e-12 * (1e6 * x).sin().signum()
            },
            0.0,
            1.0,
            0.0,
            1e-30,
        );
        assert!(!r.converged && calls <= MAX_SIMPSON_EVALS + 3);
        assert_relative_eq!(r.value, 1.0, max_relative = 1e-9);
    }
}
