//! One-dimensional stationary densities stored as log-values on a uniform
//! grid, truncated where they have fallen `LOG_DROP` below the peak.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::quad::{adaptive_simpson, trapezoid, trapezoid_coarse};

/// Required drop of the log-density at both truncation bounds.
pub const LOG_DROP: f64 = 40.0;

/// Window and accuracy controls for building densities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityOptions {
    /// Fine-grid node count (rounded up to odd).
    pub nodes: usize,
    /// Node count of the window-finding pass.
    pub coarse_nodes: usize,
    /// Initial half-width of the window around the center.
    pub half_width: f64,
    /// Relative tolerance of the adaptive Simpson segments.
    pub rel_tol: f64,
    pub log_drop: f64,
    /// Widening attempts before giving up.
    pub max_widenings: u32,
}

impl Default for DensityOptions {
    fn default() -> Self {
        Self { nodes: 2001, coarse_nodes: 401, half_width: 8.0, rel_tol: 1e-10, log_drop: LOG_DROP, max_widenings: 40 }
    }
}

/// Normalized density `exp(log_density - log_normalizer)` on the nodes
/// `center + k h`, `k = -left..=right`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StationaryDensity1D {
    center: f64,
    h: f64,
    left: usize,
    log_density: Vec<f64>,
    log_normalizer: f64,
    /// Relative change of the normalizer between spacing `h` and `2h`,
    /// plus the accumulated Simpson error of the potential.
    quad_error: f64,
}

impl StationaryDensity1D {
    /// Builds the density whose log has derivative `dlog`, by adaptive
    /// Simpson on each grid segment outward from `center`. The window is
    /// widened until the log-density has dropped by `log_drop` at both ends,
    /// then trimmed and resampled on the fine grid. `domain` is the open
    /// interval outside which the density vanishes.
    pub fn from_log_derivative(
        mut dlog: impl FnMut(f64) -> f64,
        center: f64,
        domain: (f64, f64),
        opts: &DensityOptions,
    ) -> Result<Self> {
        let rel_tol = opts.rel_tol;
        build(
            |nodes: &[f64], ic: usize| {
                let mut out = vec![0.0; nodes.len()];
                let mut err = 0.0;
                for k in ic + 1..nodes.len() {
                    let r = adaptive_simpson(&mut dlog, nodes[k - 1], nodes[k], rel_tol, 1e-14);
                    out[k] = out[k - 1] + r.value;
                    err += r.error;
                }
                for k in (0..ic).rev() {
                    let r = adaptive_simpson(&mut dlog, nodes[k + 1], nodes[k], rel_tol, 1e-14);
                    out[k] = out[k + 1] + r.value;
                    err += r.error;
                }
                (out, err)
            },
            center,
            domain,
            opts,
        )
    }

    /// Builds the density with the closed-form unnormalized log `log_fn`.
    pub fn from_log_fn(
        mut log_fn: impl FnMut(f64) -> f64,
        center: f64,
        domain: (f64, f64),
        opts: &DensityOptions,
    ) -> Result<Self> {
        build(|nodes: &[f64], _| (nodes.iter().map(|&x| log_fn(x)).collect(), 0.0), center, domain, opts)
    }

    pub fn len(&self) -> usize {
        self.log_density.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_density.is_empty()
    }

    pub fn spacing(&self) -> f64 {
        self.h
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        self.center + (k as f64 - self.left as f64) * self.h
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.node(k)).collect()
    }

    /// Unnormalized log-density on the grid.
    pub fn log_density(&self) -> &[f64] {
        &self.log_density
    }

    pub fn log_normalizer(&self) -> f64 {
        self.log_normalizer
    }

    pub fn truncation_bounds(&self) -> (f64, f64) {
        (self.node(0), self.node(self.len() - 1))
    }

    pub fn quad_error(&self) -> f64 {
        self.quad_error
    }

    /// Normalized density values on the grid.
    pub fn pdf(&self) -> Vec<f64> {
        self.log_density.iter().map(|l| (l - self.log_normalizer).exp()).collect()
    }

    /// Normalized density at `x`, linear in the log between nodes; zero
    /// outside the window.
    pub fn pdf_at(&self, x: f64) -> f64 {
        let t = (x - self.node(0)) / self.h;
        if !(t >= 0.0 && t <= (self.len() - 1) as f64) {
            return 0.0;
        }
        let i = (t as usize).min(self.len() - 2);
        let u = t - i as f64;
        let l = (1.0 - u) * self.log_density[i] + u * self.log_density[i + 1];
        (l - self.log_normalizer).exp()
    }

    /// `E[f(X)]` by the trapezoid rule on the grid.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        let vals: Vec<f64> = self.pdf().iter().enumerate().map(|(k, p)| p * f(self.node(k))).collect();
        trapezoid(&vals, self.h)
    }

    /// `E[f(X)]` with the spacing-`2h` discrepancy as an error estimate.
    pub fn integrate_with_error(&self, mut f: impl FnMut(f64) -> f64) -> (f64, f64) {
        let vals: Vec<f64> = self.pdf().iter().enumerate().map(|(k, p)| p * f(self.node(k))).collect();
        let fine = trapezoid(&vals, self.h);
        (fine, (fine - trapezoid_coarse(&vals, self.h)).abs())
    }

    pub fn mean(&self) -> f64 {
        self.integrate(|x| x)
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.integrate(|x| (x - m) * (x - m))
    }

    /// Cumulative distribution on the nodes (cumulative trapezoid, ending at 1).
    pub fn cdf_nodes(&self) -> Vec<f64> {
        let p = self.pdf();
        let mut c = vec![0.0; p.len()];
        for k in 1..p.len() {
            c[k] = c[k - 1] + 0.5 * self.h * (p[k - 1] + p[k]);
        }
        let total = c[c.len() - 1];
        c.iter_mut().for_each(|v| *v /= total);
        c
    }

    /// Distribution function, interpolating the node values linearly.
    pub fn cdf(&self) -> impl Fn(f64) -> f64 + '_ {
        let c = self.cdf_nodes();
        move |x| {
            let t = (x - self.node(0)) / self.h;
            if t <= 0.0 {
                return 0.0;
            }
            if t >= (c.len() - 1) as f64 {
                return 1.0;
            }
            let i = t as usize;
            let u = t - i as f64;
            (1.0 - u) * c[i] + u * c[i + 1]
        }
    }
}

struct Window {
    left: usize,
    right: usize,
    h: f64,
}

impl Window {
    fn nodes(&self, center: f64) -> Vec<f64> {
        (0..=self.left + self.right).map(|k| center + (k as f64 - self.left as f64) * self.h).collect()
    }
}

fn window(center: f64, lo: f64, hi: f64, n: usize) -> Window {
    let h = (hi - lo) / (n.max(3) - 1) as f64;
    let left = ((center - lo) / h * (1.0 + 1e-12)).floor().max(1.0) as usize;
    let mut right = ((hi - center) / h * (1.0 + 1e-12)).floor().max(1.0) as usize;
    if (left + right) % 2 == 1 {
        right += 1;
    }
    Window { left, right, h }
}

fn peak(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

fn build(
    mut eval: impl FnMut(&[f64], usize) -> (Vec<f64>, f64),
    center: f64,
    domain: (f64, f64),
    opts: &DensityOptions,
) -> Result<StationaryDensity1D> {
    let (dlo, dhi) = domain;
    if !(center > dlo && center < dhi) {
        return Err(Error::Domain { what: "density center", value: center });
    }
    // Keep nodes strictly inside an open domain.
    let inset = |b: f64, toward: f64| if b.is_finite() { b + (toward - b) * 1e-9 } else { b };
    let (dlo, dhi) = (inset(dlo, center), inset(dhi, center));
    let mut lo = (center - opts.half_width).max(dlo);
    let mut hi = (center + opts.half_width).min(dhi);
    let drop = opts.log_drop;

    for _ in 0..opts.max_widenings {
        let w = window(center, lo, hi, opts.coarse_nodes);
        let nodes = w.nodes(center);
        let (vals, _) = eval(&nodes, w.left);
        if vals.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::NotLocalized { lo, hi });
        }
        let top = peak(&vals);
        let at_lo = lo <= dlo;
        let at_hi = hi >= dhi;
        let left_ok = vals[0] <= top - drop - 1.0 || at_lo;
        let right_ok = vals[vals.len() - 1] <= top - drop - 1.0 || at_hi;
        if !left_ok {
            lo = (center - 2.0 * (center - lo)).max(dlo);
        }
        if !right_ok {
            hi = (center + 2.0 * (hi - center)).min(dhi);
        }
        if !(left_ok && right_ok) {
            continue;
        }
        // Trim to where the log sits within `drop + 2` of the peak, plus one coarse step.
        let keep = top - drop - 2.0;
        let first = vals.iter().position(|v| *v >= keep).unwrap_or(0);
        let last = vals.iter().rposition(|v| *v >= keep).unwrap_or(vals.len() - 1);
        let flo = nodes[first.saturating_sub(1)].min(center - w.h);
        let fhi = nodes[(last + 1).min(nodes.len() - 1)].max(center + w.h);

        let fw = window(center, flo, fhi, opts.nodes);
        let fnodes = fw.nodes(center);
        let (fvals, simpson_err) = eval(&fnodes, fw.left);
        let ftop = peak(&fvals);
        let fine_ok = |v: f64, at_edge: bool| v <= ftop - drop || at_edge;
        if !fine_ok(fvals[0], flo <= dlo + w.h) {
            lo = (center - 2.0 * (center - flo)).max(dlo);
            continue;
        }
        if !fine_ok(fvals[fvals.len() - 1], fhi >= dhi - w.h) {
            hi = (center + 2.0 * (fhi - center)).min(dhi);
            continue;
        }
        let scaled: Vec<f64> = fvals.iter().map(|v| (v - ftop).exp()).collect();
        let z = trapezoid(&scaled, fw.h);
        let z2 = trapezoid_coarse(&scaled, fw.h);
        return Ok(StationaryDensity1D {
            center,
            h: fw.h,
            left: fw.left,
            log_density: fvals,
            log_normalizer: ftop + z.ln(),
            quad_error: (z - z2).abs() / z + simpson_err,
        });
    }
    Err(Error::NotLocalized { lo, hi })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_from_derivative() {
        // log p = -(x - 1)^2 / (2 * 0.3)
        let d = StationaryDensity1D::from_log_derivative(
            |x| -(x - 1.0) / 0.3,
            0.0,
            (f64::NEG_INFINITY, f64::INFINITY),
            &DensityOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(d.integrate(|_| 1.0), 1.0, epsilon = 1e-12);
        assert_relative_eq!(d.mean(), 1.0, epsilon = 1e-10);
        assert_relative_eq!(d.variance(), 0.3, max_relative = 1e-9);
        let (lo, hi) = d.truncation_bounds();
        let top = peak(d.log_density());
        assert!(d.log_density()[0] <= top - LOG_DROP);
        assert!(d.log_density()[d.len() - 1] <= top - LOG_DROP);
        assert!(lo < 1.0 - 4.0 && hi > 1.0 + 4.0);
        assert!(d.quad_error() < 1e-10);
    }

    #[test]
    fn widens_for_broad_densities() {
        let d = StationaryDensity1D::from_log_fn(
            |x| -x * x / 200.0,
            0.0,
            (f64::NEG_INFINITY, f64::INFINITY),
            &DensityOptions::default(),
        )
        .unwrap();
        assert_relative_eq!(d.variance(), 100.0, max_relative = 1e-9);
    }

    #[test]
    fn symmetric_potential_gives_even_density() {
        let d = StationaryDensity1D::from_log_derivative(
            |x| -(x.abs().powf(1.5)) * x.signum() - 0.3 * x.tanh(),
            0.0,
            (f64::NEG_INFINITY, f64::INFINITY),
            &DensityOptions::default(),
        )
        .unwrap();
        let ld = d.log_density();
        let n = ld.len();
        for k in 0..n {
            assert_eq!(ld[k], ld[n - 1 - k]);
        }
    }

    #[test]
    fn respects_open_domain() {
        // Beta(3, 3)-like density on (0, 1).
        let d = StationaryDensity1D::from_log_fn(
            |x| 2.0 * (x.ln() + (1.0 - x).ln()),
            0.5,
            (0.0, 1.0),
            &DensityOptions { nodes: 20001, ..DensityOptions::default() },
        )
        .unwrap();
        assert_relative_eq!(d.mean(), 0.5, epsilon = 1e-10);
        assert_relative_eq!(d.variance(), 1.0 / 28.0, max_relative = 1e-6);
    }

    #[test]
    fn flat_density_is_not_localized() {
        let r = StationaryDensity1D::from_log_fn(
            |_| 0.0,
            0.0,
            (f64::NEG_INFINITY, f64::INFINITY),
            &DensityOptions { max_widenings: 10, ..DensityOptions::default() },
        );
        assert!(matches!(r, Err(Error::NotLocalized { .. })));
    }

    #[test]
    fn cdf_is_monotone_and_ends_at_one() {
        let d = StationaryDensity1D::from_log_fn(
            |x| -x * x,
            0.0,
            (f64::NEG_INFINITY, f64::INFINITY),
            &DensityOptions::default(),
        )
        .unwrap();
        let c = d.cdf();
        assert_eq!(c(-100.0), 0.0);
        assert_eq!(c(100.0), 1.0);
        assert_relative_eq!(c(0.0), 0.5, epsilon = 1e-6);
        let mut prev = 0.0;
        for k in 0..200 {
            let v = c(-5.0 + k as f64 * 0.05);
            assert!(v >= prev);
            prev = v;
        }
    }
}
