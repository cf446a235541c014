//! Grid operators on uniform ξ-grids: fourth-order derivative, quadrature
//! and the exponential mode filter.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::series::Vec2;

/// Fewest nodes the derivative stencil accepts.
pub const MIN_NODES: usize = 5;

const LEFT0: [f64; 5] = [-25.0, 48.0, -36.0, 16.0, -3.0];
const LEFT1: [f64; 5] = [-3.0, -10.0, 18.0, -6.0, 1.0];

/// Fourth-order first derivative: centered in the interior, one-sided
/// on the two nodes nearest each end.
pub fn xi_derivative(h: f64, f: &[f64]) -> Vec<f64> {
    let n = f.len();
    assert!(n >= MIN_NODES, "derivative stencil needs {MIN_NODES} nodes, got {n}");
    let k = 1.0 / (12.0 * h);
    let dot = |w: &[f64; 5], i0: usize, sign: f64| -> f64 {
        (0..5)
            .map(|j| {
                let idx = if sign > 0.0 { i0 + j } else { i0 - j };
                w[j] * f[idx]
            })
            .sum::<f64>()
            * sign
            * k
    };
    let mut d = vec![0.0; n];
    d[0] = dot(&LEFT0, 0, 1.0);
    d[1] = dot(&LEFT1, 0, 1.0);
    d[n - 1] = dot(&LEFT0, n - 1, -1.0);
    d[n - 2] = dot(&LEFT1, n - 1, -1.0);
    for i in 2..n - 2 {
        d[i] = (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) * k;
    }
    d
}

pub fn xi_derivative_vec2(h: f64, f: &[Vec2]) -> Vec<Vec2> {
    let (xs, ys) = split(f);
    zip(&xi_derivative(h, &xs), &xi_derivative(h, &ys))
}

pub(crate) fn split(f: &[Vec2]) -> (Vec<f64>, Vec<f64>) {
    (f.iter().map(|v| v.x).collect(), f.iter().map(|v| v.y).collect())
}

pub(crate) fn zip(x: &[f64], y: &[f64]) -> Vec<Vec2> {
    x.iter().zip(y).map(|(&a, &b)| Vec2::new(a, b)).collect()
}

/// Spacing of a uniform grid, or `None` if the nodes are not equispaced
/// to rounding.
pub fn uniform_spacing(xi: &[f64]) -> Option<f64> {
    if xi.len() < 2 {
        return None;
    }
    let h = (xi[xi.len() - 1] - xi[0]) / (xi.len() - 1) as f64;
    let tol = 1e-9 * h.abs().max(f64::MIN_POSITIVE);
    let ok = xi.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= tol);
    (ok && h > 0.0).then_some(h)
}

pub fn uniform_nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2);
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

const GAUSS3: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// `∫_a^b f` from nodal values: piecewise cubic interpolation through the
/// four nearest nodes, three-point Gauss rule on each (clipped) cell.
pub fn integrate(xi: &[f64], f: &[f64], a: f64, b: f64) -> f64 {
    let n = xi.len();
    assert_eq!(n, f.len());
    let (a, b) = (a.max(xi[0]), b.min(xi[n - 1]));
    if n < 2 || a >= b {
        return 0.0;
    }
    let mut total = 0.0;
    for c in 0..n - 1 {
        let lo = xi[c].max(a);
        let hi = xi[c + 1].min(b);
        if lo >= hi {
            continue;
        }
        let idx: Vec<usize> = if n >= 4 {
            let start = c.saturating_sub(1).min(n - 4);
            (start..start + 4).collect()
        } else {
            vec![c, c + 1]
        };
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (g, w) in GAUSS3 {
            let x = mid + half * g;
            let mut val = 0.0;
            for &i in &idx {
                let mut l = 1.0;
                for &j in &idx {
                    if j != i {
                        l *= (x - xi[j]) / (xi[i] - xi[j]);
                    }
                }
                val += l * f[i];
            }
            total += w * half * val;
        }
    }
    total
}

/// Exponential damping `exp(−α (m/m_max)^order)` of the cosine modes of
/// nodal data on a uniform grid.
///
/// The cosine transform is the even extension's DFT, which assumes zero
/// end slopes. A quadratic matching the end slopes is removed first and
/// added back after filtering, so smooth data is left essentially intact.
pub struct ModeFilter {
    n: usize,
    alpha: f64,
    order: i32,
    fft: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for ModeFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModeFilter")
            .field("n", &self.n)
            .field("alpha", &self.alpha)
            .field("order", &self.order)
            .finish()
    }
}

impl ModeFilter {
    pub fn new(n: usize, alpha: f64, order: i32) -> Self {
        assert!(n >= MIN_NODES);
        let fft = FftPlanner::new().plan_fft_forward(2 * (n - 1));
        Self { n, alpha, order, fft }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Damping factor of mode `m`.
    pub fn sigma(&self, m: usize) -> f64 {
        let r = m as f64 / (self.n - 1) as f64;
        (-self.alpha * r.powi(self.order)).exp()
    }

    // Unnormalized DCT-I; applying it twice multiplies by 2(n − 1).
    fn dct1(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut buf: Vec<Complex<f64>> = Vec::with_capacity(2 * (n - 1));
        buf.extend(f.iter().map(|&x| Complex::new(x, 0.0)));
        buf.extend(f[1..n - 1].iter().rev().map(|&x| Complex::new(x, 0.0)));
        self.fft.process(&mut buf);
        buf[..n].iter().map(|c| c.re).collect()
    }

    fn detrend(&self, h: f64, f: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = self.n;
        let k = 1.0 / (12.0 * h);
        let da: f64 = (0..5).map(|j| LEFT0[j] * f[j]).sum::<f64>() * k;
        let db: f64 = -(0..5).map(|j| LEFT0[j] * f[n - 1 - j]).sum::<f64>() * k;
        let len = h * (n - 1) as f64;
        let g: Vec<f64> = (0..n)
            .map(|i| {
                let x = h * i as f64;
                da * x + (db - da) * x * x / (2.0 * len)
            })
            .collect();
        let r = f.iter().zip(&g).map(|(a, b)| a - b).collect();
        (r, g)
    }

    /// Root-mean-square amplitude of the top third of the modes,
    /// after removing the end-slope quadratic.
    pub fn high_mode_rms(&self, h: f64, f: &[f64]) -> f64 {
        let (r, _) = self.detrend(h, f);
        let modes = self.dct1(&r);
        self.tail_rms(&modes)
    }

    fn tail_rms(&self, modes: &[f64]) -> f64 {
        let m_max = self.n - 1;
        let first = (2 * m_max).div_ceil(3);
        let scale = 1.0 / m_max as f64;
        let tail = &modes[first..];
        (tail.iter().map(|a| (a * scale).powi(2)).sum::<f64>() / tail.len() as f64).sqrt()
    }

    /// Filters `f` in place and returns the high-mode amplitude measured
    /// before filtering.
    pub fn apply(&self, h: f64, f: &mut [f64]) -> f64 {
        assert_eq!(f.len(), self.n);
        let (r, g) = self.detrend(h, f);
        let mut modes = self.dct1(&r);
        let rms = self.tail_rms(&modes);
        for (m, a) in modes.iter_mut().enumerate() {
            *a *= self.sigma(m);
        }
        let back = self.dct1(&modes);
        let norm = 1.0 / (2 * (self.n - 1)) as f64;
        for i in 0..self.n {
            f[i] = back[i] * norm + g[i];
        }
        rms
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_is_exact_on_quartics() {
        let h = 0.1;
        let xs = uniform_nodes(-0.3, 0.6, 10);
        let f: Vec<f64> = xs.iter().map(|x| 1.0 - x + 2.0 * x * x - x.powi(3) + 0.5 * x.powi(4)).collect();
        let d = xi_derivative(h, &f);
        for (x, di) in xs.iter().zip(d) {
            let exact = -1.0 + 4.0 * x - 3.0 * x * x + 2.0 * x.powi(3);
            assert!((di - exact).abs() < 1e-12, "{x}: {di} vs {exact}");
        }
    }

    #[test]
    fn derivative_converges_at_fourth_order() {
        let err = |n: usize| {
            let xs = uniform_nodes(0.0, 1.0, n);
            let h = 1.0 / (n - 1) as f64;
            let f: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
            xi_derivative(h, &f)
                .iter()
                .zip(&xs)
                .map(|(d, x)| (d - x.cos()).abs())
                .fold(0.0, f64::max)
        };
        let rate = (err(21) / err(41)).log2();
        assert!(rate > 3.7, "rate {rate}");
    }

    #[test]
    fn quadrature_is_exact_on_cubics() {
        let xs = uniform_nodes(0.0, 1.0, 11);
        let f: Vec<f64> = xs.iter().map(|x| 3.0 * x * x - 2.0 * x.powi(3) + 1.0).collect();
        // ∫_{0.13}^{0.77} (3x² − 2x³ + 1) dx
        let anti = |x: f64| x.powi(3) - 0.5 * x.powi(4) + x;
        let exact = anti(0.77) - anti(0.13);
        assert!((integrate(&xs, &f, 0.13, 0.77) - exact).abs() < 1e-14);
        assert_eq!(integrate(&xs, &f, 0.5, 0.5), 0.0);
        let ones = vec![1.0; 11];
        assert!((integrate(&xs, &ones, 0.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dct_roundtrip() {
        let filt = ModeFilter::new(9, 0.0, 8);
        let f: Vec<f64> = (0..9).map(|i| (i as f64 * 0.7).cos() + i as f64).collect();
        let mut g = f.clone();
        filt.apply(0.125, &mut g);
        for (a, b) in f.iter().zip(&g) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn filter_leaves_quadratics_alone() {
        let filt = ModeFilter::new(33, 36.0, 8);
        let h = 1.0 / 32.0;
        let f: Vec<f64> = (0..33).map(|i| {
            let x = i as f64 * h;
            2.0 - 0.5 * x + 3.0 * x * x
        }).collect();
        let mut g = f.clone();
        let rms = filt.apply(h, &mut g);
        assert!(rms < 1e-14);
        for (a, b) in f.iter().zip(&g) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn filter_removes_sawtooth() {
        let n = 33;
        let filt = ModeFilter::new(n, 36.0, 8);
        let h = 1.0 / 32.0;
        let mut f: Vec<f64> = (0..n).map(|i| 1e-3 * if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let rms = filt.apply(h, &mut f);
        assert!(rms > 1e-4);
        let after = filt.high_mode_rms(h, &f);
        assert!(after < 0.2 * rms, "{rms} -> {after}");
    }
}
