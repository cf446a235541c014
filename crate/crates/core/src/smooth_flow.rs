//! Classical solution by characteristics.
//!
//! Before the first singularity every particle moves on a straight line,
//! `y = x + t w(x)`, keeping its initial velocity. Density follows from mass
//! conservation through the Jacobian of this map.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::series::{AnalyticField, Mat2, SeriesError, Vec2};
use crate::singularity::{blowup_time_of, newton_critical, CriticalNewton, PhiEvaluator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error(transparent)]
    Domain(#[from] SeriesError),
    #[error("characteristic has collapsed: det(I + t Dw) = {det:e} at x = {x:?}, t = {t}")]
    BlowupReached { x: Vec2, t: f64, det: f64 },
    #[error("Lagrangian inversion did not converge after {iterations} steps (residual {residual:e})")]
    NewtonFailed { iterations: usize, residual: f64 },
    #[error("invalid scan: {0}")]
    InvalidScan(String),
}

/// `x + t w(x)`.
pub fn lagrangian_position(field: &AnalyticField, x: Vec2, t: f64) -> Result<Vec2, FlowError> {
    Ok(x + field.eval(x)? * t)
}

/// `I + t Dw(x)`.
pub fn deformation(field: &AnalyticField, x: Vec2, t: f64) -> Result<Mat2, FlowError> {
    Ok(Mat2::IDENTITY + field.jacobian(x)? * t)
}

/// `ρ̄(x) / det(I + t Dw(x))`.
pub fn density_along_characteristic(field: &AnalyticField, x: Vec2, t: f64) -> Result<f64, FlowError> {
    let det = deformation(field, x, t)?.det();
    if det <= 0.0 {
        return Err(FlowError::BlowupReached { x, t, det });
    }
    Ok(field.density(x)? / det)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EulerianState {
    pub rho: f64,
    pub v: Vec2,
    /// Lagrangian preimage of the query point.
    pub x: Vec2,
    pub iterations: usize,
}

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITER: usize = 50;

/// Density and velocity at Eulerian point `y`, found by inverting the
/// Lagrangian map with damped Newton iteration.
pub fn eulerian_state(field: &AnalyticField, t: f64, y: Vec2) -> Result<EulerianState, FlowError> {
    let residual = |x: Vec2| -> Result<Vec2, FlowError> { Ok(lagrangian_position(field, x, t)? - y) };
    let mut x = match field.eval(y) {
        Ok(w) if field.check_in_box(y - w * t).is_ok() => y - w * t,
        _ => y,
    };
    let mut r = residual(x)?;
    let mut iterations = 0;
    while r.norm() >= NEWTON_TOL {
        if iterations == NEWTON_MAX_ITER {
            return Err(FlowError::NewtonFailed {
                iterations,
                residual: r.norm(),
            });
        }
        iterations += 1;
        let j = deformation(field, x, t)?;
        if j.det() <= 0.0 {
            return Err(FlowError::BlowupReached { x, t, det: j.det() });
        }
        let step = j.solve(-r).expect("positive determinant");
        let mut lambda = 1.0;
        loop {
            let trial = x + step * lambda;
            if let Ok(rt) = residual(trial) {
                if rt.norm() < r.norm() || lambda < 1e-9 {
                    x = trial;
                    r = rt;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-9 {
                return Err(FlowError::NewtonFailed {
                    iterations,
                    residual: r.norm(),
                });
            }
        }
    }
    Ok(EulerianState {
        rho: density_along_characteristic(field, x, t)?,
        v: field.eval(x)?,
        x,
        iterations,
    })
}

/// Domain and resolution of a blow-up scan.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig {
    pub lo: Vec2,
    pub hi: Vec2,
    pub n: usize,
    pub t_max: f64,
    /// Number of best cells handed to the Newton polish.
    pub polish_top: usize,
}

impl ScanConfig {
    pub fn new(lo: Vec2, hi: Vec2, n: usize, t_max: f64) -> Self {
        Self {
            lo,
            hi,
            n,
            t_max,
            polish_top: 10,
        }
    }

    pub fn node(&self, i: usize, j: usize) -> Vec2 {
        let d = (self.n - 1) as f64;
        Vec2::new(
            self.lo.x + (self.hi.x - self.lo.x) * i as f64 / d,
            self.lo.y + (self.hi.y - self.lo.y) * j as f64 / d,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupScanResult {
    pub tau_star: f64,
    pub x_star: Vec2,
    pub y_star: Vec2,
    pub cells_scanned: usize,
    pub newton_iterations: usize,
    /// Whether the minimum came from a Newton-polished critical point
    /// rather than a raw grid node.
    pub polished: bool,
    pub grid_minimum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupScan {
    pub n: usize,
    pub lo: Vec2,
    pub hi: Vec2,
    pub t_max: f64,
    /// Earliest blow-up candidate at node `(i, j)`, stored at `i * n + j`.
    pub cell_tau: Vec<Option<f64>>,
    /// `None` when nothing in the box blows up by `t_max`.
    pub result: Option<BlowupScanResult>,
}

/// Earliest blow-up time over the box: a grid scan of `−1/λ` for real
/// negative eigenvalues of `Dw`, then Newton polishing of the best cells on
/// `φ = ∇ₓφ = 0`.
pub fn first_blowup_scan(field: &AnalyticField, cfg: &ScanConfig) -> Result<BlowupScan, FlowError> {
    if cfg.n < 2 {
        return Err(FlowError::InvalidScan("grid must be at least 2x2".into()));
    }
    if !(cfg.t_max > 0.0) {
        return Err(FlowError::InvalidScan("t_max must be positive".into()));
    }
    let n = cfg.n;
    let cell_tau: Vec<Option<f64>> = (0..n * n)
        .into_par_iter()
        .map(|k| -> Result<Option<f64>, FlowError> {
            let dw = field.jacobian(cfg.node(k / n, k % n))?;
            Ok(blowup_time_of(&dw))
        })
        .collect::<Result<_, _>>()?;

    let mut ranked: Vec<(f64, usize)> = cell_tau
        .iter()
        .enumerate()
        .filter_map(|(k, t)| t.filter(|&t| t <= cfg.t_max).map(|t| (t, k)))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let Some(&(grid_min, grid_k)) = ranked.first() else {
        return Ok(BlowupScan {
            n,
            lo: cfg.lo,
            hi: cfg.hi,
            t_max: cfg.t_max,
            cell_tau,
            result: None,
        });
    };

    let phi = PhiEvaluator::new(field);
    let in_box = |x: Vec2| x.x >= cfg.lo.x && x.x <= cfg.hi.x && x.y >= cfg.lo.y && x.y <= cfg.hi.y;
    let mut best = (grid_min, cfg.node(grid_k / n, grid_k % n), false);
    let mut newton_iterations = 0;
    for &(t0, k) in ranked.iter().take(cfg.polish_top) {
        if let CriticalNewton::Converged { t, x, iterations, .. } = newton_critical(&phi, t0, cfg.node(k / n, k % n)) {
            newton_iterations += iterations;
            if !in_box(x) || t > cfg.t_max {
                continue;
            }
            // A root of the critical system may sit on a later sheet of
            // φ = 0; only the earliest blow-up time at x counts.
            let Some(tau) = phi.blowup_time(x)? else { continue };
            if (tau - t).abs() > 1e-9 * (1.0 + t.abs()) {
                continue;
            }
            if t < best.0 || (t == best.0 && !best.2) {
                best = (t, x, true);
            }
        }
    }
    let (tau_star, x_star, polished) = best;
    Ok(BlowupScan {
        n,
        lo: cfg.lo,
        hi: cfg.hi,
        t_max: cfg.t_max,
        cell_tau,
        result: Some(BlowupScanResult {
            tau_star,
            x_star,
            y_star: lagrangian_position(field, x_star, tau_star)?,
            cells_scanned: n * n,
            newton_iterations,
            polished,
            grid_minimum: grid_min,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::fields;
    use crate::series::BiSeries;

    fn constant_field(c: Vec2) -> AnalyticField {
        let w1 = BiSeries::constant([0.0, 0.0], 3, c.x);
        let w2 = BiSeries::constant([0.0, 0.0], 3, c.y);
        AnalyticField::new(w1, w2, None).unwrap()
    }

    #[test]
    fn lagrangian_examples() {
        let f = constant_field(Vec2::new(1.0, 0.0));
        assert_eq!(lagrangian_position(&f, Vec2::ZERO, 2.0).unwrap(), Vec2::new(2.0, 0.0));
        let g = AnalyticField::linear(Mat2::diag(-1.0, -1.0), 3);
        let x = Vec2::new(0.3, -0.7);
        assert_eq!(lagrangian_position(&g, x, 0.0).unwrap(), x);
        assert_eq!(
            lagrangian_position(&g, Vec2::new(1.0, 1.0), 0.5).unwrap(),
            Vec2::new(0.5, 0.5)
        );
    }

    #[test]
    fn radial_density() {
        let g = AnalyticField::linear(Mat2::diag(-1.0, -1.0), 3);
        assert_eq!(density_along_characteristic(&g, Vec2::new(0.2, 0.1), 0.5).unwrap(), 4.0);
        assert_eq!(density_along_characteristic(&g, Vec2::new(0.2, 0.1), 0.0).unwrap(), 1.0);
        assert!(matches!(
            density_along_characteristic(&g, Vec2::ZERO, 1.0),
            Err(FlowError::BlowupReached { .. })
        ));
    }

    #[test]
    fn eulerian_inversion_linear() {
        let c = Vec2::new(0.3, -0.2);
        let s = eulerian_state(&constant_field(c), 0.7, Vec2::new(0.1, 0.1)).unwrap();
        assert!((s.x - (Vec2::new(0.1, 0.1) - c * 0.7)).max_abs() < 1e-15);
        assert_eq!(s.v, c);

        let g = AnalyticField::linear(Mat2::diag(-1.0, -1.0), 3);
        let s = eulerian_state(&g, 0.5, Vec2::new(0.5, 0.0)).unwrap();
        assert!((s.x - Vec2::new(1.0, 0.0)).max_abs() < 1e-12);
        assert!((s.v - Vec2::new(-1.0, 0.0)).max_abs() < 1e-12);
        assert!((s.rho - 4.0).abs() < 1e-10);
    }

    #[test]
    fn eulerian_cubic_residual() {
        let f = fields::cubic();
        for y in [Vec2::new(0.1, 0.05), Vec2::new(-0.2, 0.3), Vec2::new(0.0, -0.25)] {
            let s = eulerian_state(&f, 0.3, y).unwrap();
            let back = lagrangian_position(&f, s.x, 0.3).unwrap();
            assert!((back - y).norm() < 1e-12);
            assert!(s.iterations <= 20);
        }
    }

    #[test]
    fn scan_linear_fields() {
        let box_ = (Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5));
        let g = AnalyticField::linear(Mat2::diag(-1.0, -1.0), 3);
        let r = first_blowup_scan(&g, &ScanConfig::new(box_.0, box_.1, 11, 5.0)).unwrap();
        assert!((r.result.unwrap().tau_star - 1.0).abs() < 1e-14);

        let a = AnalyticField::linear(Mat2::diag(-1.0, -2.0), 3);
        let r = first_blowup_scan(&a, &ScanConfig::new(box_.0, box_.1, 11, 5.0)).unwrap();
        assert!((r.result.unwrap().tau_star - 0.5).abs() < 1e-14);

        let e = AnalyticField::linear(Mat2::IDENTITY, 3);
        let r = first_blowup_scan(&e, &ScanConfig::new(box_.0, box_.1, 11, 5.0)).unwrap();
        assert!(r.result.is_none());
    }

    #[test]
    fn scan_cubic_polishes_to_origin() {
        let f = fields::cubic();
        // Even grid: the origin is not a node.
        let cfg = ScanConfig::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5), 40, 5.0);
        let r = first_blowup_scan(&f, &cfg).unwrap().result.unwrap();
        assert!(r.polished);
        assert!((r.tau_star - 1.0).abs() < 1e-12);
        assert!(r.x_star.norm() < 1e-8);
        assert!(r.grid_minimum > r.tau_star);
    }
}
