//! Classification of first-singularity points of the smooth flow.
//!
//! Everything is phrased in terms of `φ(t, x) = det(I + t Dw(x))`. For a
//! planar field this is the quadratic `1 + t·tr Dw + t²·det Dw`, so every
//! partial derivative of `φ` is an exact combination of the trace and
//! determinant polynomials of `Dw` and their spatial derivatives.
//!
//! Blow-up points are the solutions of `φ = φ_x₁ = φ_x₂ = 0`. For a generic
//! field they are isolated, the Jacobian of that 3×3 system has full rank,
//! the Hessian of the implicitly defined blow-up time `τ(x)` has rank two,
//! and the rank-one matrix `I + τ Dw` has a nonzero eigenvalue.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::series::{AnalyticField, BiSeries, Mat2, SeriesError, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SingularityError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("φ_t vanishes at a rank-one point (t = {t}, x = {x:?}); τ(x) is not defined there")]
    DegenerateTimeDerivative { t: f64, x: Vec2 },
    #[error("(t = {t}, x = {x:?}) is not a critical point: residual {residual:e}")]
    NotACriticalPoint { t: f64, x: Vec2, residual: f64 },
    #[error("invalid search: {0}")]
    InvalidSearch(String),
}

/// `φ` and the partial derivatives used by the classifier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiJet {
    pub phi: f64,
    pub phi_t: f64,
    pub grad_x: Vec2,
    /// Spatial Hessian, symmetric by construction.
    pub hess_x: Mat2,
    /// `∇ₓ φ_t`.
    pub phi_tx: Vec2,
}

impl PhiJet {
    /// `max(|φ|, |φ_x₁|, |φ_x₂|)`.
    pub fn residual(&self) -> f64 {
        self.phi.abs().max(self.grad_x.max_abs())
    }
}

// value, ∂1, ∂2, ∂11, ∂12, ∂22 of one polynomial
#[derive(Debug, Clone)]
struct Derivs2 {
    series: [BiSeries; 6],
}

impl Derivs2 {
    fn new(s: BiSeries) -> Self {
        let d1 = s.derivative(0);
        let d2 = s.derivative(1);
        let d11 = d1.derivative(0);
        let d12 = d1.derivative(1);
        let d22 = d2.derivative(1);
        Self {
            series: [s, d1, d2, d11, d12, d22],
        }
    }

    fn eval(&self, x: Vec2) -> [f64; 6] {
        let p = x.to_array();
        std::array::from_fn(|i| self.series[i].eval(p))
    }
}

/// Precomputed trace and determinant polynomials of `Dw` for fast
/// evaluation of [`PhiJet`]s.
#[derive(Debug, Clone)]
pub struct PhiEvaluator {
    field: AnalyticField,
    trace: Derivs2,
    det: Derivs2,
}

impl PhiEvaluator {
    pub fn new(field: &AnalyticField) -> Self {
        let dw = field.jacobian_series();
        // Products of Jacobian entries reach twice the field degree.
        let deg = 2 * field.w1().max_degree();
        let lift = |s: &BiSeries| s.with_degree(deg);
        let trace = &lift(&dw[0][0]) + &lift(&dw[1][1]);
        let det = &(&lift(&dw[0][0]) * &lift(&dw[1][1])) - &(&lift(&dw[0][1]) * &lift(&dw[1][0]));
        Self {
            field: field.clone(),
            trace: Derivs2::new(trace),
            det: Derivs2::new(det),
        }
    }

    pub fn field(&self) -> &AnalyticField {
        &self.field
    }

    pub fn eval(&self, t: f64, x: Vec2) -> Result<PhiJet, SeriesError> {
        self.field.check_in_box(x)?;
        let [tr, tr1, tr2, tr11, tr12, tr22] = self.trace.eval(x);
        let [de, de1, de2, de11, de12, de22] = self.det.eval(x);
        let t2 = t * t;
        Ok(PhiJet {
            phi: 1.0 + t * tr + t2 * de,
            phi_t: tr + 2.0 * t * de,
            grad_x: Vec2::new(t * tr1 + t2 * de1, t * tr2 + t2 * de2),
            hess_x: {
                let h12 = t * tr12 + t2 * de12;
                Mat2::new(t * tr11 + t2 * de11, h12, h12, t * tr22 + t2 * de22)
            },
            phi_tx: Vec2::new(tr1 + 2.0 * t * de1, tr2 + 2.0 * t * de2),
        })
    }

    /// Smallest `t > 0` with `φ(t, x) = 0`, i.e. `−1/λ` for the most
    /// negative real eigenvalue `λ` of `Dw(x)`.
    pub fn blowup_time(&self, x: Vec2) -> Result<Option<f64>, SeriesError> {
        Ok(blowup_time_of(&self.field.jacobian(x)?))
    }
}

/// Earliest blow-up candidate for a Jacobian: complex pairs and
/// nonnegative spectra contribute none.
pub fn blowup_time_of(dw: &Mat2) -> Option<f64> {
    match dw.real_eigenvalues() {
        Some((lmin, _)) if lmin < 0.0 => Some(-1.0 / lmin),
        _ => None,
    }
}

/// `φ` and its partials at `(t, x)` computed from exact series derivatives.
pub fn phi_jet(field: &AnalyticField, t: f64, x: Vec2) -> Result<PhiJet, SeriesError> {
    PhiEvaluator::new(field).eval(t, x)
}

/// Rows `(φ, φ_x₁, φ_x₂)` differentiated in `(t, x₁, x₂)`.
pub fn critical_system_jacobian(j: &PhiJet) -> [[f64; 3]; 3] {
    [
        [j.phi_t, j.grad_x.x, j.grad_x.y],
        [j.phi_tx.x, j.hess_x.a11, j.hess_x.a12],
        [j.phi_tx.y, j.hess_x.a21, j.hess_x.a22],
    ]
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Rank deficiency test: determinant small relative to the product of
/// row norms (Hadamard's bound).
pub fn is_rank_deficient(m: &[[f64; 3]; 3]) -> bool {
    let rows: f64 = m
        .iter()
        .map(|r| (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt())
        .product();
    rows == 0.0 || det3(m).abs() <= 1e-10 * rows
}

fn solve3(m: &[[f64; 3]; 3], b: [f64; 3]) -> Option<[f64; 3]> {
    if is_rank_deficient(m) {
        return None;
    }
    let mut a = [[0.0; 4]; 3];
    for i in 0..3 {
        a[i][..3].copy_from_slice(&m[i]);
        a[i][3] = b[i];
    }
    for col in 0..3 {
        let piv = (col..3)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        for r in (col + 1)..3 {
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut x = [0.0; 3];
    for i in (0..3).rev() {
        let mut s = a[i][3];
        for j in (i + 1)..3 {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    Some(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CriticalNewton {
    Converged {
        t: f64,
        x: Vec2,
        iterations: usize,
        rank_deficient: bool,
    },
    /// The Jacobian was singular away from a root.
    SingularSeed,
    Diverged,
}

const CRITICAL_TOL: f64 = 1e-13;
const CRITICAL_MAX_ITER: usize = 50;

/// Newton iteration for `φ = φ_x₁ = φ_x₂ = 0` from `(t0, x0)`.
pub fn newton_critical(phi: &PhiEvaluator, t0: f64, x0: Vec2) -> CriticalNewton {
    let (mut t, mut x) = (t0, x0);
    for it in 0..=CRITICAL_MAX_ITER {
        let jet = match phi.eval(t, x) {
            Ok(j) => j,
            Err(_) => return CriticalNewton::Diverged,
        };
        let m = critical_system_jacobian(&jet);
        if jet.residual() < CRITICAL_TOL {
            return CriticalNewton::Converged {
                t,
                x,
                iterations: it,
                rank_deficient: is_rank_deficient(&m),
            };
        }
        if it == CRITICAL_MAX_ITER {
            break;
        }
        let Some(d) = solve3(&m, [-jet.phi, -jet.grad_x.x, -jet.grad_x.y]) else {
            return CriticalNewton::SingularSeed;
        };
        t += d[0];
        x = x + Vec2::new(d[1], d[2]);
        if !(t.is_finite() && x.x.is_finite() && x.y.is_finite()) {
            return CriticalNewton::Diverged;
        }
        if d.iter().all(|v| v.abs() <= 1e-15 * (1.0 + t.abs() + x.max_abs())) {
            // Stalled at the rounding floor; accept if the residual is small.
            if let Ok(j) = phi.eval(t, x) {
                if j.residual() < 1e-10 {
                    return CriticalNewton::Converged {
                        t,
                        x,
                        iterations: it + 1,
                        rank_deficient: is_rank_deficient(&critical_system_jacobian(&j)),
                    };
                }
            }
            return CriticalNewton::Diverged;
        }
    }
    CriticalNewton::Diverged
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct GenericityFlags {
    /// `I + τ Dw(x)` is not the zero matrix.
    pub s0_empty: bool,
    /// The rank-one set is a smooth surface here (`φ_t ≠ 0`).
    pub s1_manifold: bool,
    pub hessian_rank2: bool,
    pub nonzero_eigenvalue: bool,
}

impl GenericityFlags {
    pub fn all(&self) -> bool {
        self.s0_empty && self.s1_manifold && self.hessian_rank2 && self.nonzero_eigenvalue
    }
}

/// A candidate first-singularity point with its genericity flags.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlowupPoint {
    pub tau: f64,
    /// Lagrangian preimage.
    pub x: Vec2,
    /// Eulerian location `x + τ w(x)`.
    pub y: Vec2,
    /// `I + τ Dw(x)`.
    pub a: Mat2,
    /// Hessian of `τ(x)`.
    pub hessian: Mat2,
    pub hessian_eigenvalues: (f64, f64),
    pub phi_t: f64,
    pub flags: GenericityFlags,
    /// False when `s0_empty` fails: the remaining flags are then not
    /// meaningful.
    pub reliable: bool,
    /// Full rank of the Jacobian of `(φ, φ_x₁, φ_x₂)` in `(t, x)`.
    pub jacobian_full_rank: bool,
}

impl BlowupPoint {
    pub fn is_generic(&self) -> bool {
        self.reliable && self.jacobian_full_rank && self.flags.all()
    }
}

/// Computes the flags of a point solving `φ = ∇ₓφ = 0`.
pub fn classify_genericity(
    phi: &PhiEvaluator,
    t: f64,
    x: Vec2,
) -> Result<BlowupPoint, SingularityError> {
    let field = phi.field();
    let jet = phi.eval(t, x)?;
    if jet.phi.abs() >= 1e-10 || jet.grad_x.max_abs() >= 1e-8 {
        return Err(SingularityError::NotACriticalPoint {
            t,
            x,
            residual: jet.residual(),
        });
    }
    let dw = field.jacobian(x)?;
    let a = Mat2::IDENTITY + dw * t;
    let y = x + field.eval(x)? * t;
    let jacobian_full_rank = !is_rank_deficient(&critical_system_jacobian(&jet));

    let tol_a = 1e-8 * (1.0 + a.frobenius());
    let (smin, smax) = a.singular_values();
    let s0_empty = smax > tol_a;
    if !s0_empty {
        return Ok(BlowupPoint {
            tau: t,
            x,
            y,
            a,
            hessian: Mat2::ZERO,
            hessian_eigenvalues: (0.0, 0.0),
            phi_t: jet.phi_t,
            flags: GenericityFlags {
                s0_empty: false,
                s1_manifold: false,
                hessian_rank2: false,
                nonzero_eigenvalue: false,
            },
            reliable: false,
            jacobian_full_rank,
        });
    }

    let tol_t = 1e-8 * (1.0 + dw.frobenius() * (1.0 + t * dw.frobenius()));
    if jet.phi_t.abs() <= tol_t {
        return Err(SingularityError::DegenerateTimeDerivative { t, x });
    }
    let rank_one = smin <= tol_a;
    let hessian = jet.hess_x * (-1.0 / jet.phi_t);
    let tol_h = 1e-8 * (1.0 + hessian.frobenius());
    Ok(BlowupPoint {
        tau: t,
        x,
        y,
        a,
        hessian,
        hessian_eigenvalues: hessian.symmetric_eigenvalues(),
        phi_t: jet.phi_t,
        flags: GenericityFlags {
            s0_empty,
            s1_manifold: rank_one,
            hessian_rank2: hessian.det().abs() > tol_h,
            nonzero_eigenvalue: a.trace().abs() > tol_a,
        },
        reliable: true,
        jacobian_full_rank,
    })
}

/// Search domain and seeding for [`find_critical_points`].
#[derive(Debug, Clone, PartialEq)]
pub struct CriticalSearch {
    pub lo: Vec2,
    pub hi: Vec2,
    pub t_max: f64,
    pub grid: usize,
    /// Cap on distinct roots; exceeding it marks a continuum of roots.
    pub max_roots: usize,
    pub dedup_radius: f64,
}

impl CriticalSearch {
    pub fn new(lo: Vec2, hi: Vec2, t_max: f64, grid: usize) -> Self {
        Self {
            lo,
            hi,
            t_max,
            grid,
            max_roots: 64,
            dedup_radius: 1e-6,
        }
    }

    fn contains(&self, t: f64, x: Vec2) -> bool {
        let eps = 1e-12;
        t > 0.0
            && t <= self.t_max * (1.0 + eps)
            && x.x >= self.lo.x - eps
            && x.x <= self.hi.x + eps
            && x.y >= self.lo.y - eps
            && x.y <= self.hi.y + eps
    }

    pub fn grid_point(&self, i: usize, j: usize) -> Vec2 {
        let n = (self.grid - 1) as f64;
        Vec2::new(
            self.lo.x + (self.hi.x - self.lo.x) * i as f64 / n,
            self.lo.y + (self.hi.y - self.lo.y) * j as f64 / n,
        )
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CriticalReport {
    pub points: Vec<BlowupPoint>,
    pub seeds: usize,
    pub discarded_singular_seeds: usize,
    pub diverged_seeds: usize,
    /// Roots where `φ_t` vanished on a rank-one matrix.
    pub degenerate_roots: usize,
    /// More distinct roots than `max_roots`: a continuum, not isolated points.
    pub flooded: bool,
}

impl CriticalReport {
    /// True only when every root is isolated and passes every flag.
    pub fn is_generic(&self) -> bool {
        !self.flooded && self.degenerate_roots == 0 && self.points.iter().all(BlowupPoint::is_generic)
    }
}

/// Seeds Newton on `(φ, φ_x₁, φ_x₂) = 0` from every grid node whose blow-up
/// time is at most `t_max`, deduplicates the converged roots and classifies
/// them.
pub fn find_critical_points(
    field: &AnalyticField,
    search: &CriticalSearch,
) -> Result<CriticalReport, SingularityError> {
    if search.grid < 2 {
        return Err(SingularityError::InvalidSearch("grid must be at least 2x2".into()));
    }
    if !(search.t_max > 0.0) {
        return Err(SingularityError::InvalidSearch("t_max must be positive".into()));
    }
    let phi = PhiEvaluator::new(field);
    let n = search.grid;
    let seeds: Vec<(f64, Vec2)> = (0..n * n)
        .filter_map(|k| {
            let x = search.grid_point(k / n, k % n);
            match phi.blowup_time(x) {
                Ok(Some(t)) if t <= search.t_max => Some((t, x)),
                _ => None,
            }
        })
        .collect();

    let outcomes: Vec<CriticalNewton> = seeds
        .par_iter()
        .map(|&(t, x)| newton_critical(&phi, t, x))
        .collect();

    let mut discarded = 0;
    let mut diverged = 0;
    let mut roots: Vec<(f64, Vec2)> = Vec::new();
    for o in &outcomes {
        match *o {
            CriticalNewton::Converged { t, x, .. } if search.contains(t, x) => roots.push((t, x)),
            CriticalNewton::Converged { .. } | CriticalNewton::Diverged => diverged += 1,
            CriticalNewton::SingularSeed => discarded += 1,
        }
    }
    if discarded > 0 {
        log::debug!("{discarded} seeds discarded with a singular critical-system Jacobian");
    }

    roots.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.x.total_cmp(&b.1.x))
            .then(a.1.y.total_cmp(&b.1.y))
    });
    let mut distinct: Vec<(f64, Vec2)> = Vec::new();
    let mut flooded = false;
    for r in roots {
        let dup = distinct.iter().any(|d| {
            let dx = r.1 - d.1;
            (r.0 - d.0).hypot(dx.norm()) <= search.dedup_radius
        });
        if dup {
            continue;
        }
        if distinct.len() == search.max_roots {
            flooded = true;
            break;
        }
        distinct.push(r);
    }

    let mut points = Vec::with_capacity(distinct.len());
    let mut degenerate = 0;
    for (t, x) in distinct {
        match classify_genericity(&phi, t, x) {
            Ok(p) => points.push(p),
            Err(SingularityError::DegenerateTimeDerivative { .. }) => degenerate += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(CriticalReport {
        points,
        seeds: seeds.len(),
        discarded_singular_seeds: discarded,
        diverged_seeds: diverged,
        degenerate_roots: degenerate,
        flooded,
    })
}
