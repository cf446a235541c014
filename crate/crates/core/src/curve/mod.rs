//! Mass-carrying singular curves.
//!
//! A curve is parametrized by a Lagrangian label `ξ`: `y(t, ξ)` is the
//! position of the particle `ξ`, `η` its mass per unit `ξ`, `v` its velocity
//! and `p = y_ξ` the tangent. Gas from both sides impinges on the curve and
//! sticks:
//!
//! ```text
//! y_t = v
//! η_t = [p×(v−v⁺)]ρ⁺ − [p×(v−v⁻)]ρ⁻
//! v_t = ([p×(v−v⁺)]ρ⁺(v⁺−v) − [p×(v−v⁻)]ρ⁻(v⁻−v)) / η
//! p_t = v_ξ
//! ```
//!
//! where `+` is the side the normal `n = p⊥/|p|` points to and the ambient
//! fields are evaluated at `(t, y)`.

pub(crate) mod ck;
mod mol;
pub mod stencil;

use serde::Serialize;
use thiserror::Error;

use crate::series::{compose_all, BiSeries, SeriesError, TriSeries, UniSeries, Vec2, DEFAULT_MAX_DEGREE};

pub use ck::{build_jet, ck_step, evolve_ck, solve_cauchy, BoundaryData, CkStep, CurveJet, TAIL_TOL};
pub use mol::{evolve_mol, mol_step, FilterParams, MolFilter};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("nonpositive mass density η = {eta:e} at ξ = {xi}")]
    DegenerateDensity { xi: f64, eta: f64 },
    #[error("vanishing tangent at ξ = {xi}")]
    DegenerateTangent { xi: f64 },
    #[error("power-series step rejected: tail ratio {tail_ratio:e} at dt = {dt}; try dt = {suggested_dt:e}")]
    StepRejected {
        dt: f64,
        tail_ratio: f64,
        suggested_dt: f64,
    },
    #[error("high-mode growth in {field} at t = {t}: amplitude {amplitude:e} exceeds {threshold:e}")]
    HighModeGrowth {
        field: &'static str,
        t: f64,
        amplitude: f64,
        threshold: f64,
    },
    #[error("ambient density {rho:e} is negative at (t, x) = ({t}, {x:?})")]
    NegativeAmbientDensity { t: f64, x: Vec2, rho: f64 },
    #[error("invalid curve state: {0}")]
    InvalidState(String),
}

/// Ambient fields at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmbientSample {
    pub rho_plus: f64,
    pub rho_minus: f64,
    pub v_plus: Vec2,
    pub v_minus: Vec2,
}

/// Densities and velocities of the gas on both sides of the curve, as
/// series in `(t, x₁, x₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientState {
    rho_plus: TriSeries,
    rho_minus: TriSeries,
    v_plus: [TriSeries; 2],
    v_minus: [TriSeries; 2],
}

impl AmbientState {
    pub fn new(
        rho_plus: TriSeries,
        rho_minus: TriSeries,
        v_plus: [TriSeries; 2],
        v_minus: [TriSeries; 2],
    ) -> Result<Self, CurveError> {
        for s in [&rho_minus, &v_plus[0], &v_plus[1], &v_minus[0], &v_minus[1]] {
            rho_plus.is_compatible(s)?;
        }
        let a = Self {
            rho_plus,
            rho_minus,
            v_plus,
            v_minus,
        };
        a.check_densities()?;
        Ok(a)
    }

    /// Spatially uniform, steady ambient gas.
    pub fn constant(rho_plus: f64, rho_minus: f64, v_plus: Vec2, v_minus: Vec2) -> Self {
        let c = |k: f64| TriSeries::constant([0.0; 3], DEFAULT_MAX_DEGREE, k);
        Self::new(
            c(rho_plus),
            c(rho_minus),
            [c(v_plus.x), c(v_plus.y)],
            [c(v_minus.x), c(v_minus.y)],
        )
        .expect("constant ambient")
    }

    pub fn vacuum() -> Self {
        Self::constant(0.0, 0.0, Vec2::ZERO, Vec2::ZERO)
    }

    /// `(t, x₁, x₂)` expansion point.
    pub fn center(&self) -> [f64; 3] {
        self.rho_plus.center()
    }

    pub fn radius(&self) -> f64 {
        self.rho_plus.radius()
    }

    pub fn contains(&self, t: f64, y: Vec2) -> bool {
        self.rho_plus.in_box([t, y.x, y.y])
    }

    // Sampled check on a 9³ lattice over the validity box.
    fn check_densities(&self) -> Result<(), CurveError> {
        let c = self.center();
        let r = self.radius();
        let k = 8;
        for i in 0..=k {
            for j in 0..=k {
                for l in 0..=k {
                    let at = |m: usize, c: f64| c - r + 2.0 * r * m as f64 / k as f64;
                    let p = [at(i, c[0]), at(j, c[1]), at(l, c[2])];
                    for rho in [&self.rho_plus, &self.rho_minus] {
                        let v = rho.eval(p);
                        if v < -1e-12 {
                            return Err(CurveError::NegativeAmbientDensity {
                                t: p[0],
                                x: Vec2::new(p[1], p[2]),
                                rho: v,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn sample(&self, t: f64, y: Vec2) -> Result<AmbientSample, CurveError> {
        let p = [t, y.x, y.y];
        self.rho_plus.check_in_box(p)?;
        Ok(AmbientSample {
            rho_plus: self.rho_plus.eval(p),
            rho_minus: self.rho_minus.eval(p),
            v_plus: Vec2::new(self.v_plus[0].eval(p), self.v_plus[1].eval(p)),
            v_minus: Vec2::new(self.v_minus[0].eval(p), self.v_minus[1].eval(p)),
        })
    }

    /// The ambient fields along a parametrized surface `(t, y₁, y₂)`,
    /// returned as `[ρ⁺, ρ⁻, v⁺₁, v⁺₂, v⁻₁, v⁻₂]`.
    pub fn compose(&self, inner: &[BiSeries; 3]) -> Result<[BiSeries; 6], CurveError> {
        let out = compose_all(
            &[
                &self.rho_plus,
                &self.rho_minus,
                &self.v_plus[0],
                &self.v_plus[1],
                &self.v_minus[0],
                &self.v_minus[1],
            ],
            inner,
        )?;
        Ok(out.try_into().expect("six outputs"))
    }

    pub fn rho_plus(&self) -> &TriSeries {
        &self.rho_plus
    }

    pub fn rho_minus(&self) -> &TriSeries {
        &self.rho_minus
    }

    pub fn v_plus(&self) -> &[TriSeries; 2] {
        &self.v_plus
    }

    pub fn v_minus(&self) -> &[TriSeries; 2] {
        &self.v_minus
    }
}

/// Curve unknowns at one node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeValues {
    pub y: Vec2,
    pub eta: f64,
    pub v: Vec2,
    pub p: Vec2,
}

/// Mass and momentum gained per unit `ξ` and the resulting acceleration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodeRates {
    pub eta_t: f64,
    pub momentum_t: Vec2,
    pub v_t: Vec2,
}

pub fn node_rates(p: Vec2, v: Vec2, eta: f64, a: &AmbientSample) -> NodeRates {
    let fp = p.cross(v - a.v_plus) * a.rho_plus;
    let fm = p.cross(v - a.v_minus) * a.rho_minus;
    NodeRates {
        eta_t: fp - fm,
        momentum_t: a.v_plus * fp - a.v_minus * fm,
        v_t: ((a.v_plus - v) * fp - (a.v_minus - v) * fm) * (1.0 / eta),
    }
}

/// The curve sampled on a ξ-grid at time `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveState {
    pub t: f64,
    pub xi: Vec<f64>,
    pub y: Vec<Vec2>,
    pub eta: Vec<f64>,
    pub v: Vec<Vec2>,
    pub p: Vec<Vec2>,
}

impl CurveState {
    pub fn new(
        t: f64,
        xi: Vec<f64>,
        y: Vec<Vec2>,
        eta: Vec<f64>,
        v: Vec<Vec2>,
        p: Vec<Vec2>,
    ) -> Result<Self, CurveError> {
        let s = Self { t, xi, y, eta, v, p };
        s.validate()?;
        Ok(s)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn node(&self, i: usize) -> NodeValues {
        NodeValues {
            y: self.y[i],
            eta: self.eta[i],
            v: self.v[i],
            p: self.p[i],
        }
    }

    pub fn validate(&self) -> Result<(), CurveError> {
        let n = self.xi.len();
        if [self.y.len(), self.eta.len(), self.v.len(), self.p.len()]
            .iter()
            .any(|&l| l != n)
        {
            return Err(CurveError::InvalidState("field lengths differ from the ξ-grid".into()));
        }
        if self.xi.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CurveError::InvalidState("ξ-grid is not strictly increasing".into()));
        }
        for i in 0..n {
            if !(self.eta[i] > 0.0) {
                return Err(CurveError::DegenerateDensity {
                    xi: self.xi[i],
                    eta: self.eta[i],
                });
            }
            if self.p[i].norm() <= 1e-12 {
                return Err(CurveError::DegenerateTangent { xi: self.xi[i] });
            }
        }
        Ok(())
    }

    pub fn spacing(&self) -> Result<f64, CurveError> {
        if self.len() < stencil::MIN_NODES {
            return Err(CurveError::InvalidState(format!(
                "{} nodes; the ξ-stencil needs at least {}",
                self.len(),
                stencil::MIN_NODES
            )));
        }
        stencil::uniform_spacing(&self.xi)
            .ok_or_else(|| CurveError::InvalidState("ξ-grid is not uniform".into()))
    }

    /// `max ‖p − D_ξ y‖` over the nodes.
    pub fn consistency_error(&self) -> Result<f64, CurveError> {
        let h = self.spacing()?;
        Ok(stencil::xi_derivative_vec2(h, &self.y)
            .iter()
            .zip(&self.p)
            .map(|(d, p)| (*d - *p).norm())
            .fold(0.0, f64::max))
    }

    /// Keeps nodes `range`.
    pub fn slice(&self, range: std::ops::Range<usize>) -> CurveState {
        CurveState {
            t: self.t,
            xi: self.xi[range.clone()].to_vec(),
            y: self.y[range.clone()].to_vec(),
            eta: self.eta[range.clone()].to_vec(),
            v: self.v[range.clone()].to_vec(),
            p: self.p[range].to_vec(),
        }
    }
}

/// Time derivatives of every unknown at every node.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRates {
    pub y_t: Vec<Vec2>,
    pub eta_t: Vec<f64>,
    pub v_t: Vec<Vec2>,
    pub p_t: Vec<Vec2>,
    /// `(ηv)_t`, the momentum gain per unit ξ.
    pub momentum_t: Vec<Vec2>,
}

pub fn curve_rhs(state: &CurveState, ambient: &AmbientState) -> Result<CurveRates, CurveError> {
    let h = state.spacing()?;
    let n = state.len();
    let mut eta_t = Vec::with_capacity(n);
    let mut v_t = Vec::with_capacity(n);
    let mut momentum_t = Vec::with_capacity(n);
    for i in 0..n {
        if !(state.eta[i] > 0.0) {
            return Err(CurveError::DegenerateDensity {
                xi: state.xi[i],
                eta: state.eta[i],
            });
        }
        let a = ambient.sample(state.t, state.y[i])?;
        let r = node_rates(state.p[i], state.v[i], state.eta[i], &a);
        eta_t.push(r.eta_t);
        v_t.push(r.v_t);
        momentum_t.push(r.momentum_t);
    }
    Ok(CurveRates {
        y_t: state.v.clone(),
        eta_t,
        v_t,
        p_t: stencil::xi_derivative_vec2(h, &state.v),
        momentum_t,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Admissibility {
    Strict,
    Weak,
    Violated,
}

pub const ADMISSIBILITY_TOL: f64 = 1e-12;

/// `⟨n, v⁺⟩ ≤ ⟨n, v⟩ ≤ ⟨n, v⁻⟩` at every node.
pub fn check_admissibility(
    state: &CurveState,
    ambient: &AmbientState,
    tol: f64,
) -> Result<Vec<Admissibility>, CurveError> {
    (0..state.len())
        .map(|i| {
            let p = state.p[i];
            if p.norm() <= 1e-12 {
                return Err(CurveError::DegenerateTangent { xi: state.xi[i] });
            }
            let n = p.perp().normalized();
            let a = ambient.sample(state.t, state.y[i])?;
            let lo = n.dot(state.v[i]) - n.dot(a.v_plus);
            let hi = n.dot(a.v_minus) - n.dot(state.v[i]);
            Ok(if lo < -tol || hi < -tol {
                Admissibility::Violated
            } else if lo > tol && hi > tol {
                Admissibility::Strict
            } else {
                Admissibility::Weak
            })
        })
        .collect()
}

/// `∫ η dξ` over `[xi1, xi2]`.
pub fn curve_mass(state: &CurveState, xi1: f64, xi2: f64) -> f64 {
    stencil::integrate(&state.xi, &state.eta, xi1, xi2)
}

/// `∫ η v dξ` over `[xi1, xi2]`.
pub fn curve_momentum(state: &CurveState, xi1: f64, xi2: f64) -> Vec2 {
    let mx: Vec<f64> = state.eta.iter().zip(&state.v).map(|(e, v)| e * v.x).collect();
    let my: Vec<f64> = state.eta.iter().zip(&state.v).map(|(e, v)| e * v.y).collect();
    Vec2::new(
        stencil::integrate(&state.xi, &mx, xi1, xi2),
        stencil::integrate(&state.xi, &my, xi1, xi2),
    )
}

/// Rates of change of mass and momentum on `[xi1, xi2]` from the
/// accretion fluxes.
pub fn mass_momentum_flux(
    state: &CurveState,
    ambient: &AmbientState,
    xi1: f64,
    xi2: f64,
) -> Result<(f64, Vec2), CurveError> {
    let mut eta_t = Vec::with_capacity(state.len());
    let mut mx = Vec::with_capacity(state.len());
    let mut my = Vec::with_capacity(state.len());
    for i in 0..state.len() {
        let a = ambient.sample(state.t, state.y[i])?;
        let r = node_rates(state.p[i], state.v[i], state.eta[i], &a);
        eta_t.push(r.eta_t);
        mx.push(r.momentum_t.x);
        my.push(r.momentum_t.y);
    }
    Ok((
        stencil::integrate(&state.xi, &eta_t, xi1, xi2),
        Vec2::new(
            stencil::integrate(&state.xi, &mx, xi1, xi2),
            stencil::integrate(&state.xi, &my, xi1, xi2),
        ),
    ))
}

/// Initial data `y₀(ξ), η₀(ξ), v₀(ξ)` as series in `ξ`; the tangent is
/// `y₀'`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveData {
    pub y: [UniSeries; 2],
    pub eta: UniSeries,
    pub v: [UniSeries; 2],
}

impl CurveData {
    pub fn new(y: [UniSeries; 2], eta: UniSeries, v: [UniSeries; 2]) -> Result<Self, CurveError> {
        for s in [&y[1], &eta, &v[0], &v[1]] {
            y[0].is_compatible(s)?;
        }
        Ok(Self { y, eta, v })
    }

    /// Polynomial data from coefficient lists in powers of `ξ − xi0`.
    pub fn from_coeffs(
        xi0: f64,
        degree: usize,
        y: [&[f64]; 2],
        eta: &[f64],
        v: [&[f64]; 2],
    ) -> Result<Self, CurveError> {
        let s = |c: &[f64]| -> Result<UniSeries, SeriesError> {
            let terms: Vec<([usize; 1], f64)> = c.iter().enumerate().map(|(k, &a)| ([k], a)).collect();
            UniSeries::from_terms([xi0], degree, &terms)
        };
        Self::new([s(y[0])?, s(y[1])?], s(eta)?, [s(v[0])?, s(v[1])?])
    }

    pub fn center(&self) -> f64 {
        self.eta.center()[0]
    }

    pub fn degree(&self) -> usize {
        self.eta.max_degree()
    }

    pub fn tangent(&self) -> [UniSeries; 2] {
        [self.y[0].derivative(0), self.y[1].derivative(0)]
    }

    pub fn eval(&self, xi: f64) -> Result<NodeValues, CurveError> {
        self.eta.check_in_box([xi])?;
        let e = |s: &UniSeries| s.eval([xi]);
        let [p1, p2] = self.tangent();
        Ok(NodeValues {
            y: Vec2::new(e(&self.y[0]), e(&self.y[1])),
            eta: e(&self.eta),
            v: Vec2::new(e(&self.v[0]), e(&self.v[1])),
            p: Vec2::new(e(&p1), e(&p2)),
        })
    }

    /// Re-expansion about `xi0`, truncated to `degree`.
    pub fn localize(&self, xi0: f64, degree: usize) -> Result<CurveData, CurveError> {
        self.eta.check_in_box([xi0])?;
        let l = |s: &UniSeries| s.recenter([xi0]).with_degree(degree);
        Ok(CurveData {
            y: [l(&self.y[0]), l(&self.y[1])],
            eta: l(&self.eta),
            v: [l(&self.v[0]), l(&self.v[1])],
        })
    }

    pub fn state_on(&self, xi: &[f64], t: f64) -> Result<CurveState, CurveError> {
        let vals: Vec<NodeValues> = xi.iter().map(|&x| self.eval(x)).collect::<Result<_, _>>()?;
        CurveState::new(
            t,
            xi.to_vec(),
            vals.iter().map(|v| v.y).collect(),
            vals.iter().map(|v| v.eta).collect(),
            vals.iter().map(|v| v.v).collect(),
            vals.iter().map(|v| v.p).collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slab_ambient() -> AmbientState {
        AmbientState::constant(1.0, 1.0, Vec2::new(0.0, -1.0), Vec2::new(0.0, 1.0))
    }

    fn straight(n: usize) -> CurveState {
        let data = CurveData::from_coeffs(0.0, 4, [&[0.0, 1.0], &[]], &[1.0], [&[], &[]]).unwrap();
        data.state_on(&stencil::uniform_nodes(-0.5, 0.5, n), 0.0).unwrap()
    }

    #[test]
    fn slab_rates() {
        let r = curve_rhs(&straight(11), &slab_ambient()).unwrap();
        for i in 0..11 {
            assert_eq!(r.eta_t[i], 2.0);
            assert_eq!(r.v_t[i], Vec2::ZERO);
            assert_eq!(r.momentum_t[i], Vec2::ZERO);
        }
    }

    #[test]
    fn vacuum_is_free_flight() {
        let mut s = straight(7);
        s.v = vec![Vec2::new(0.3, -0.1); 7];
        let r = curve_rhs(&s, &AmbientState::vacuum()).unwrap();
        assert!(r.eta_t.iter().all(|&e| e == 0.0));
        assert!(r.v_t.iter().all(|&v| v == Vec2::ZERO));
        assert_eq!(r.y_t, s.v);
    }

    #[test]
    fn one_sided_impingement() {
        let a = AmbientState::constant(1.0, 0.0, Vec2::new(0.0, -1.0), Vec2::ZERO);
        let r = curve_rhs(&straight(5), &a).unwrap();
        // p × (v − v⁺) ρ⁺ = (1,0) × (0,1) = 1
        assert_eq!(r.eta_t[0], 1.0);
    }

    #[test]
    fn admissibility_statuses() {
        let s = straight(5);
        let strict = check_admissibility(&s, &slab_ambient(), ADMISSIBILITY_TOL).unwrap();
        assert!(strict.iter().all(|&a| a == Admissibility::Strict));
        let swapped = AmbientState::constant(1.0, 1.0, Vec2::new(0.0, 1.0), Vec2::new(0.0, -1.0));
        let v = check_admissibility(&s, &swapped, ADMISSIBILITY_TOL).unwrap();
        assert!(v.iter().all(|&a| a == Admissibility::Violated));
        let w = check_admissibility(&s, &AmbientState::vacuum(), ADMISSIBILITY_TOL).unwrap();
        assert!(w.iter().all(|&a| a == Admissibility::Weak));
    }

    #[test]
    fn mass_and_momentum() {
        let data = CurveData::from_coeffs(0.0, 4, [&[0.0, 1.0], &[]], &[1.0], [&[2.0], &[]]).unwrap();
        let s = data.state_on(&stencil::uniform_nodes(0.0, 1.0, 9), 0.0).unwrap();
        assert!((curve_mass(&s, 0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((curve_momentum(&s, 0.0, 1.0) - Vec2::new(2.0, 0.0)).norm() < 1e-15);
        assert_eq!(curve_mass(&s, 0.7, 0.2), 0.0);
    }

    #[test]
    fn invalid_states() {
        let mut s = straight(5);
        s.eta[2] = 0.0;
        assert!(matches!(s.validate(), Err(CurveError::DegenerateDensity { .. })));
        assert!(matches!(
            curve_rhs(&s, &slab_ambient()),
            Err(CurveError::DegenerateDensity { .. })
        ));
        let mut s = straight(5);
        s.p[0] = Vec2::ZERO;
        assert!(matches!(s.validate(), Err(CurveError::DegenerateTangent { .. })));
    }

    #[test]
    fn negative_ambient_density_rejected() {
        let c = |k: f64| TriSeries::constant([0.0; 3], 2, k);
        let rho = TriSeries::from_terms([0.0; 3], 2, &[([0, 1, 0], 1.0)]).unwrap();
        let e = AmbientState::new(rho, c(1.0), [c(0.0), c(0.0)], [c(0.0), c(0.0)]);
        assert!(matches!(e, Err(CurveError::NegativeAmbientDensity { .. })));
    }
}
