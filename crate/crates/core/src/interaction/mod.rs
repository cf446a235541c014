//! Two singular curves meeting: the contact-time map, the merged curve's
//! data on the contact front, and the Cauchy problem that continues it.
//!
//! Curve 1 is parametrized by `ξ`, curve 2 by `s`. A contact map assigns
//! to each particle `ξ` of curve 1 the time `t♯(ξ)` it hits curve 2 and
//! the particle `s♯(ξ)` it hits.

mod cauchy;
mod contact;
mod merge;

pub use cauchy::{assemble_merged_cauchy_problem, MergedCauchy, MergedSystem};
pub use contact::{solve_endpoint_contact, solve_tangential_contact, EndpointContact};
pub use merge::{merge_boundary_data, merged_boundary_series, MergedBoundaryData};

use serde::Serialize;
use thiserror::Error;

use crate::curve::{CurveError, CurveJet, NodeValues};
use crate::series::Vec2;

#[derive(Debug, Error)]
pub enum InteractionError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("curves do not touch at the contact point: gap {gap:e}")]
    Separated { gap: f64 },
    #[error("curves are not tangent at the contact point: sine of angle {sine:e}")]
    NotTangent { sine: f64 },
    #[error("parametrizations have opposite orientation at the contact point")]
    WrongOrientation,
    #[error("no contact: relative normal velocity {normal_speed:e} does not close the gap")]
    NoContact { normal_speed: f64 },
    #[error("curvature ordering violated: κ₁ = {k1}, κ₂ = {k2}")]
    CurvatureOrder { k1: f64, k2: f64 },
    #[error("tangents are parallel at the endpoint")]
    DegenerateGeometry,
    #[error("endpoint configuration does not merge: ⟨n̄₁, v₁ − v₂⟩ = {n1:e}, ⟨n̄₂, v₁ − v₂⟩ = {n2:e}")]
    NonMerging { n1: f64, n2: f64 },
    #[error("merge would reverse particle order: ds♯/dξ = {ds_dxi:e} at ξ = {xi}")]
    UnphysicalMerge { xi: f64, ds_dxi: f64 },
    #[error("contact Newton failed at ξ = {xi}: residual {residual:e}")]
    NewtonFailed { xi: f64, residual: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// A curve known as a function of particle label and time.
pub trait CurveEvolution {
    /// Position, density, velocity and tangent `∂_ξ y` at `(ξ, t)`.
    fn node(&self, xi: f64, t: f64) -> NodeValues;
    /// `∂_ξ² y` at `(ξ, t)`.
    fn second_tangent(&self, xi: f64, t: f64) -> Vec2;
}

impl CurveEvolution for CurveJet {
    fn node(&self, xi: f64, t: f64) -> NodeValues {
        self.eval(xi, t)
    }

    fn second_tangent(&self, xi: f64, t: f64) -> Vec2 {
        // ∂_ξ = ∂_{x₁} − t♯' ∂_{x₂}
        let f = self.full();
        let at = [xi, t - self.t_sharp().eval([xi])];
        let c = self.t_sharp().derivative(0).eval([xi]);
        let d = |i: usize| f[i].derivative(0).eval(at) - c * f[i].derivative(1).eval(at);
        Vec2::new(d(5), d(6))
    }
}

/// Particles `ξ₀` of curve 1 and `s₀` of curve 2 coincide at `t0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContactPoint {
    pub t0: f64,
    pub xi0: f64,
    pub s0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ContactCase {
    Tangential,
    Endpoint,
}

/// Contact times and partners on a ξ-grid, with their ξ-derivatives.
#[derive(Debug, Clone, Serialize)]
pub struct ContactMap {
    pub case: ContactCase,
    pub contact: ContactPoint,
    pub xi: Vec<f64>,
    pub t_sharp: Vec<f64>,
    pub s_sharp: Vec<f64>,
    pub dt_dxi: Vec<f64>,
    pub ds_dxi: Vec<f64>,
    /// Largest Newton residual over the solved nodes.
    pub residual: f64,
    /// Some requested nodes could not be solved; the map covers the
    /// contiguous range around the contact point that could.
    pub truncated: bool,
}

impl ContactMap {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// `(ξ, t♯, s♯)` of node `i`.
    pub fn node(&self, i: usize) -> ContactPoint {
        ContactPoint {
            t0: self.t_sharp[i],
            xi0: self.xi[i],
            s0: self.s_sharp[i],
        }
    }

    /// Index of the node nearest the initial contact.
    pub fn nearest_contact(&self) -> usize {
        let d = |i: usize| (self.xi[i] - self.contact.xi0).abs();
        (0..self.len()).min_by(|&a, &b| d(a).total_cmp(&d(b))).unwrap_or(0)
    }
}
