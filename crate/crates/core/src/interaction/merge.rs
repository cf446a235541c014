use serde::Serialize;

use super::{ContactMap, ContactPoint, CurveEvolution, InteractionError};
use crate::curve::{BoundaryData, CurveJet};
use crate::series::{UniSeries, Vec2};

const SERIES_NEWTON_MAX_ITER: usize = 40;

/// Nodal data of the merged curve on the contact front `t = t♯(ξ)`.
#[derive(Debug, Clone, Serialize)]
pub struct MergedBoundaryData {
    pub xi: Vec<f64>,
    pub t_sharp: Vec<f64>,
    /// `t♯'(ξ)`, the coupling coefficient of the merged system.
    pub c: Vec<f64>,
    pub s_sharp: Vec<f64>,
    pub ds_dxi: Vec<f64>,
    pub y: Vec<Vec2>,
    pub eta: Vec<f64>,
    pub v: Vec<Vec2>,
    /// `∂_ξ y` of the merged curve: `d/dξ γ₁(t♯(ξ), ξ) − v t♯'`.
    pub tangent: Vec<Vec2>,
}

/// Density, momentum and tangent of the merged curve at every node of the
/// contact map.
pub fn merge_boundary_data<C1, C2>(
    c1: &C1,
    c2: &C2,
    map: &ContactMap,
) -> Result<MergedBoundaryData, InteractionError>
where
    C1: CurveEvolution + ?Sized,
    C2: CurveEvolution + ?Sized,
{
    let n = map.len();
    let mut out = MergedBoundaryData {
        xi: map.xi.clone(),
        t_sharp: map.t_sharp.clone(),
        c: map.dt_dxi.clone(),
        s_sharp: map.s_sharp.clone(),
        ds_dxi: map.ds_dxi.clone(),
        y: Vec::with_capacity(n),
        eta: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        tangent: Vec::with_capacity(n),
    };
    for i in 0..n {
        let (xi, t, s, dt, ds) = (map.xi[i], map.t_sharp[i], map.s_sharp[i], map.dt_dxi[i], map.ds_dxi[i]);
        if !(ds > 0.0) {
            return Err(InteractionError::UnphysicalMerge { xi, ds_dxi: ds });
        }
        let a = c1.node(xi, t);
        let b = c2.node(s, t);
        let eta = a.eta + b.eta * ds;
        let v = (a.v * a.eta + b.v * (b.eta * ds)) * (1.0 / eta);
        out.y.push(a.y);
        out.eta.push(eta);
        out.v.push(v);
        out.tangent.push(a.v * dt + a.p - v * dt);
    }
    Ok(out)
}

fn cramer(c1: [&UniSeries; 2], c2: [&UniSeries; 2], r: [&UniSeries; 2]) -> Result<(UniSeries, UniSeries), InteractionError> {
    let cross = |a: [&UniSeries; 2], b: [&UniSeries; 2]| a[0] * b[1] - a[1] * b[0];
    let inv = cross(c1, c2)
        .reciprocal()
        .map_err(|_| InteractionError::DegenerateGeometry)?;
    Ok((&cross(r, c2) * &inv, &cross(c1, r) * &inv))
}

/// Merged boundary data as series in `ξ` about the contact node `at`.
///
/// `t♯` and `s♯` are found as series by Newton's method on
/// `γ₁(ξ, t♯(ξ)) = γ₂(s♯(ξ), t♯(ξ))`, each iteration doubling the number
/// of correct coefficients.
pub fn merged_boundary_series(
    j1: &CurveJet,
    j2: &CurveJet,
    at: ContactPoint,
    order: usize,
) -> Result<BoundaryData, InteractionError> {
    let radius = j1.t_sharp().radius();
    let c = [at.xi0];
    let xi = UniSeries::variable(c, order, 0).with_radius(radius);
    let mut t = UniSeries::constant(c, order, at.t0).with_radius(radius);
    let mut s = UniSeries::constant(c, order, at.s0).with_radius(radius);
    let scale = 1.0 + at.t0.abs().max(at.s0.abs());
    let mut converged = false;
    for _ in 0..SERIES_NEWTON_MAX_ITER {
        let a = j1.along(&xi, &t)?;
        let b = j2.along(&s, &t)?;
        let r = [&b[0] - &a[0], &b[1] - &a[1]];
        let dv = [&a[3] - &b[3], &a[4] - &b[4]];
        let mp = [-&b[5], -&b[6]];
        let (dt, ds) = cramer([&dv[0], &dv[1]], [&mp[0], &mp[1]], [&r[0], &r[1]])?;
        t += &dt;
        s += &ds;
        if dt.max_abs_coeff().max(ds.max_abs_coeff()) <= 1e-15 * scale {
            converged = true;
            break;
        }
    }
    let a = j1.along(&xi, &t)?;
    let b = j2.along(&s, &t)?;
    if !converged {
        let gap = (&a[0] - &b[0]).max_abs_coeff().max((&a[1] - &b[1]).max_abs_coeff());
        if gap > 1e-12 * scale {
            return Err(InteractionError::NewtonFailed { xi: at.xi0, residual: gap });
        }
    }
    let ds = s.derivative(0);
    let dt = t.derivative(0);
    if !(ds.constant_term() > 0.0) {
        return Err(InteractionError::UnphysicalMerge {
            xi: at.xi0,
            ds_dxi: ds.constant_term(),
        });
    }
    let eta2 = &b[2] * &ds;
    let eta = &a[2] + &eta2;
    let inv = eta.reciprocal().map_err(crate::curve::CurveError::from)?;
    let v: [UniSeries; 2] = std::array::from_fn(|k| &(&(&a[2] * &a[3 + k]) + &(&eta2 * &b[3 + k])) * &inv);
    let p: [UniSeries; 2] = std::array::from_fn(|k| &a[k].derivative(0) - &(&v[k] * &dt));
    Ok(BoundaryData {
        y: [a[0].clone(), a[1].clone()],
        eta,
        v,
        p,
        t_sharp: t,
    })
}
