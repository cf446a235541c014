//! Curve and ambient data used by the built-in scenarios.

use super::config::{AmbientSpec, CurveSpec, SeriesLit};
use crate::curve::{AmbientState, CurveData};
use crate::series::DEFAULT_MAX_DEGREE;

fn curve(y: [&[f64]; 2], eta: &[f64], v: [&[f64]; 2]) -> CurveSpec {
    CurveSpec {
        xi0: 0.0,
        degree: DEFAULT_MAX_DEGREE,
        y: [y[0].to_vec(), y[1].to_vec()],
        eta: eta.to_vec(),
        v: [v[0].to_vec(), v[1].to_vec()],
    }
}

/// Straight curve `y = (ξ, 0)` at rest with unit density.
pub fn straight_curve_spec() -> CurveSpec {
    curve([&[0.0, 1.0], &[]], &[1.0], [&[], &[]])
}

/// Unit-density streams hitting the curve head-on from both sides.
pub fn slab_ambient_spec() -> AmbientSpec {
    AmbientSpec::constant(1.0, 1.0, [0.0, -1.0], [0.0, 1.0])
}

/// A bent, moving curve with nonuniform density.
pub fn perturbed_curve_spec() -> CurveSpec {
    curve(
        [&[0.0, 1.0], &[0.0, 0.0, 0.05]],
        &[1.0, 0.1],
        [&[0.0, 0.05], &[0.02, 0.0, -0.03]],
    )
}

/// Slab streams with analytic variation in space and time.
pub fn perturbed_ambient_spec() -> AmbientSpec {
    let t = SeriesLit::terms;
    AmbientSpec {
        rho_plus: t(&[(&[0, 0, 0], 1.0), (&[0, 1, 0], 0.1), (&[1, 0, 0], 0.05)]),
        rho_minus: t(&[(&[0, 0, 0], 0.8), (&[0, 0, 1], -0.1), (&[0, 2, 0], 0.05)]),
        v_plus: [t(&[(&[0, 0, 1], 0.1)]), t(&[(&[0, 0, 0], -1.0), (&[0, 1, 0], 0.1)])],
        v_minus: [t(&[(&[0, 0, 0], 0.05)]), t(&[(&[0, 0, 0], 1.0), (&[0, 1, 1], -0.1)])],
    }
}

/// `(ξ, −ξ²)` moving up with unit speed.
pub fn lower_parabola_spec() -> CurveSpec {
    curve([&[0.0, 1.0], &[0.0, 0.0, -1.0]], &[1.0], [&[0.0], &[1.0]])
}

/// `(s, s²)` at rest.
pub fn upper_parabola_spec() -> CurveSpec {
    curve([&[0.0, 1.0], &[0.0, 0.0, 1.0]], &[1.0], [&[], &[]])
}

/// Ray of slope `slope` from the origin, moving vertically.
pub fn line_spec(slope: f64, vy: f64) -> CurveSpec {
    curve([&[0.0, 1.0], &[0.0, slope]], &[1.0], [&[0.0], &[vy]])
}

pub fn straight_curve() -> CurveData {
    straight_curve_spec().build("curve").expect("built-in curve")
}

pub fn slab_ambient() -> AmbientState {
    slab_ambient_spec().build("ambient").expect("built-in ambient")
}

pub fn perturbed_curve() -> CurveData {
    perturbed_curve_spec().build("curve").expect("built-in curve")
}

pub fn perturbed_ambient() -> AmbientState {
    perturbed_ambient_spec().build("ambient").expect("built-in ambient")
}
