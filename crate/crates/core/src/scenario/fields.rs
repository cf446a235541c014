//! Analytic initial velocity fields used by the built-in scenarios.

use super::config::{FieldSpec, SeriesLit};
use crate::series::AnalyticField;

/// `w = (−x₁ + x₁³/3 + x₁x₂², 0)`, blowing up first at the origin at `t = 1`
/// with `τ(x) = 1/(1 − |x|²)`.
pub fn cubic_spec() -> FieldSpec {
    FieldSpec {
        w1: SeriesLit::terms(&[(&[1, 0], -1.0), (&[3, 0], 1.0 / 3.0), (&[1, 2], 1.0)]),
        w2: SeriesLit::Constant(0.0),
        rho: None,
    }
}

/// A cubic field with coupled components and nonuniform density.
pub fn generic_cubic_spec() -> FieldSpec {
    FieldSpec {
        w1: SeriesLit::terms(&[(&[1, 0], -1.0), (&[0, 1], 0.3), (&[3, 0], 1.0 / 3.0), (&[1, 2], 1.0)]),
        w2: SeriesLit::terms(&[(&[1, 0], 0.2), (&[0, 1], -0.5), (&[2, 1], 0.1)]),
        rho: Some(SeriesLit::terms(&[(&[0, 0], 1.0), (&[1, 0], 0.2), (&[0, 2], -0.1)])),
    }
}

/// `w = −x`.
pub fn radial_collapse_spec() -> FieldSpec {
    FieldSpec {
        w1: SeriesLit::terms(&[(&[1, 0], -1.0)]),
        w2: SeriesLit::terms(&[(&[0, 1], -1.0)]),
        rho: None,
    }
}

/// `w = (−x₁, 0)`.
pub fn uniform_compression_spec() -> FieldSpec {
    FieldSpec {
        w1: SeriesLit::terms(&[(&[1, 0], -1.0)]),
        w2: SeriesLit::Constant(0.0),
        rho: None,
    }
}

fn build(spec: FieldSpec) -> AnalyticField {
    spec.build("field").expect("built-in field")
}

pub fn cubic() -> AnalyticField {
    build(cubic_spec())
}

pub fn generic_cubic() -> AnalyticField {
    build(generic_cubic_spec())
}

pub fn radial_collapse() -> AnalyticField {
    build(radial_collapse_spec())
}

pub fn uniform_compression() -> AnalyticField {
    build(uniform_compression_spec())
}
