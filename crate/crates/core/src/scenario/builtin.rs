//! Named scenarios that run without a hand-written config.

use super::config::*;
use super::curves::*;
use super::fields::*;
use crate::curve::FilterParams;
use crate::particles::{Particle, ParticleSystem};

pub struct Builtin {
    pub name: &'static str,
    pub kind: Kind,
    pub about: &'static str,
}

pub const BUILTINS: &[Builtin] = &[
    Builtin { name: "cubic-smooth", kind: Kind::Smooth, about: "Eulerian state of the cubic field before blow-up" },
    Builtin { name: "cubic-blowup", kind: Kind::Blowup, about: "first blow-up of the cubic field, τ* = 1 at the origin" },
    Builtin { name: "cubic-genericity", kind: Kind::Genericity, about: "critical points of φ for the cubic field" },
    Builtin { name: "generic-cubic", kind: Kind::Genericity, about: "coupled cubic field with nonuniform density" },
    Builtin { name: "radial-collapse", kind: Kind::Genericity, about: "w = −x: a continuum of blow-up points" },
    Builtin { name: "uniform-compression", kind: Kind::Genericity, about: "w = (−x₁, 0): degenerate Hessian" },
    Builtin { name: "symmetric-slab", kind: Kind::Curve, about: "straight curve fed equally from both sides, η = 1 + 2t" },
    Builtin { name: "perturbed-slab", kind: Kind::Curve, about: "bent curve in a varying ambient, power series" },
    Builtin { name: "perturbed-slab-mol", kind: Kind::Curve, about: "the same, filtered method of lines" },
    Builtin { name: "parabola-contact", kind: Kind::InteractTangent, about: "rising parabola touching a resting one" },
    Builtin { name: "crossed-lines", kind: Kind::InteractEndpoint, about: "two rays meeting at a common endpoint" },
    Builtin { name: "head-on", kind: Kind::Particles, about: "two equal particles colliding head-on" },
    Builtin { name: "chain-collision", kind: Kind::Particles, about: "three particles merging in sequence" },
    Builtin { name: "slab-accretion", kind: Kind::Accretion, about: "particle estimate of the slab accretion rate" },
];

fn curve_params(curve: CurveSpec, ambient: AmbientSpec, solver: Solver, order: usize, dt: f64, t_end: f64, n: usize) -> CurveParams {
    CurveParams {
        curve,
        ambient,
        nodes: Nodes { a: -0.5, b: 0.5, n },
        solver,
        t0: 0.0,
        t_end,
        dt,
        order,
        filter: FilterParams::default(),
    }
}

fn genericity(field: FieldSpec) -> GenericityParams {
    GenericityParams {
        field,
        lo: [-0.5, -0.5],
        hi: [0.5, 0.5],
        t_max: 2.0,
        grid: 21,
        max_roots: 64,
    }
}

fn particle(mass: f64, x: [f64; 2], v: [f64; 2]) -> Particle {
    Particle {
        mass,
        x: x.into(),
        v: v.into(),
    }
}

fn make<T: serde::Serialize>(b: &Builtin, params: &T) -> ScenarioConfig {
    ScenarioConfig::new(b.name, b.kind, 0, params)
}

/// The config of a built-in scenario.
pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let b = BUILTINS.iter().find(|b| b.name == name)?;
    Some(match name {
        "cubic-smooth" => make(b, &SmoothParams {
            field: cubic_spec(),
            points: vec![
                [0.0, 0.1, 0.2],
                [0.3, 0.2, -0.1],
                [0.5, -0.3, 0.25],
                [0.8, 0.05, 0.4],
                [0.9, 0.0, 0.0],
            ],
        }),
        "cubic-blowup" => make(b, &BlowupParams {
            field: cubic_spec(),
            lo: [-0.5, -0.5],
            hi: [0.5, 0.5],
            n: 200,
            t_max: 2.0,
            polish_top: 10,
            write_cells: false,
        }),
        "cubic-genericity" => make(b, &genericity(cubic_spec())),
        "generic-cubic" => make(b, &genericity(generic_cubic_spec())),
        "radial-collapse" => make(b, &genericity(radial_collapse_spec())),
        "uniform-compression" => make(b, &genericity(uniform_compression_spec())),
        "symmetric-slab" => make(b, &curve_params(straight_curve_spec(), slab_ambient_spec(), Solver::Ck, 8, 0.1, 0.3, 21)),
        "perturbed-slab" => make(b, &curve_params(
            perturbed_curve_spec(),
            perturbed_ambient_spec(),
            Solver::Ck,
            12,
            0.01,
            0.05,
            81,
        )),
        "perturbed-slab-mol" => make(b, &curve_params(
            perturbed_curve_spec(),
            perturbed_ambient_spec(),
            Solver::Mol,
            8,
            0.001,
            0.05,
            81,
        )),
        "parabola-contact" => make(b, &InteractParams {
            curve1: lower_parabola_spec(),
            curve2: upper_parabola_spec(),
            ambient: AmbientSpec::constant(0.0, 0.0, [0.0, 0.0], [0.0, 0.0]),
            t0: 0.0,
            xi0: 0.0,
            s0: 0.0,
            xi: Nodes { a: -0.2, b: 0.2, n: 41 },
            order: 10,
            chart_span: 0.05,
            chart_samples: 11,
        }),
        "crossed-lines" => make(b, &InteractParams {
            curve1: line_spec(-1.0, 1.0),
            curve2: line_spec(1.0, -1.0),
            ambient: AmbientSpec::constant(0.0, 0.0, [0.0, 0.0], [0.0, 0.0]),
            t0: 0.0,
            xi0: 0.0,
            s0: 0.0,
            xi: Nodes { a: 0.0, b: 0.2, n: 21 },
            order: 10,
            chart_span: 0.05,
            chart_samples: 11,
        }),
        "head-on" => make(b, &ParticleParams {
            system: ParticleSystem::new(vec![particle(1.0, [-1.0, 0.0], [1.0, 0.0]), particle(1.0, [1.0, 0.0], [-1.0, 0.0])], 0.0),
            t_end: Some(2.0),
        }),
        "chain-collision" => make(b, &ParticleParams {
            system: ParticleSystem::new(
                vec![
                    particle(1.0, [0.0, 0.0], [1.0, 0.1]),
                    particle(2.0, [1.0, 0.1], [0.0, 0.0]),
                    // meets the compound of the first two at t = 2
                    particle(0.5, [3.0, 0.0], [-5.0 / 6.0, 1.0 / 15.0]),
                ],
                1e-9,
            ),
            t_end: None,
        }),
        "slab-accretion" => make(b, &AccretionParams {
            curve: straight_curve_spec(),
            ambient: slab_ambient_spec(),
            nodes: Nodes { a: -1.0, b: 1.0, n: 41 },
            t0: 0.0,
            n_particles: 10_000,
            window: [-0.5, 0.5],
            duration: 0.2,
            batches: 16,
        }),
        _ => return None,
    })
}
