//! Particle estimate of the accretion rate onto a curve, against the continuum flux.

use pgas::curve::{mass_momentum_flux, stencil};
use pgas::particles::{sample_accretion_scenario, AccretionConfig};
use pgas::scenario::curves;

fn main() {
    let amb = curves::slab_ambient();
    let state = curves::straight_curve().state_on(&stencil::uniform_nodes(-1.0, 1.0, 41), 0.0).unwrap();
    let (m, _) = mass_momentum_flux(&state, &amb, -0.5, 0.5).unwrap();
    println!("continuum rate per length: {m:.6}");
    for n in [1_000, 10_000, 100_000] {
        let cfg = AccretionConfig { n_particles: n, window: (-0.5, 0.5), duration: 0.2, seed: 1, batches: 16 };
        let e = sample_accretion_scenario(&state, &amb, &cfg).unwrap();
        println!("{n:>7} particles: {:.5} ± {:.5}  ({} absorbed)", e.mass_rate, e.mass_rate_err, e.absorbed);
    }
}
