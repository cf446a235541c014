//! Sticky particles: three bodies merge in sequence, conserving mass and momentum.

use pgas::particles::{simulate_sticky, Particle, ParticleSystem};
use pgas::Vec2;

fn main() {
    let p = |m, x: [f64; 2], v: [f64; 2]| Particle { mass: m, x: Vec2::new(x[0], x[1]), v: Vec2::new(v[0], v[1]) };
    let ps = ParticleSystem::new(
        vec![p(1.0, [0.0, 0.0], [1.0, 0.1]), p(2.0, [1.0, 0.1], [0.0, 0.0]), p(0.5, [3.0, 0.0], [-5.0 / 6.0, 1.0 / 15.0])],
        1e-9,
    );
    let run = simulate_sticky(&ps, f64::INFINITY).unwrap();
    for e in &run.events {
        println!("t = {:.6}  {} + {} -> mass {}  v = ({:.6}, {:.6})", e.t, e.i, e.j, e.mass, e.v.x, e.v.y);
    }
    let (m0, m1) = (ps.total_mass(), run.state.total_mass());
    let (q0, q1) = (ps.total_momentum(), run.state.total_momentum());
    println!("mass {m0} -> {m1}, momentum drift {:.1e}", (q1 - q0).max_abs());
}
