use pgas::particles::{simulate_sticky, Particle, ParticleSystem};
use pgas::Vec2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(m: f64, x: [f64; 2], v: [f64; 2]) -> Particle {
    Particle { mass: m, x: x.into(), v: v.into() }
}

#[test]
fn chain_collision_by_hand() {
    let sys = ParticleSystem::new(
        vec![p(1.0, [0.0, 0.0], [1.0, 0.1]), p(2.0, [1.0, 0.1], [0.0, 0.0]), p(0.5, [3.0, 0.0], [-5.0 / 6.0, 1.0 / 15.0])],
        1e-9,
    );
    let run = simulate_sticky(&sys, f64::INFINITY).unwrap();
    assert_eq!(run.events.len(), 2);
    // first pair meets at t = 1 at (1, 0.1) with v = (1/3, 1/30)
    let e = &run.events[0];
    assert!((e.t - 1.0).abs() < 1e-9);
    assert!((e.v - Vec2::new(1.0 / 3.0, 1.0 / 30.0)).max_abs() < 1e-14);
    // compound at (4/3, 2/15) when t = 2; third particle there too
    let e = &run.events[1];
    assert!((e.t - 2.0).abs() < 1e-8, "{}", e.t);
    assert!((e.x - Vec2::new(4.0 / 3.0, 2.0 / 15.0)).max_abs() < 1e-8);
    let v = (Vec2::new(1.0, 0.1) + Vec2::new(-5.0 / 12.0, 1.0 / 30.0)) * (1.0 / 3.5);
    assert!((e.v - v).max_abs() < 1e-14);
    assert_eq!(run.survivors.len(), 1);
}

#[test]
fn identical_inputs_give_identical_histories() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut ps: Vec<Particle> = Vec::new();
    while ps.len() < 40 {
        let x = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
        if ps.iter().all(|q| (q.x - Vec2::from(x)).norm() > 0.05) {
            ps.push(p(rng.gen_range(0.5..1.5), x, [-0.3 * x[0], -0.3 * x[1] + rng.gen_range(-0.1..0.1)]));
        }
    }
    let sys = ParticleSystem::new(ps, 0.01);
    let a = simulate_sticky(&sys, 20.0).unwrap();
    let b = simulate_sticky(&sys, 20.0).unwrap();
    assert!(!a.events.is_empty());
    assert_eq!(a.events, b.events);
    assert_eq!(a.state, b.state);
}

#[test]
fn receding_particles_never_merge() {
    let sys = ParticleSystem::new(vec![p(1.0, [-1.0, 0.0], [-1.0, 0.0]), p(1.0, [1.0, 0.0], [1.0, 0.0])], 0.1);
    let run = simulate_sticky(&sys, f64::INFINITY).unwrap();
    assert!(run.events.is_empty());
}
