//! Blow-up classification: one generic field, two degenerate ones.

use pgas::scenario::fields;
use pgas::singularity::{find_critical_points, CriticalSearch};
use pgas::{AnalyticField, Vec2};

fn report(name: &str, field: &AnalyticField) {
    let search = CriticalSearch::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5), 2.0, 21);
    let r = find_critical_points(field, &search).unwrap();
    println!("{name}: generic = {}  ({} points, {} degenerate roots, flooded: {})", r.is_generic(), r.points.len(), r.degenerate_roots, r.flooded);
    for p in r.points.iter().take(3) {
        println!(
            "  tau {:.9}  x ({:+.2e}, {:+.2e})  hessian eig ({:.6}, {:.6})  flags {:?}",
            p.tau, p.x.x, p.x.y, p.hessian_eigenvalues.0, p.hessian_eigenvalues.1, p.flags
        );
    }
}

fn main() {
    report("cubic", &fields::cubic());
    report("coupled cubic", &fields::generic_cubic());
    report("w = -x", &fields::radial_collapse());
    report("w = (-x1, 0)", &fields::uniform_compression());
}
