//! Power-series evolution of a singular curve, and the residual decay with the step.

use pgas::curve::{build_jet, check_admissibility, curve_mass, evolve_ck, stencil, ADMISSIBILITY_TOL};
use pgas::scenario::curves;

fn main() {
    // symmetric slab: η grows by twice the incoming flux
    let xi = stencil::uniform_nodes(-0.5, 0.5, 21);
    let states = evolve_ck(&curves::straight_curve(), &xi, &curves::slab_ambient(), 0.0, 8, 0.1, 0.3).unwrap();
    for s in &states {
        println!("t = {:.1}  eta[mid] = {:.14}  |v|max = {:.1e}", s.t, s.eta[10], s.v.iter().map(|v| v.max_abs()).fold(0.0, f64::max));
    }

    let data = curves::perturbed_curve();
    let amb = curves::perturbed_ambient();
    for order in [4, 8] {
        let jet = build_jet(&data.localize(0.1, order).unwrap(), &amb, 0.0, order).unwrap();
        println!("order {order}:");
        let mut prev = None;
        for k in 0..6 {
            let dt = 0.2 / 2f64.powi(k);
            let r = jet.pde_residual(&amb, dt).unwrap();
            let slope = prev.map(|p: f64| (p / r).log2());
            println!("  dt {dt:.5}  residual {r:.3e}  slope {}", slope.map_or("-".into(), |s| format!("{s:.2}")));
            prev = Some(r);
        }
    }

    let xi = stencil::uniform_nodes(-0.5, 0.5, 81);
    let states = evolve_ck(&data, &xi, &amb, 0.0, 12, 0.01, 0.05).unwrap();
    let last = states.last().unwrap();
    let adm = check_admissibility(last, &amb, ADMISSIBILITY_TOL).unwrap();
    println!("perturbed slab at t = {:.2}: mass {:.10}, admissibility at mid {:?}", last.t, curve_mass(last, -0.5, 0.5), adm[40]);
}
