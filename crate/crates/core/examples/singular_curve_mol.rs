//! Filtered method of lines against the power-series solver.

use pgas::curve::{evolve_ck, evolve_mol, stencil, FilterParams};
use pgas::scenario::curves;

fn main() {
    let data = curves::perturbed_curve();
    let amb = curves::perturbed_ambient();
    let xi = stencil::uniform_nodes(-0.5, 0.5, 81);
    let ck = evolve_ck(&data, &xi, &amb, 0.0, 12, 0.01, 0.05).unwrap();
    let mol = evolve_mol(&data.state_on(&xi, 0.0).unwrap(), &amb, 0.001, 0.05, &FilterParams::default()).unwrap();

    for a in &ck {
        let b = mol.iter().min_by(|p, q| (p.t - a.t).abs().total_cmp(&(q.t - a.t).abs())).unwrap();
        let mut sup: f64 = 0.0;
        for i in 0..a.len() {
            sup = sup
                .max((a.y[i] - b.y[i]).max_abs())
                .max((a.eta[i] - b.eta[i]).abs())
                .max((a.v[i] - b.v[i]).max_abs())
                .max((a.p[i] - b.p[i]).max_abs());
        }
        println!("t = {:.3}  sup |ck - mol| = {sup:.3e}", a.t);
    }
}
