//! Two parabolas touching tangentially, the contact time map and the merged curve.

use pgas::curve::{build_jet, stencil, AmbientState};
use pgas::interaction::{
    assemble_merged_cauchy_problem, merge_boundary_data, solve_tangential_contact, ContactPoint, CurveEvolution,
};
use pgas::scenario::config::CurveSpec;
use pgas::scenario::curves;

fn jet(spec: CurveSpec, amb: &AmbientState) -> pgas::curve::CurveJet {
    let d = spec.build("curve").unwrap();
    build_jet(&d, amb, 0.0, 10).unwrap()
}

fn main() {
    let amb = AmbientState::vacuum();
    let lower = jet(curves::lower_parabola_spec(), &amb);
    let upper = jet(curves::upper_parabola_spec(), &amb);
    let at = ContactPoint { t0: 0.0, xi0: 0.0, s0: 0.0 };
    let xi = stencil::uniform_nodes(-0.2, 0.2, 9);
    let map = solve_tangential_contact(&lower, &upper, at, &xi).unwrap();
    let merged = merge_boundary_data(&lower, &upper, &map).unwrap();
    println!("{:>6} {:>14} {:>10} {:>10} {:>8} {:>8}", "xi", "t#", "t# - 2xi^2", "s#", "eta", "v2");
    for i in 0..map.len() {
        let x = map.xi[i];
        println!(
            "{x:6.2} {:14.10} {:10.1e} {:10.6} {:8.4} {:8.4}",
            map.t_sharp[i],
            map.t_sharp[i] - 2.0 * x * x,
            map.s_sharp[i],
            merged.eta[i],
            merged.v[i].y
        );
    }
    let m = assemble_merged_cauchy_problem(&lower, &upper, at, &amb, 10).unwrap();
    let n = m.jet.node(0.1, map.t_sharp[6] + 0.02);
    println!("merged curve shortly after contact at xi = 0.1: y = ({:.6}, {:.6}), v = ({:.3}, {:.3})", n.y.x, n.y.y, n.v.x, n.v.y);
    println!("consistency defect {:.1e}", m.jet.consistency_defect());
}
