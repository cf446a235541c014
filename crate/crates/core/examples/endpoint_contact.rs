//! Two rays meeting at a common endpoint: the merge point speed and the contact map.

use pgas::curve::{build_jet, stencil, AmbientState};
use pgas::interaction::{solve_endpoint_contact, ContactPoint};
use pgas::scenario::curves;

fn main() {
    let amb = AmbientState::vacuum();
    let make = |slope, vy| {
        let d = curves::line_spec(slope, vy).build("curve").unwrap();
        build_jet(&d, &amb, 0.0, 8).unwrap()
    };
    let (left, right) = (make(-1.0, 1.0), make(1.0, -1.0));
    let xi = stencil::uniform_nodes(0.0, 0.2, 5);
    let ep = solve_endpoint_contact(&left, &right, ContactPoint { t0: 0.0, xi0: 0.0, s0: 0.0 }, &xi).unwrap();
    println!("merge point velocity Q' = ({}, {})", ep.q_dot.x, ep.q_dot.y);
    println!("dt#/dxi = {}, ds#/dxi = {}", ep.dt_dxi, ep.ds_dxi);
    for i in 0..ep.map.len() {
        println!("  xi {:.2}  t# {:.12}  s# {:.12}", ep.map.xi[i], ep.map.t_sharp[i], ep.map.s_sharp[i]);
    }
}
