//! Smooth flow by characteristics: the Eulerian state and the density along a path.

use pgas::scenario::fields;
use pgas::smooth_flow::{density_along_characteristic, eulerian_state, lagrangian_position};
use pgas::Vec2;

fn main() {
    let field = fields::cubic();
    let x = Vec2::new(0.2, -0.1);
    println!("starting point x = ({}, {}), w(x) = {:?}", x.x, x.y, field.eval(x).unwrap());
    println!("{:>5} {:>12} {:>12} {:>12} {:>12} {:>6}", "t", "y1", "y2", "rho", "|v - w(x)|", "iters");
    for k in 0..=9 {
        let t = 0.1 * k as f64;
        let y = lagrangian_position(&field, x, t).unwrap();
        let s = eulerian_state(&field, t, y).unwrap();
        let rho = density_along_characteristic(&field, x, t).unwrap();
        let dv = (s.v - field.eval(x).unwrap()).max_abs();
        println!("{t:5.2} {:12.8} {:12.8} {rho:12.6} {dv:12.2e} {:6}", y.x, y.y, s.iterations);
        assert!((s.rho - rho).abs() < 1e-9 * rho);
    }
}
