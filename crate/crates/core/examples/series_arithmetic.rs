//! Truncated power series: products, reciprocals, composition.

use pgas::{BiSeries, UniSeries};

fn main() {
    // 1/(1 − x) to degree 8
    let x = UniSeries::variable([0.0], 8, 0);
    let inv = x.scale(-1.0).add_scalar(1.0).reciprocal().unwrap();
    println!("1/(1-x) coefficients: {:?}", inv.coeffs());
    println!("at 0.5: {:.10} (exact 2, truncated)", inv.eval([0.5]));

    // (1 + a + b)² in two variables
    let a = BiSeries::variable([0.0, 0.0], 4, 0);
    let b = BiSeries::variable([0.0, 0.0], 4, 1);
    let s = (&a + &b).add_scalar(1.0);
    let sq = &s * &s;
    for (e, c) in sq.terms() {
        println!("  {c:+} a^{} b^{}", e[0], e[1]);
    }

    // exp composed with sin, through compose
    let mut exp = UniSeries::zeros([0.0], 10);
    let mut sin = UniSeries::zeros([0.0], 10);
    let mut f = 1.0;
    for k in 0..=10 {
        if k > 0 {
            f *= k as f64;
        }
        exp.set_coeff([k], 1.0 / f);
        if k % 2 == 1 {
            sin.set_coeff([k], if k % 4 == 1 { 1.0 } else { -1.0 } / f);
        }
    }
    let e_sin = exp.compose(&[sin]).unwrap();
    let t: f64 = 0.3;
    println!("exp(sin(0.3)) = {:.12}, series {:.12}", t.sin().exp(), e_sin.eval([t]));
    println!("derivative at 0.3 = {:.12}, series {:.12}", t.cos() * t.sin().exp(), e_sin.derivative(0).eval([t]));
}
