use pgas::curve::{
    build_jet, curve_mass, evolve_ck, evolve_mol, mass_momentum_flux, node_rates, stencil::uniform_nodes,
    AmbientState, CurveData, CurveState, FilterParams,
};
use pgas::scenario::curves;
use pgas::{TriSeries, UniSeries, Vec2};

// ∫ (mass rate) dt by Simpson's rule over equally spaced states
fn simpson(states: &[CurveState], f: impl Fn(&CurveState) -> f64) -> f64 {
    assert!(states.len() % 2 == 1);
    let h = states[1].t - states[0].t;
    let n = states.len() - 1;
    let mut s = f(&states[0]) + f(&states[n]);
    for (k, st) in states.iter().enumerate().take(n).skip(1) {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * f(st);
    }
    s * h / 3.0
}

#[test]
fn mass_changes_only_by_accretion() {
    let data = curves::perturbed_curve();
    let amb = curves::perturbed_ambient();
    let xi = uniform_nodes(-0.5, 0.5, 81);
    let states = evolve_ck(&data, &xi, &amb, 0.0, 10, 0.005, 0.04).unwrap();
    let (a, b) = (-0.3, 0.3);
    let gained = curve_mass(states.last().unwrap(), a, b) - curve_mass(&states[0], a, b);
    let delivered = simpson(&states, |s| mass_momentum_flux(s, &amb, a, b).unwrap().0);
    assert!(gained > 0.01);
    assert!((gained - delivered).abs() < 1e-8, "{gained} vs {delivered}");
}

#[test]
fn mol_balances_mass_too() {
    let data = curves::perturbed_curve();
    let amb = curves::perturbed_ambient();
    let xi = uniform_nodes(-0.5, 0.5, 81);
    let states = evolve_mol(&data.state_on(&xi, 0.0).unwrap(), &amb, 0.001, 0.02, &FilterParams::default()).unwrap();
    let (a, b) = (-0.3, 0.3);
    let gained = curve_mass(states.last().unwrap(), a, b) - curve_mass(&states[0], a, b);
    let delivered = simpson(&states, |s| mass_momentum_flux(s, &amb, a, b).unwrap().0);
    assert!((gained - delivered).abs() < 1e-7, "{gained} vs {delivered}");
}

// x₁ ↦ −x₁ in the coefficients of a (t, x₁, x₂) series
fn flip_x1(s: &TriSeries, sign: f64) -> TriSeries {
    let mut out = s.clone();
    for (e, c) in s.terms() {
        out.set_coeff(e, if e[1] % 2 == 1 { -sign * c } else { sign * c });
    }
    out
}

fn flip_xi(s: &UniSeries, sign: f64) -> UniSeries {
    let mut out = s.clone();
    for (e, c) in s.terms() {
        out.set_coeff(e, if e[0] % 2 == 1 { -sign * c } else { sign * c });
    }
    out
}

// Reflecting in x₁ and reversing ξ keeps the + side on the + side.
#[test]
fn mirror_image_evolves_into_mirror_image() {
    let spec = curves::perturbed_ambient_spec();
    let tri = |l: &pgas::scenario::config::SeriesLit| l.to_series::<3>("ambient").unwrap();
    let amb = spec.build("ambient").unwrap();
    let mirrored_amb = AmbientState::new(
        flip_x1(&tri(&spec.rho_plus), 1.0),
        flip_x1(&tri(&spec.rho_minus), 1.0),
        [flip_x1(&tri(&spec.v_plus[0]), -1.0), flip_x1(&tri(&spec.v_plus[1]), 1.0)],
        [flip_x1(&tri(&spec.v_minus[0]), -1.0), flip_x1(&tri(&spec.v_minus[1]), 1.0)],
    )
    .unwrap();
    let d = curves::perturbed_curve();
    let md = CurveData::new(
        [flip_xi(&d.y[0], -1.0), flip_xi(&d.y[1], 1.0)],
        flip_xi(&d.eta, 1.0),
        [flip_xi(&d.v[0], -1.0), flip_xi(&d.v[1], 1.0)],
    )
    .unwrap();

    let xi = uniform_nodes(-0.5, 0.5, 41);
    let a = evolve_ck(&d, &xi, &amb, 0.0, 10, 0.01, 0.03).unwrap();
    let b = evolve_ck(&md, &xi, &mirrored_amb, 0.0, 10, 0.01, 0.03).unwrap();
    assert_eq!(a.len(), b.len());
    let r = |v: Vec2| Vec2::new(-v.x, v.y);
    let n = xi.len();
    for (s, m) in a.iter().zip(&b) {
        for i in 0..n {
            let j = n - 1 - i;
            assert!((m.y[j] - r(s.y[i])).max_abs() < 1e-12);
            assert!((m.eta[j] - s.eta[i]).abs() < 1e-12);
            assert!((m.v[j] - r(s.v[i])).max_abs() < 1e-12);
        }
    }
    assert!(a.last().unwrap().eta[0] - a[0].eta[0] > 1e-2);
}

// Time derivative of the jet by central differences against the node law.
#[test]
fn jet_satisfies_node_law_by_finite_differences() {
    let data = curves::perturbed_curve();
    let amb = curves::perturbed_ambient();
    let jet = build_jet(&data.localize(0.1, 12).unwrap(), &amb, 0.0, 12).unwrap();
    let h = 1e-4;
    for &(xi, t) in &[(0.1, 0.02), (0.15, 0.05), (0.05, 0.03)] {
        let (fwd, bwd, at) = (jet.eval(xi, t + h), jet.eval(xi, t - h), jet.eval(xi, t));
        let y_t = (fwd.y - bwd.y) * (0.5 / h);
        let eta_t = (fwd.eta - bwd.eta) / (2.0 * h);
        let v_t = (fwd.v - bwd.v) * (0.5 / h);
        let rates = node_rates(at.p, at.v, at.eta, &amb.sample(t, at.y).unwrap());
        assert!((y_t - at.v).max_abs() < 1e-7, "y_t at {xi}, {t}");
        assert!((eta_t - rates.eta_t).abs() < 1e-7, "eta_t at {xi}, {t}");
        assert!((v_t - rates.v_t).max_abs() < 1e-7, "v_t at {xi}, {t}");
    }
}
