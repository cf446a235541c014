//! End-to-end checks against closed forms; one PASS/FAIL line each.

use std::time::{Duration, Instant};

use pgas::curve::{
    build_jet, curve_rhs, evolve_ck, evolve_mol, stencil::uniform_nodes, AmbientState, CurveData, CurveJet,
    CurveState, FilterParams,
};
use pgas::interaction::{
    merge_boundary_data, solve_endpoint_contact, solve_tangential_contact, ContactPoint,
};
use pgas::particles::{sample_accretion_scenario, simulate_sticky, AccretionConfig, Particle, ParticleSystem};
use pgas::scenario::{self, curves, fields, Format, RunOptions, BUILTINS};
use pgas::singularity::{classify_genericity, find_critical_points, CriticalSearch, PhiEvaluator};
use pgas::smooth_flow::{density_along_characteristic, eulerian_state, first_blowup_scan, ScanConfig};
use pgas::{AnalyticField, Mat2, Vec2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn within(what: &str, got: f64, want: f64, tol: f64) -> Result<String, String> {
    let err = (got - want).abs();
    let line = format!("{what} = {got:.12e} (want {want}, err {err:.1e}, tol {tol:.0e})");
    if err <= tol {
        Ok(line)
    } else {
        Err(line)
    }
}

fn ensure(ok: bool, msg: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg)
    }
}

// 1/(1 − |x|²) for the cubic field: Hessian 2I at the origin.
fn c1_blowup_genericity() -> Check {
    let field = fields::cubic();
    let start = Instant::now();
    let scan = first_blowup_scan(&field, &ScanConfig::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5), 200, 2.0))
        .map_err(|e| e.to_string())?;
    let r = scan.result.ok_or("no blow-up found")?;
    let p = classify_genericity(&PhiEvaluator::new(&field), r.tau_star, r.x_star).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let mut notes = vec![within("tau*", r.tau_star, 1.0, 1e-6)?];
    ensure(r.x_star.norm() <= 1e-4, format!("x* = {:?}", r.x_star))?;
    let (l1, l2) = p.hessian_eigenvalues;
    notes.push(within("hessian eig 1", l1, 2.0, 1e-3)?);
    notes.push(within("hessian eig 2", l2, 2.0, 1e-3)?);
    ensure(p.flags.all(), format!("flags {:?}", p.flags))?;
    ensure(elapsed < Duration::from_secs(5), format!("took {elapsed:?}"))?;
    notes.push(format!("all flags, {elapsed:.2?}"));
    Ok(notes.join("; "))
}

fn c2_non_genericity() -> Check {
    let search = CriticalSearch::new(Vec2::new(-0.5, -0.5), Vec2::new(0.5, 0.5), 2.0, 21);
    let radial = find_critical_points(&fields::radial_collapse(), &search).map_err(|e| e.to_string())?;
    ensure(!radial.is_generic(), "w = -x reported generic".into())?;
    ensure(
        radial.points.iter().any(|p| (p.tau - 1.0).abs() < 1e-9 && p.a.max_abs() < 1e-9 && !p.is_generic()),
        "w = -x: no rank-0 point at t = 1".into(),
    )?;
    ensure(radial.points.len() > 1 || radial.flooded, "w = -x: isolated root".into())?;
    let uniform = find_critical_points(&fields::uniform_compression(), &search).map_err(|e| e.to_string())?;
    ensure(!uniform.is_generic(), "w = (-x1, 0) reported generic".into())?;
    ensure(
        !uniform.points.is_empty() && uniform.points.iter().all(|p| !p.flags.hessian_rank2),
        "w = (-x1, 0): Hessian rank not flagged".into(),
    )?;
    Ok(format!("w = -x: {} roots, rank 0; w = (-x1, 0): Hessian rank flagged at {} roots", radial.points.len(), uniform.points.len()))
}

// Smallest positive root of det(I + t A) = 1 + t tr A + t² det A.
fn first_root(a: Mat2) -> f64 {
    let (b, c) = (a.trace(), a.det());
    let roots = if c.abs() < 1e-14 {
        vec![-1.0 / b]
    } else {
        let d = b * b - 4.0 * c;
        if d < 0.0 {
            vec![]
        } else {
            vec![(-b - d.sqrt()) / (2.0 * c), (-b + d.sqrt()) / (2.0 * c)]
        }
    };
    roots.into_iter().filter(|t| *t > 0.0 && t.is_finite()).fold(f64::INFINITY, f64::min)
}

fn rk4_density(field: &AnalyticField, x: Vec2, t_end: f64) -> f64 {
    let a = field.jacobian(x).unwrap();
    // dρ/dt = −ρ tr(A (I + tA)⁻¹) along the characteristic
    let f = |t: f64, rho: f64| -> f64 {
        let inv = (Mat2::IDENTITY + a * t).inverse().unwrap();
        -rho * (a * inv).trace()
    };
    let n = 400;
    let h = t_end / n as f64;
    let mut rho = field.density(x).unwrap();
    for k in 0..n {
        let t = k as f64 * h;
        let k1 = f(t, rho);
        let k2 = f(t + h / 2.0, rho + h / 2.0 * k1);
        let k3 = f(t + h / 2.0, rho + h / 2.0 * k2);
        let k4 = f(t + h, rho + h * k3);
        rho += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    rho
}

fn c3_characteristics() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst_v: f64 = 0.0;
    let mut worst_rho: f64 = 0.0;
    for field in [fields::cubic(), fields::generic_cubic()] {
        let mut tau_star = f64::INFINITY;
        for i in 0..=100 {
            for j in 0..=100 {
                let x = Vec2::new(-0.5 + 0.01 * i as f64, -0.5 + 0.01 * j as f64);
                tau_star = tau_star.min(first_root(field.jacobian(x).unwrap()));
            }
        }
        for _ in 0..100 {
            let x = Vec2::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5));
            let t = rng.gen_range(0.0..0.9 * tau_star);
            let w = field.eval(x).unwrap();
            let s = eulerian_state(&field, t, x + w * t).map_err(|e| e.to_string())?;
            worst_v = worst_v.max((s.v - w).norm());
            let rho = density_along_characteristic(&field, x, t).map_err(|e| e.to_string())?;
            let oracle = rk4_density(&field, x, t);
            worst_rho = worst_rho.max((rho - oracle).abs() / oracle);
        }
    }
    ensure(worst_v < 1e-9, format!("velocity drift {worst_v:.2e}"))?;
    ensure(worst_rho < 1e-6, format!("density rel err {worst_rho:.2e}"))?;
    Ok(format!("200 samples: max |v - w| {worst_v:.1e}, density rel err {worst_rho:.1e}"))
}

fn c4_symmetric_slab() -> Check {
    let xi = uniform_nodes(-0.5, 0.5, 21);
    let states = evolve_ck(&curves::straight_curve(), &xi, &curves::slab_ambient(), 0.0, 8, 0.1, 0.1)
        .map_err(|e| e.to_string())?;
    let s = states.last().unwrap();
    ensure((s.t - 0.1).abs() < 1e-15, format!("stopped at t = {}", s.t))?;
    let eta_err = s.eta.iter().map(|e| (e - 1.2).abs()).fold(0.0, f64::max);
    let v_max = s.v.iter().map(|v| v.norm()).fold(0.0, f64::max);
    ensure(eta_err < 1e-10, format!("eta err {eta_err:.2e}"))?;
    ensure(v_max < 1e-10, format!("max |v| {v_max:.2e}"))?;
    Ok(format!("eta err {eta_err:.1e}, max |v| {v_max:.1e}"))
}

fn slope(dts: &[f64], rs: &[f64]) -> f64 {
    let xs: Vec<f64> = dts.iter().map(|d| d.ln()).collect();
    let ys: Vec<f64> = rs.iter().map(|r| r.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn c5_ck_convergence() -> Check {
    let data = curves::perturbed_curve();
    let amb = curves::perturbed_ambient();
    let mut notes = vec![];
    for n in [4usize, 8] {
        let jet = build_jet(&data.localize(0.1, n).map_err(|e| e.to_string())?, &amb, 0.0, n).map_err(|e| e.to_string())?;
        let dts: Vec<f64> = (0..5).map(|k| 0.1 / 2f64.powi(k)).collect();
        let rs = dts.iter().map(|&dt| jet.pde_residual(&amb, dt)).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let s = slope(&dts, &rs);
        notes.push(within(&format!("slope N={n}"), s, n as f64, 0.5)?);
    }
    Ok(notes.join("; "))
}

fn sup_diff(a: &CurveState, b: &CurveState) -> f64 {
    let mut sup: f64 = 0.0;
    for i in 0..a.len() {
        sup = sup
            .max((a.y[i] - b.y[i]).max_abs())
            .max((a.eta[i] - b.eta[i]).abs())
            .max((a.v[i] - b.v[i]).max_abs())
            .max((a.p[i] - b.p[i]).max_abs());
    }
    sup
}

fn c6_cross_solver() -> Check {
    let data = curves::perturbed_curve();
    let amb = curves::perturbed_ambient();
    let xi = uniform_nodes(-0.5, 0.5, 81);
    let ck = evolve_ck(&data, &xi, &amb, 0.0, 12, 0.01, 0.05).map_err(|e| e.to_string())?;
    let s0 = data.state_on(&xi, 0.0).map_err(|e| e.to_string())?;
    let mol = evolve_mol(&s0, &amb, 0.001, 0.05, &FilterParams::default()).map_err(|e| e.to_string())?;
    let mut sup: f64 = 0.0;
    for a in &ck {
        let b = mol.iter().find(|b| (b.t - a.t).abs() < 1e-9).ok_or(format!("no MOL state at t = {}", a.t))?;
        ensure(a.xi == b.xi, "node sets differ".into())?;
        sup = sup.max(sup_diff(a, b));
    }
    ensure(ck.last().unwrap().t >= 0.05 - 1e-12, "CK stopped early".into())?;
    ensure(sup < 1e-5, format!("sup diff {sup:.2e}"))?;
    Ok(format!("{} common times, sup diff {sup:.2e}", ck.len()))
}

fn jet(y: [&[f64]; 2], v: [&[f64]; 2], order: usize) -> CurveJet {
    let d = CurveData::from_coeffs(0.0, order, y, &[1.0], v).unwrap();
    build_jet(&d, &AmbientState::vacuum(), 0.0, order).unwrap()
}

const ORIGIN: ContactPoint = ContactPoint { t0: 0.0, xi0: 0.0, s0: 0.0 };

fn c7_tangential() -> Check {
    let lower = jet([&[0.0, 1.0], &[0.0, 0.0, -1.0]], [&[0.0], &[1.0]], 10);
    let upper = jet([&[0.0, 1.0], &[0.0, 0.0, 1.0]], [&[], &[]], 10);
    let xi = uniform_nodes(-0.2, 0.2, 41);
    let map = solve_tangential_contact(&lower, &upper, ORIGIN, &xi).map_err(|e| e.to_string())?;
    ensure(map.len() == 41 && !map.truncated, "map truncated".into())?;
    let t_err = map.xi.iter().zip(&map.t_sharp).map(|(x, t)| (t - 2.0 * x * x).abs()).fold(0.0, f64::max);
    ensure(t_err < 1e-8, format!("t# err {t_err:.2e}"))?;
    let merged = merge_boundary_data(&lower, &upper, &map).map_err(|e| e.to_string())?;
    // equal masses, velocities (0, 1) and (0, 0): momentum average
    let v_err = merged.v.iter().map(|v| (*v - Vec2::new(0.0, 0.5)).max_abs()).fold(0.0, f64::max);
    ensure(v_err < 1e-12, format!("merged v err {v_err:.2e}"))?;
    Ok(format!("t# err {t_err:.1e}, merged v err {v_err:.1e}"))
}

fn c8_endpoint() -> Check {
    let left = jet([&[0.0, 1.0], &[0.0, -1.0]], [&[0.0], &[1.0]], 8);
    let right = jet([&[0.0, 1.0], &[0.0, 1.0]], [&[0.0], &[-1.0]], 8);
    let ep = solve_endpoint_contact(&left, &right, ORIGIN, &uniform_nodes(0.0, 0.2, 21)).map_err(|e| e.to_string())?;
    let q_err = (ep.q_dot - Vec2::new(1.0, 0.0)).max_abs();
    ensure(q_err <= 1e-10, format!("Q' = {:?}", ep.q_dot))?;
    within("dt#/dxi", ep.dt_dxi, 1.0, 1e-6)?;
    within("ds#/dxi", ep.ds_dxi, 1.0, 1e-6)?;

    // curved rays: closed-form slopes against centered differences of the solved map
    let g1 = jet([&[0.0, 1.0], &[0.0, -1.0, 0.3, 0.5]], [&[0.0], &[1.0]], 8);
    let g2 = jet([&[0.0, 1.0, 0.2], &[0.0, 1.0, 0.2]], [&[0.3], &[-1.0]], 8);
    let err = |h: f64| -> Result<f64, String> {
        let ep = solve_endpoint_contact(&g1, &g2, ORIGIN, &[-h, 0.0, h]).map_err(|e| e.to_string())?;
        let m = &ep.map;
        let ft = (m.t_sharp[2] - m.t_sharp[0]) / (2.0 * h);
        let fs = (m.s_sharp[2] - m.s_sharp[0]) / (2.0 * h);
        Ok((ft - ep.dt_dxi).abs().max((fs - ep.ds_dxi).abs()))
    };
    let hs = [0.04, 0.02, 0.01];
    let es = hs.iter().map(|&h| err(h)).collect::<Result<Vec<_>, _>>()?;
    let order = slope(&hs, &es);
    ensure((order - 2.0).abs() < 0.3, format!("FD order {order:.2}, errors {es:?}"))?;
    Ok(format!("Q' err {q_err:.1e}, FD convergence order {order:.2}"))
}

fn c9_particles() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst_q: f64 = 0.0;
    let mut merges = 0;
    for _ in 0..20 {
        let mut ps: Vec<Particle> = Vec::new();
        while ps.len() < 30 {
            let x = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            if ps.iter().any(|p| (p.x - x).norm() < 0.1) {
                continue;
            }
            let v = Vec2::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            ps.push(Particle { mass: rng.gen_range(0.5..2.0), x, v });
        }
        let sys = ParticleSystem::new(ps, 0.05);
        let run = simulate_sticky(&sys, 5.0).map_err(|e| e.to_string())?;
        merges += run.events.len();
        let m0: f64 = sys.particles.iter().map(|p| p.mass).sum();
        let m1: f64 = run.state.particles.iter().map(|p| p.mass).sum();
        // exact up to summation order
        ensure((m0 - m1).abs() <= 4.0 * f64::EPSILON * m0, format!("mass {m0} -> {m1}"))?;
        worst_q = worst_q.max((run.state.total_momentum() - sys.total_momentum()).max_abs());
    }
    ensure(merges > 0, "no merges happened".into())?;
    ensure(worst_q < 1e-12, format!("momentum drift {worst_q:.2e}"))?;

    let amb = curves::slab_ambient();
    let state = curves::straight_curve().state_on(&uniform_nodes(-1.0, 1.0, 41), 0.0).map_err(|e| e.to_string())?;
    let cfg = AccretionConfig { n_particles: 10_000, window: (-0.5, 0.5), duration: 0.2, seed: 0, batches: 16 };
    let est = sample_accretion_scenario(&state, &amb, &cfg).map_err(|e| e.to_string())?;
    let rate = within("accretion rate", est.mass_rate, 2.0, 0.04)?;
    let eta_t = curve_rhs(&state, &amb).map_err(|e| e.to_string())?.eta_t[20];
    within("rate vs eta_t", est.mass_rate, eta_t, 0.02 * eta_t)?;
    Ok(format!("{merges} merges, momentum drift {worst_q:.1e}; {rate}; eta_t {eta_t}"))
}

fn c10_determinism() -> Check {
    let mut slowest = (Duration::ZERO, "");
    for b in BUILTINS {
        let cfg = scenario::builtin(b.name).unwrap();
        for format in [Format::Csv, Format::Json] {
            let opts = RunOptions { format, ..Default::default() };
            let start = Instant::now();
            let a = scenario::run(&cfg, &opts).map_err(|e| format!("{}: {e}", b.name))?;
            let took = start.elapsed();
            if took > slowest.0 {
                slowest = (took, b.name);
            }
            let c = scenario::run(&cfg, &opts).map_err(|e| format!("{}: {e}", b.name))?;
            ensure(a.artifacts == c.artifacts, format!("{} differs between runs", b.name))?;
        }
    }
    ensure(slowest.0 < Duration::from_secs(60), format!("{} took {:?}", slowest.1, slowest.0))?;
    Ok(format!("{} scenarios x 2 formats identical; slowest {} {:.2?}", BUILTINS.len(), slowest.1, slowest.0))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("blow-up genericity", c1_blowup_genericity),
        ("non-genericity detection", c2_non_genericity),
        ("characteristics", c3_characteristics),
        ("symmetric slab", c4_symmetric_slab),
        ("CK convergence", c5_ck_convergence),
        ("cross-solver", c6_cross_solver),
        ("tangential contact", c7_tangential),
        ("endpoint contact", c8_endpoint),
        ("particle oracle", c9_particles),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
