use std::time::Instant;

use serde::Serialize;

use super::config::*;
use super::output::{sha256_hex, Artifact, ArtifactRecord, Format, Manifest, Table};
use super::RunError;
use crate::curve::{
    build_jet, check_admissibility, curve_mass, curve_momentum, evolve_ck, evolve_mol, mass_momentum_flux, Admissibility,
    CurveState, ADMISSIBILITY_TOL,
};
use crate::interaction::{
    assemble_merged_cauchy_problem, merge_boundary_data, solve_endpoint_contact, solve_tangential_contact,
    ContactMap, ContactPoint, CurveEvolution,
};
use crate::particles::{sample_accretion_scenario, simulate_sticky, AccretionConfig};
use crate::series::Vec2;
use crate::singularity::{classify_genericity, find_critical_points, CriticalSearch, PhiEvaluator};
use crate::smooth_flow::{eulerian_state, first_blowup_scan, ScanConfig};

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub format: Format,
    /// Overrides the config's seed.
    pub seed: Option<u64>,
    /// Record wall-clock time in the manifest.
    pub timings: bool,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// Every artifact, the manifest last.
    pub artifacts: Vec<Artifact>,
    pub manifest: Manifest,
}

struct Ctx {
    format: Format,
    out: Vec<Artifact>,
}

impl Ctx {
    fn table(&mut self, stem: &str, t: &Table) {
        self.out.push(Artifact::table(stem, t, self.format));
    }

    fn json<T: Serialize>(&mut self, stem: &str, v: &T) {
        self.out.push(Artifact::json(stem, v));
    }
}

/// Runs a scenario and returns its artifacts; nothing is written to disk.
pub fn run(config: &ScenarioConfig, opts: &RunOptions) -> Result<RunOutput, RunError> {
    let start = Instant::now();
    let mut cfg = config.clone();
    if let Some(s) = opts.seed {
        cfg.seed = s;
    }
    let mut ctx = Ctx {
        format: opts.format,
        out: Vec::new(),
    };
    match cfg.params()? {
        Params::Smooth(p) => smooth(&p, &mut ctx)?,
        Params::Blowup(p) => blowup(&p, &mut ctx)?,
        Params::Genericity(p) => genericity(&p, &mut ctx)?,
        Params::Curve(p) => curve(&p, &mut ctx)?,
        Params::Interact(p) => interact(&p, cfg.kind == Kind::InteractEndpoint, &mut ctx)?,
        Params::Particles(p) => particles(&p, &mut ctx)?,
        Params::Accretion(p) => accretion(&p, cfg.seed, &mut ctx)?,
    }
    let manifest = Manifest {
        name: cfg.name.clone(),
        kind: cfg.kind.name().into(),
        seed: cfg.seed,
        config_sha256: sha256_hex(cfg.to_json().as_bytes()),
        version: env!("CARGO_PKG_VERSION").into(),
        format: opts.format,
        artifacts: ctx
            .out
            .iter()
            .map(|a| ArtifactRecord {
                file: a.file.clone(),
                sha256: a.sha256(),
                bytes: a.bytes.len(),
            })
            .collect(),
        elapsed_ms: opts.timings.then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    ctx.json("manifest", &manifest);
    Ok(RunOutput {
        artifacts: ctx.out,
        manifest,
    })
}

fn smooth(p: &SmoothParams, ctx: &mut Ctx) -> Result<(), RunError> {
    let field = p.field.build("params.field")?;
    let mut t = Table::new(&["t", "y1", "y2", "x1", "x2", "rho", "v1", "v2", "newton_iterations"]);
    for (k, q) in p.points.iter().enumerate() {
        let y = Vec2::new(q[1], q[2]);
        let s = eulerian_state(&field, q[0], y).map_err(|e| RunError::Numerical(format!("point {k}: {e}")))?;
        t.push(vec![q[0], y.x, y.y, s.x.x, s.x.y, s.rho, s.v.x, s.v.y, s.iterations as f64]);
    }
    ctx.table("smooth", &t);
    Ok(())
}

fn blowup(p: &BlowupParams, ctx: &mut Ctx) -> Result<(), RunError> {
    let field = p.field.build("params.field")?;
    let mut sc = ScanConfig::new(p.lo.into(), p.hi.into(), p.n, p.t_max);
    sc.polish_top = p.polish_top;
    let scan = first_blowup_scan(&field, &sc)?;
    let point = match &scan.result {
        Some(r) => Some(classify_genericity(&PhiEvaluator::new(&field), r.tau_star, r.x_star)?),
        None => None,
    };
    #[derive(Serialize)]
    struct Summary<'a> {
        /// The minimum is certified only over this box.
        search_box: [[f64; 2]; 2],
        t_max: f64,
        result: &'a Option<crate::smooth_flow::BlowupScanResult>,
        classification: Option<crate::singularity::BlowupPoint>,
        generic: Option<bool>,
    }
    ctx.json(
        "blowup",
        &Summary {
            search_box: [p.lo, p.hi],
            t_max: p.t_max,
            result: &scan.result,
            generic: point.as_ref().map(|b| b.is_generic()),
            classification: point,
        },
    );
    if p.write_cells {
        let mut t = Table::new(&["i", "j", "x1", "x2", "tau"]);
        for i in 0..scan.n {
            for j in 0..scan.n {
                let x = sc.node(i, j);
                let tau = scan.cell_tau[i * scan.n + j].unwrap_or(f64::INFINITY);
                t.push(vec![i as f64, j as f64, x.x, x.y, tau]);
            }
        }
        ctx.table("cells", &t);
    }
    Ok(())
}

fn genericity(p: &GenericityParams, ctx: &mut Ctx) -> Result<(), RunError> {
    let field = p.field.build("params.field")?;
    let mut search = CriticalSearch::new(p.lo.into(), p.hi.into(), p.t_max, p.grid);
    search.max_roots = p.max_roots;
    let report = find_critical_points(&field, &search)?;
    #[derive(Serialize)]
    struct Summary<'a> {
        search_box: [[f64; 2]; 2],
        t_max: f64,
        generic: bool,
        report: &'a crate::singularity::CriticalReport,
    }
    ctx.json(
        "genericity",
        &Summary {
            search_box: [p.lo, p.hi],
            t_max: p.t_max,
            generic: report.is_generic(),
            report: &report,
        },
    );
    let mut t = Table::new(&[
        "tau", "x1", "x2", "y1", "y2", "h_eig1", "h_eig2", "s0_empty", "s1_manifold", "hessian_rank2",
        "nonzero_eigenvalue",
    ]);
    let b = |v: bool| if v { 1.0 } else { 0.0 };
    for q in &report.points {
        t.push(vec![
            q.tau,
            q.x.x,
            q.x.y,
            q.y.x,
            q.y.y,
            q.hessian_eigenvalues.0,
            q.hessian_eigenvalues.1,
            b(q.flags.s0_empty),
            b(q.flags.s1_manifold),
            b(q.flags.hessian_rank2),
            b(q.flags.nonzero_eigenvalue),
        ]);
    }
    ctx.table("critical_points", &t);
    Ok(())
}

#[derive(Serialize, Default)]
struct AdmissibilityCount {
    strict: usize,
    weak: usize,
    violated: usize,
}

fn count(a: &[Admissibility]) -> AdmissibilityCount {
    let mut c = AdmissibilityCount::default();
    for x in a {
        match x {
            Admissibility::Strict => c.strict += 1,
            Admissibility::Weak => c.weak += 1,
            Admissibility::Violated => c.violated += 1,
        }
    }
    c
}

fn state_rows(t: &mut Table, s: &CurveState) {
    for i in 0..s.len() {
        t.push(vec![
            s.t, s.xi[i], s.y[i].x, s.y[i].y, s.eta[i], s.v[i].x, s.v[i].y, s.p[i].x, s.p[i].y,
        ]);
    }
}

fn curve(p: &CurveParams, ctx: &mut Ctx) -> Result<(), RunError> {
    let data = p.curve.build("params.curve")?;
    let ambient = p.ambient.build("params.ambient")?;
    let xi = p.nodes.validate("params.nodes", crate::curve::stencil::MIN_NODES)?;
    let initial = data.state_on(&xi, p.t0)?;
    let adm0 = check_admissibility(&initial, &ambient, ADMISSIBILITY_TOL)?;
    if let Some(i) = adm0.iter().position(|a| *a == Admissibility::Violated) {
        return Err(RunError::Violation(format!("initial curve at ξ = {}", xi[i])));
    }
    let states = match p.solver {
        Solver::Ck => evolve_ck(&data, &xi, &ambient, p.t0, p.order, p.dt, p.t_end)?,
        Solver::Mol => evolve_mol(&initial, &ambient, p.dt, p.t_end, &p.filter)?,
    };
    let last = states.last().expect("initial state");
    let mut t = Table::new(&["t", "xi", "y1", "y2", "eta", "v1", "v2", "p1", "p2"]);
    for s in &states {
        state_rows(&mut t, s);
    }
    ctx.table("curve", &t);

    let (a, b) = (last.xi[0], last.xi[last.len() - 1]);
    #[derive(Serialize)]
    struct Summary {
        steps: usize,
        t_final: f64,
        nodes_final: usize,
        initial_admissibility: AdmissibilityCount,
        final_admissibility: AdmissibilityCount,
        /// Over the final ξ-window.
        mass_initial: f64,
        mass_final: f64,
        /// Accretion flux integrated in time by the trapezoid rule.
        mass_delivered: f64,
        momentum_initial: Vec2,
        momentum_final: Vec2,
        momentum_delivered: Vec2,
        max_consistency_error: f64,
    }
    let fluxes = states
        .iter()
        .map(|s| mass_momentum_flux(s, &ambient, a, b))
        .collect::<Result<Vec<_>, _>>()?;
    let (mut dm, mut dq) = (0.0, Vec2::ZERO);
    for k in 1..states.len() {
        let h = 0.5 * (states[k].t - states[k - 1].t);
        dm += h * (fluxes[k].0 + fluxes[k - 1].0);
        dq = dq + (fluxes[k].1 + fluxes[k - 1].1) * h;
    }
    let adm1 = check_admissibility(last, &ambient, ADMISSIBILITY_TOL)?;
    let consistency = states
        .iter()
        .map(|s| s.consistency_error())
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .fold(0.0, f64::max);
    ctx.json(
        "summary",
        &Summary {
            steps: states.len() - 1,
            t_final: last.t,
            nodes_final: last.len(),
            initial_admissibility: count(&adm0),
            final_admissibility: count(&adm1),
            mass_initial: curve_mass(&initial, a, b),
            mass_final: curve_mass(last, a, b),
            mass_delivered: dm,
            momentum_initial: curve_momentum(&initial, a, b),
            momentum_final: curve_momentum(last, a, b),
            momentum_delivered: dq,
            max_consistency_error: consistency,
        },
    );
    Ok(())
}

fn interact(p: &InteractParams, endpoint: bool, ctx: &mut Ctx) -> Result<(), RunError> {
    let d1 = p.curve1.build("params.curve1")?;
    let d2 = p.curve2.build("params.curve2")?;
    let ambient = p.ambient.build("params.ambient")?;
    let xi = p.xi.validate("params.xi", 1)?;
    let j1 = build_jet(&d1.localize(p.xi0, p.order)?, &ambient, p.t0, p.order)?;
    let j2 = build_jet(&d2.localize(p.s0, p.order)?, &ambient, p.t0, p.order)?;
    let at = ContactPoint {
        t0: p.t0,
        xi0: p.xi0,
        s0: p.s0,
    };

    #[derive(Serialize)]
    struct Endpoint {
        q_dot: Vec2,
        b: f64,
        normals: [Vec2; 2],
        dt_dxi: f64,
        ds_dxi: f64,
    }
    let (map, endpoint_info): (ContactMap, Option<Endpoint>) = if endpoint {
        let ep = solve_endpoint_contact(&j1, &j2, at, &xi)?;
        let info = Endpoint {
            q_dot: ep.q_dot,
            b: ep.b,
            normals: ep.normals,
            dt_dxi: ep.dt_dxi,
            ds_dxi: ep.ds_dxi,
        };
        (ep.map, Some(info))
    } else {
        (solve_tangential_contact(&j1, &j2, at, &xi)?, None)
    };
    let merged = merge_boundary_data(&j1, &j2, &map)?;
    let mut t = Table::new(&["xi", "t_sharp", "s_sharp", "dt_dxi", "ds_dxi", "eta", "v1", "v2"]);
    for i in 0..map.len() {
        t.push(vec![
            map.xi[i],
            map.t_sharp[i],
            map.s_sharp[i],
            map.dt_dxi[i],
            map.ds_dxi[i],
            merged.eta[i],
            merged.v[i].x,
            merged.v[i].y,
        ]);
    }
    ctx.table("contact", &t);

    let node = map.node(map.nearest_contact());
    let cauchy = assemble_merged_cauchy_problem(&j1, &j2, node, &ambient, p.order)?;
    let jet = &cauchy.jet;
    let mut chart = Table::new(&["x1", "x2", "t", "y1", "y2", "eta", "v1", "v2"]);
    let ns = p.chart_samples;
    for &x1 in &map.xi {
        let ts = jet.t_sharp().eval([x1]);
        for k in 0..ns {
            let x2 = p.chart_span * k as f64 / (ns - 1) as f64;
            let n = jet.node(x1, ts + x2);
            chart.push(vec![x1, x2, ts + x2, n.y.x, n.y.y, n.eta, n.v.x, n.v.y]);
        }
    }
    ctx.table("merged_chart", &chart);

    #[derive(Serialize)]
    struct Summary {
        case: crate::interaction::ContactCase,
        xi_range: [f64; 2],
        truncated: bool,
        contact_residual: f64,
        endpoint: Option<Endpoint>,
        merged_center: ContactPoint,
        merged_consistency_defect: f64,
        merged_pde_residual: f64,
    }
    ctx.json(
        "interaction",
        &Summary {
            case: map.case,
            xi_range: [map.xi[0], map.xi[map.len() - 1]],
            truncated: map.truncated,
            contact_residual: map.residual,
            endpoint: endpoint_info,
            merged_center: node,
            merged_consistency_defect: jet.consistency_defect(),
            merged_pde_residual: jet.pde_residual(&ambient, node.t0 + 0.5 * p.chart_span)?,
        },
    );
    Ok(())
}

fn particles(p: &ParticleParams, ctx: &mut Ctx) -> Result<(), RunError> {
    let run = simulate_sticky(&p.system, p.t_end.unwrap_or(f64::INFINITY))?;
    let mut t = Table::new(&["t", "i", "j", "mass", "v1", "v2", "x1", "x2"]);
    for e in &run.events {
        t.push(vec![e.t, e.i as f64, e.j as f64, e.mass, e.v.x, e.v.y, e.x.x, e.x.y]);
    }
    ctx.table("events", &t);
    #[derive(Serialize)]
    struct Final<'a> {
        survivors: &'a [usize],
        state: &'a crate::particles::ParticleSystem,
        mass_initial: f64,
        mass_final: f64,
        momentum_initial: Vec2,
        momentum_final: Vec2,
    }
    ctx.json(
        "final",
        &Final {
            survivors: &run.survivors,
            state: &run.state,
            mass_initial: p.system.total_mass(),
            mass_final: run.state.total_mass(),
            momentum_initial: p.system.total_momentum(),
            momentum_final: run.state.total_momentum(),
        },
    );
    Ok(())
}

fn accretion(p: &AccretionParams, seed: u64, ctx: &mut Ctx) -> Result<(), RunError> {
    let data = p.curve.build("params.curve")?;
    let ambient = p.ambient.build("params.ambient")?;
    let xi = p.nodes.validate("params.nodes", 2)?;
    let state = data.state_on(&xi, p.t0)?;
    let cfg = AccretionConfig {
        n_particles: p.n_particles,
        window: (p.window[0], p.window[1]),
        duration: p.duration,
        seed,
        batches: p.batches,
    };
    let est = sample_accretion_scenario(&state, &ambient, &cfg)?;
    let (m, q) = mass_momentum_flux(&state, &ambient, p.window[0], p.window[1])?;
    let len = p.window[1] - p.window[0];
    #[derive(Serialize)]
    struct Summary {
        estimate: crate::particles::AccretionEstimate,
        curve_mass_rate: f64,
        curve_momentum_rate: Vec2,
    }
    ctx.json(
        "accretion",
        &Summary {
            estimate: est,
            curve_mass_rate: m / len,
            curve_momentum_rate: q * (1.0 / len),
        },
    );
    Ok(())
}
