//! Local power-series solutions of the curve system.
//!
//! About a node `(ξ₀, t₀)` the unknowns are written as offsets from the
//! initial data, `U = (y − y₀, η − η₀, v − v₀, p − y₀', t − t₀)`, which vanish
//! at `t = t₀`. Data given on a curve `t = t♯(ξ)` works the same way in the
//! variable `t − t♯(ξ)`. Their Taylor coefficients in time follow recursively:
//! coefficient `k + 1` of `U` is coefficient `k` of the right-hand side
//! divided by `k + 1`, and the right-hand side's coefficient `k` only
//! involves coefficients `0..=k` of `U`.

use rayon::prelude::*;

use super::{node_rates, AmbientState, CurveData, CurveError, CurveState, NodeValues};
use crate::series::{BiSeries, SeriesError, UniSeries, Vec2};

/// Largest accepted ratio of the last Taylor term to the whole sum.
pub const TAIL_TOL: f64 = 1e-10;

const UNKNOWNS: usize = 8;
const TAU: usize = 7;

/// Data prescribed on the curve `t = t♯(ξ)`, all as series in `ξ` about
/// the same point. For an ordinary initial-value problem `t♯` is constant
/// and `p = y'`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryData {
    pub y: [UniSeries; 2],
    pub eta: UniSeries,
    pub v: [UniSeries; 2],
    pub p: [UniSeries; 2],
    pub t_sharp: UniSeries,
}

impl BoundaryData {
    /// Initial data at the fixed time `t0`.
    pub fn initial(data: &CurveData, t0: f64) -> Self {
        let c = data.eta.center();
        Self {
            y: data.y.clone(),
            eta: data.eta.clone(),
            v: data.v.clone(),
            p: data.tangent(),
            t_sharp: UniSeries::constant(c, data.degree(), t0).with_radius(data.eta.radius()),
        }
    }

    pub fn center(&self) -> f64 {
        self.eta.center()[0]
    }

    fn truncated(&self, degree: usize) -> Self {
        let d = |s: &UniSeries| s.with_degree(degree);
        Self {
            y: [d(&self.y[0]), d(&self.y[1])],
            eta: d(&self.eta),
            v: [d(&self.v[0]), d(&self.v[1])],
            p: [d(&self.p[0]), d(&self.p[1])],
            t_sharp: d(&self.t_sharp),
        }
    }
}

/// Taylor jet of the curve unknowns in `x₁ = ξ` and `x₂ = t − t♯(ξ)`
/// about `(ξ₀, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveJet {
    xi0: f64,
    order: usize,
    t_sharp: UniSeries,
    // y, η, v, p on the boundary curve, constant in x₂
    base: [BiSeries; 7],
    u: [BiSeries; UNKNOWNS],
}

fn series_rates(f: &[BiSeries; 7], amb: &[BiSeries; 6], xi0: f64) -> Result<[BiSeries; 5], CurveError> {
    let [_, _, eta, v1, v2, p1, p2] = f;
    let [rp, rm, vp1, vp2, vm1, vm2] = amb;
    let cross = |a1: &BiSeries, a2: &BiSeries| &(p1 * a2) - &(p2 * a1);
    let fp = &cross(&(v1 - vp1), &(v2 - vp2)) * rp;
    let fm = &cross(&(v1 - vm1), &(v2 - vm2)) * rm;
    let inv = eta.reciprocal().map_err(|_| CurveError::DegenerateDensity {
        xi: xi0,
        eta: eta.constant_term(),
    })?;
    let accel = |vp: &BiSeries, vm: &BiSeries, v: &BiSeries| {
        &(&(&fp * &(vp - v)) - &(&fm * &(vm - v))) * &inv
    };
    Ok([v1.clone(), v2.clone(), &fp - &fm, accel(vp1, vm1, v1), accel(vp2, vm2, v2)])
}

/// Builds the order-`order` jet about `(data.center(), t0)`.
pub fn build_jet(
    data: &CurveData,
    ambient: &AmbientState,
    t0: f64,
    order: usize,
) -> Result<CurveJet, CurveError> {
    solve_cauchy(&BoundaryData::initial(data, t0), ambient, order)
}

/// Solves the curve system with data on `t = t♯(ξ)` by the power-series
/// recursion in `x₂ = t − t♯(ξ)`.
pub fn solve_cauchy(
    boundary: &BoundaryData,
    ambient: &AmbientState,
    order: usize,
) -> Result<CurveJet, CurveError> {
    solve_cauchy_coupled(boundary, ambient, order, 1.0)
}

// `p_t = v_ξ` becomes `P_{x₂} + c Z_{x₂} = Z_{x₁} + V'` with c = t♯'; the
// coupling sign is a parameter only so tests can show the other choice
// breaks `p = y_ξ`.
pub(crate) fn solve_cauchy_coupled(
    boundary: &BoundaryData,
    ambient: &AmbientState,
    order: usize,
    coupling: f64,
) -> Result<CurveJet, CurveError> {
    let xi0 = boundary.center();
    let b = boundary.truncated(order);
    let emb = |s: &UniSeries| BiSeries::from_first_axis(s, 0.0);
    let base = [
        emb(&b.y[0]),
        emb(&b.y[1]),
        emb(&b.eta),
        emb(&b.v[0]),
        emb(&b.v[1]),
        emb(&b.p[0]),
        emb(&b.p[1]),
    ];
    if !(base[2].constant_term() > 0.0) {
        return Err(CurveError::DegenerateDensity {
            xi: xi0,
            eta: base[2].constant_term(),
        });
    }
    if Vec2::new(base[5].constant_term(), base[6].constant_term()).norm() <= 1e-12 {
        return Err(CurveError::DegenerateTangent { xi: xi0 });
    }

    let c = [xi0, 0.0];
    let radius = base[0].radius();
    let zero = BiSeries::zeros(c, order).with_radius(radius);
    let mut u: [BiSeries; UNKNOWNS] = std::array::from_fn(|_| zero.clone());
    let time = &emb(&b.t_sharp) + &BiSeries::variable(c, order, 1).with_radius(radius);
    if order >= 1 {
        u[TAU].set_coeff([0, 1], 1.0);
    }
    let slope = b.t_sharp.derivative(0);
    let dv = [b.v[0].derivative(0), b.v[1].derivative(0)];
    for k in 0..order {
        let full: [BiSeries; 7] = std::array::from_fn(|i| &base[i] + &u[i]);
        let amb = ambient.compose(&[time.clone(), full[0].clone(), full[1].clone()])?;
        let rates = series_rates(&full, &amb, xi0)?;
        let scale = 1.0 / (k + 1) as f64;
        let top = order - k;
        for (comp, r) in rates.iter().enumerate() {
            for i in 0..top {
                u[comp].set_coeff([i, k + 1], r.coeff([i, k]) * scale);
            }
        }
        for a in 0..2 {
            let z = 3 + a;
            let dz = u[z].second_axis_block(k).derivative(0);
            let zt = &u[z].second_axis_block(k + 1) * &slope;
            for i in 0..top {
                let mut rhs = dz.at(i) - coupling * (k + 1) as f64 * zt.at(i);
                if k == 0 {
                    rhs += dv[a].at(i);
                }
                u[5 + a].set_coeff([i, k + 1], rhs * scale);
            }
        }
    }
    Ok(CurveJet {
        xi0,
        order,
        t_sharp: b.t_sharp,
        base,
        u,
    })
}

impl CurveJet {
    /// `(ξ₀, t♯(ξ₀))`.
    pub fn center(&self) -> (f64, f64) {
        (self.xi0, self.t_sharp.constant_term())
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Offsets `(Y₁, Y₂, W, Z₁, Z₂, P₁, P₂, τ)` as series in `(x₁, x₂)`.
    pub fn unknowns(&self) -> &[BiSeries; UNKNOWNS] {
        &self.u
    }

    pub fn t_sharp(&self) -> &UniSeries {
        &self.t_sharp
    }

    /// Full unknowns `(y₁, y₂, η, v₁, v₂, p₁, p₂)` in `(x₁, x₂)`.
    pub fn full(&self) -> [BiSeries; 7] {
        std::array::from_fn(|i| &self.base[i] + &self.u[i])
    }

    fn chart(&self, xi: f64, t: f64) -> [f64; 2] {
        [xi, t - self.t_sharp.eval([xi])]
    }

    pub fn eval(&self, xi: f64, t: f64) -> NodeValues {
        let at = self.chart(xi, t);
        let f = self.full();
        let e = |i: usize| f[i].eval(at);
        NodeValues {
            y: Vec2::new(e(0), e(1)),
            eta: e(2),
            v: Vec2::new(e(3), e(4)),
            p: Vec2::new(e(5), e(6)),
        }
    }

    /// Size of the last Taylor term at `ξ₀` relative to the partial sum.
    pub fn tail_ratio(&self, dt: f64) -> f64 {
        let size = |k: usize| {
            self.u[..TAU]
                .iter()
                .map(|s| s.coeff([0, k]).abs())
                .fold(0.0, f64::max)
        };
        let total: f64 = (0..=self.order).map(|k| size(k) * dt.abs().powi(k as i32)).sum();
        if total == 0.0 {
            return 0.0;
        }
        size(self.order) * dt.abs().powi(self.order as i32) / total
    }

    /// The unknowns along a path `σ ↦ (ξ(σ), t(σ))`, in the order
    /// `(y₁, y₂, η, v₁, v₂, p₁, p₂)`.
    pub fn along(&self, xi: &UniSeries, t: &UniSeries) -> Result<[UniSeries; 7], CurveError> {
        let x2 = t - &self.t_sharp.compose(std::array::from_ref(xi))?;
        let f = self.full();
        let refs: Vec<&BiSeries> = f.iter().collect();
        let out = crate::series::compose_all(&refs, &[xi.clone(), x2])?;
        Ok(out.try_into().expect("seven outputs"))
    }

    /// Data for the next step: the jet restricted to time `t`.
    pub fn data_at(&self, t: f64) -> Result<CurveData, CurveError> {
        let f = self.full();
        let flat = self.t_sharp.terms().iter().all(|(e, a)| e[0] == 0 || *a == 0.0);
        let r: Vec<UniSeries> = if flat {
            let x2 = t - self.t_sharp.constant_term();
            f.iter().map(|s| s.fix_second(x2)).collect()
        } else {
            let xi = UniSeries::variable([self.xi0], self.order, 0).with_radius(self.t_sharp.radius());
            let time = UniSeries::constant([self.xi0], self.order, t).with_radius(self.t_sharp.radius());
            self.along(&xi, &time)?.to_vec()
        };
        Ok(CurveData {
            y: [r[0].clone(), r[1].clone()],
            eta: r[2].clone(),
            v: [r[3].clone(), r[4].clone()],
        })
    }

    /// Largest defect of the jet in the curve system at `(ξ₀, t)`.
    pub fn pde_residual(&self, ambient: &AmbientState, t: f64) -> Result<f64, CurveError> {
        let f = self.full();
        let at = self.chart(self.xi0, t);
        let c = self.t_sharp.derivative(0).eval([self.xi0]);
        let val = |i: usize| f[i].eval(at);
        let d2 = |i: usize| f[i].derivative(1).eval(at);
        let d1 = |i: usize| f[i].derivative(0).eval(at);
        let y = Vec2::new(val(0), val(1));
        let v = Vec2::new(val(3), val(4));
        let p = Vec2::new(val(5), val(6));
        let a = ambient.sample(t, y)?;
        let r = node_rates(p, v, val(2), &a);
        let defects = [
            d2(0) - v.x,
            d2(1) - v.y,
            d2(2) - r.eta_t,
            d2(3) - r.v_t.x,
            d2(4) - r.v_t.y,
            d2(5) - (d1(3) - c * d2(3)),
            d2(6) - (d1(4) - c * d2(4)),
        ];
        Ok(defects.iter().fold(0.0, |m, d| m.max(d.abs())))
    }

    /// Largest coefficient of `y_ξ − p` through total degree `order − 1`,
    /// with `∂_ξ = ∂_{x₁} − t♯' ∂_{x₂}`.
    pub fn consistency_defect(&self) -> f64 {
        let f = self.full();
        let slope = BiSeries::from_first_axis(&self.t_sharp.derivative(0), 0.0);
        let mut worst: f64 = 0.0;
        for c in 0..2 {
            let y_xi = &f[c].derivative(0) - &(&slope * &f[c].derivative(1));
            let d = &y_xi - &f[5 + c];
            for (e, a) in d.terms() {
                if e[0] + e[1] < self.order {
                    worst = worst.max(a.abs());
                }
            }
        }
        worst
    }
}

/// One power-series step of every node.
#[derive(Debug, Clone)]
pub struct CkStep {
    pub jets: Vec<CurveJet>,
    pub state: CurveState,
    /// Local data about each node at the new time.
    pub next: Vec<CurveData>,
    pub tail_ratio: f64,
}

fn suggested_dt(dt: f64, ratio: f64, order: usize) -> f64 {
    0.9 * dt * (TAIL_TOL / ratio).powf(1.0 / order.max(1) as f64)
}

fn finish_step(jets: Vec<CurveJet>, t0: f64, dt: f64) -> Result<CkStep, CurveError> {
    let order = jets.first().map_or(0, |j| j.order);
    let tail_ratio = jets.iter().map(|j| j.tail_ratio(dt)).fold(0.0, f64::max);
    if tail_ratio > TAIL_TOL {
        return Err(CurveError::StepRejected {
            dt,
            tail_ratio,
            suggested_dt: suggested_dt(dt, tail_ratio, order),
        });
    }
    let t = t0 + dt;
    let vals: Vec<NodeValues> = jets.iter().map(|j| j.eval(j.xi0, t)).collect();
    let state = CurveState::new(
        t,
        jets.iter().map(|j| j.xi0).collect(),
        vals.iter().map(|v| v.y).collect(),
        vals.iter().map(|v| v.eta).collect(),
        vals.iter().map(|v| v.v).collect(),
        vals.iter().map(|v| v.p).collect(),
    )?;
    let next = jets.iter().map(|j| j.data_at(t)).collect::<Result<_, _>>()?;
    Ok(CkStep {
        jets,
        state,
        next,
        tail_ratio,
    })
}

/// Advances each node's local data from `t0` to `t0 + dt`.
pub fn ck_step(
    data: &[CurveData],
    ambient: &AmbientState,
    t0: f64,
    order: usize,
    dt: f64,
) -> Result<CkStep, CurveError> {
    let jets = data
        .par_iter()
        .map(|d| build_jet(d, ambient, t0, order))
        .collect::<Result<Vec<_>, _>>()?;
    finish_step(jets, t0, dt)
}

fn is_domain_error(e: &CurveError) -> bool {
    matches!(e, CurveError::Series(SeriesError::OutsideValidityBox { .. }))
}

/// Repeated power-series steps from `t0` to `t_end`. Nodes at either end
/// whose jets leave the ambient validity box are dropped.
pub fn evolve_ck(
    data: &CurveData,
    xi: &[f64],
    ambient: &AmbientState,
    t0: f64,
    order: usize,
    dt: f64,
    t_end: f64,
) -> Result<Vec<CurveState>, CurveError> {
    if !(dt > 0.0) {
        return Err(CurveError::InvalidState("dt must be positive".into()));
    }
    let mut local: Vec<CurveData> = xi
        .iter()
        .map(|&x| data.localize(x, order))
        .collect::<Result<_, _>>()?;
    let mut states = vec![data.state_on(xi, t0)?];
    let mut t = t0;
    let eps = 1e-12 * t_end.abs().max(1.0);
    while t < t_end - eps {
        let h = dt.min(t_end - t);
        let results: Vec<Result<CurveJet, CurveError>> = local
            .par_iter()
            .map(|d| build_jet(d, ambient, t, order))
            .collect();
        let lo = results.iter().take_while(|r| matches!(r, Err(e) if is_domain_error(e))).count();
        let hi = results.len()
            - results
                .iter()
                .rev()
                .take_while(|r| matches!(r, Err(e) if is_domain_error(e)))
                .count();
        if lo >= hi {
            return Err(CurveError::InvalidState("every node left the ambient validity box".into()));
        }
        let jets = results
            .into_iter()
            .skip(lo)
            .take(hi - lo)
            .collect::<Result<Vec<_>, _>>()?;
        let step = finish_step(jets, t, h)?;
        t += h;
        local = step.next;
        states.push(step.state);
    }
    Ok(states)
}
