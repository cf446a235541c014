//! Method of lines: fourth-order differences in ξ, classical Runge–Kutta
//! in time, and an exponential mode filter after every step.
//!
//! The curve system is not hyperbolic, so unfiltered grid solutions grow
//! at the grid scale. The filter damps that growth; when growth outpaces
//! it the run stops instead of returning noise.

use serde::{Deserialize, Serialize};

use super::stencil::{self, ModeFilter};
use super::{curve_rhs, AmbientState, CurveError, CurveRates, CurveState};
use crate::series::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FilterParams {
    pub alpha: f64,
    pub order: i32,
    /// Abort threshold for the top-third mode amplitude, relative to
    /// `1 + max|f|`.
    pub high_mode_tol: f64,
    pub enabled: bool,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            alpha: 36.0,
            order: 8,
            high_mode_tol: 1e-6,
            enabled: true,
        }
    }
}

/// A filter prepared for one grid size.
#[derive(Debug)]
pub struct MolFilter {
    params: FilterParams,
    modes: ModeFilter,
}

impl MolFilter {
    pub fn new(n: usize, params: FilterParams) -> Self {
        Self {
            params,
            modes: ModeFilter::new(n, params.alpha, params.order),
        }
    }

    fn apply(&self, h: f64, t: f64, name: &'static str, f: &mut [f64]) -> Result<(), CurveError> {
        if !self.params.enabled {
            return Ok(());
        }
        let scale = 1.0 + f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let amplitude = self.modes.apply(h, f);
        let threshold = self.params.high_mode_tol * scale;
        if amplitude > threshold {
            return Err(CurveError::HighModeGrowth {
                field: name,
                t,
                amplitude,
                threshold,
            });
        }
        Ok(())
    }
}

fn advance(s: &CurveState, r: &CurveRates, h: f64) -> CurveState {
    let add = |a: &[Vec2], b: &[Vec2]| a.iter().zip(b).map(|(x, d)| *x + *d * h).collect();
    CurveState {
        t: s.t + h,
        xi: s.xi.clone(),
        y: add(&s.y, &r.y_t),
        eta: s.eta.iter().zip(&r.eta_t).map(|(x, d)| x + d * h).collect(),
        v: add(&s.v, &r.v_t),
        p: add(&s.p, &r.p_t),
    }
}

fn rk4_combine(s: &CurveState, k: [&CurveRates; 4], dt: f64) -> CurveState {
    let w = [dt / 6.0, dt / 3.0, dt / 3.0, dt / 6.0];
    let mut out = s.clone();
    out.t = s.t + dt;
    for (r, wi) in k.iter().zip(w) {
        for i in 0..s.len() {
            out.y[i] = out.y[i] + r.y_t[i] * wi;
            out.eta[i] += r.eta_t[i] * wi;
            out.v[i] = out.v[i] + r.v_t[i] * wi;
            out.p[i] = out.p[i] + r.p_t[i] * wi;
        }
    }
    out
}

fn filter_state(s: &mut CurveState, f: &MolFilter, h: f64) -> Result<(), CurveError> {
    let t = s.t;
    let vec2 = |vals: &mut Vec<Vec2>, names: [&'static str; 2]| -> Result<(), CurveError> {
        let (mut xs, mut ys) = stencil::split(vals);
        f.apply(h, t, names[0], &mut xs)?;
        f.apply(h, t, names[1], &mut ys)?;
        *vals = stencil::zip(&xs, &ys);
        Ok(())
    };
    vec2(&mut s.y, ["y1", "y2"])?;
    vec2(&mut s.v, ["v1", "v2"])?;
    vec2(&mut s.p, ["p1", "p2"])?;
    f.apply(h, t, "eta", &mut s.eta)
}

/// One filtered Runge–Kutta step.
pub fn mol_step(
    state: &CurveState,
    ambient: &AmbientState,
    dt: f64,
    params: &FilterParams,
) -> Result<CurveState, CurveError> {
    let filter = MolFilter::new(state.len().max(stencil::MIN_NODES), *params);
    mol_step_with(state, ambient, dt, &filter)
}

pub(crate) fn mol_step_with(
    state: &CurveState,
    ambient: &AmbientState,
    dt: f64,
    filter: &MolFilter,
) -> Result<CurveState, CurveError> {
    let h = state.spacing()?;
    let k1 = curve_rhs(state, ambient)?;
    let k2 = curve_rhs(&advance(state, &k1, 0.5 * dt), ambient)?;
    let k3 = curve_rhs(&advance(state, &k2, 0.5 * dt), ambient)?;
    let k4 = curve_rhs(&advance(state, &k3, dt), ambient)?;
    let mut next = rk4_combine(state, [&k1, &k2, &k3, &k4], dt);
    filter_state(&mut next, filter, h)?;
    next.validate()?;
    Ok(next)
}

// Nodes near an end whose one-sided stencil data would leave the box over
// the next step are dropped two at a time.
fn trim_to_box(state: &CurveState, ambient: &AmbientState, dt: f64) -> CurveState {
    let inside = |i: usize| {
        let y = state.y[i];
        let ahead = y + state.v[i] * dt;
        ambient.contains(state.t, y) && ambient.contains(state.t + dt, ahead)
    };
    let n = state.len();
    let mut lo = 0;
    let mut hi = n;
    while lo < hi && (lo..(lo + 2).min(hi)).any(|i| !inside(i)) {
        lo += 2;
    }
    while hi > lo && ((hi.saturating_sub(2)).max(lo)..hi).any(|i| !inside(i)) {
        hi = hi.saturating_sub(2);
    }
    if lo == 0 && hi == n {
        state.clone()
    } else {
        state.slice(lo..hi.max(lo))
    }
}

/// Filtered method-of-lines run from `initial.t` to `t_end`; every step's
/// state is returned.
pub fn evolve_mol(
    initial: &CurveState,
    ambient: &AmbientState,
    dt: f64,
    t_end: f64,
    params: &FilterParams,
) -> Result<Vec<CurveState>, CurveError> {
    if !(dt > 0.0) {
        return Err(CurveError::InvalidState("dt must be positive".into()));
    }
    initial.validate()?;
    let mut states = vec![initial.clone()];
    let mut cur = initial.clone();
    let mut filter = MolFilter::new(cur.len().max(stencil::MIN_NODES), *params);
    let eps = 1e-12 * t_end.abs().max(1.0);
    while cur.t < t_end - eps {
        let h = dt.min(t_end - cur.t);
        let trimmed = trim_to_box(&cur, ambient, h);
        if trimmed.len() < stencil::MIN_NODES {
            return Err(CurveError::InvalidState(format!(
                "window shrank to {} nodes at t = {}",
                trimmed.len(),
                cur.t
            )));
        }
        if trimmed.len() != filter.modes.len() {
            filter = MolFilter::new(trimmed.len(), *params);
        }
        cur = mol_step_with(&trimmed, ambient, h, &filter)?;
        states.push(cur.clone());
    }
    Ok(states)
}
