//! Monte Carlo estimate of the rate at which a curve sweeps up ambient gas.
//!
//! The ambient gas near the curve is replaced by super-particles, one per
//! cell of a jittered grid, each carrying `ρ × cell area` and moving with
//! the ambient velocity of its side. The curve is a polyline whose nodes
//! move with their own velocities; a particle is absorbed when it first
//! crosses a segment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ParticleError;
use crate::curve::{AmbientState, CurveState};
use crate::series::Vec2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccretionConfig {
    pub n_particles: usize,
    /// Window `[ξa, ξb]` over which absorptions are counted.
    pub window: (f64, f64),
    pub duration: f64,
    pub seed: u64,
    /// Batches used for the error bar.
    #[serde(default = "default_batches")]
    pub batches: usize,
}

fn default_batches() -> usize {
    16
}

/// Rates per unit `ξ` with one-standard-error bars.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AccretionEstimate {
    pub mass_rate: f64,
    pub mass_rate_err: f64,
    pub momentum_rate: Vec2,
    pub momentum_rate_err: f64,
    pub absorbed: usize,
    pub seeded: usize,
}

struct Segment {
    a: Vec2,
    b: Vec2,
    va: Vec2,
    vb: Vec2,
    xi: (f64, f64),
}

impl Segment {
    // First time in (0, t_max] at which `x + v t` lies on the moving
    // segment, with the ξ of the crossing point.
    fn crossing(&self, x: Vec2, v: Vec2, t_max: f64) -> Option<(f64, f64)> {
        // cross(B − A, P − A) is quadratic in t
        let e0 = self.b - self.a;
        let e1 = self.vb - self.va;
        let d0 = x - self.a;
        let d1 = v - self.va;
        let c2 = e1.cross(d1);
        let c1 = e0.cross(d1) + e1.cross(d0);
        let c0 = e0.cross(d0);
        let mut roots = Vec::with_capacity(2);
        if c2.abs() <= 1e-14 * (c1.abs() + c0.abs()) {
            if c1 != 0.0 {
                roots.push(-c0 / c1);
            }
        } else {
            let disc = c1 * c1 - 4.0 * c2 * c0;
            if disc >= 0.0 {
                let q = -0.5 * (c1 + c1.signum() * disc.sqrt());
                roots.push(q / c2);
                if q != 0.0 {
                    roots.push(c0 / q);
                }
            }
        }
        roots.sort_by(f64::total_cmp);
        roots.into_iter().filter(|&t| t > 0.0 && t <= t_max).find_map(|t| {
            let e = e0 + e1 * t;
            let d = d0 + d1 * t;
            let lam = d.dot(e) / e.dot(e);
            (0.0..=1.0).contains(&lam).then_some((t, self.xi.0 + lam * (self.xi.1 - self.xi.0)))
        })
    }

    fn side(&self, x: Vec2) -> (f64, f64) {
        let e = self.b - self.a;
        let lam = ((x - self.a).dot(e) / e.dot(e)).clamp(0.0, 1.0);
        let dist = (x - (self.a + e * lam)).norm();
        (dist, e.cross(x - self.a))
    }
}

/// Seeds ambient gas around the window and measures what the curve
/// absorbs over `config.duration`.
pub fn sample_accretion_scenario(
    curve: &CurveState,
    ambient: &AmbientState,
    config: &AccretionConfig,
) -> Result<AccretionEstimate, ParticleError> {
    let (xa, xb) = config.window;
    if !(xb > xa) || !(config.duration > 0.0) || config.n_particles == 0 || config.batches == 0 {
        return Err(ParticleError::Invalid("need a nonempty window, positive duration and particles".into()));
    }
    if curve.len() < 2 {
        return Err(ParticleError::Invalid("curve needs at least two nodes".into()));
    }
    let segs: Vec<Segment> = (0..curve.len() - 1)
        .map(|i| Segment {
            a: curve.y[i],
            b: curve.y[i + 1],
            va: curve.v[i],
            vb: curve.v[i + 1],
            xi: (curve.xi[i], curve.xi[i + 1]),
        })
        .collect();

    let t0 = curve.t;
    let win: Vec<usize> = (0..curve.len()).filter(|&i| curve.xi[i] >= xa && curve.xi[i] <= xb).collect();
    if win.is_empty() {
        return Err(ParticleError::Invalid("window contains no curve nodes".into()));
    }
    let mut lo = curve.y[win[0]];
    let mut hi = lo;
    let mut speed: f64 = 0.0;
    for &i in &win {
        let y = curve.y[i];
        lo = Vec2::new(lo.x.min(y.x), lo.y.min(y.y));
        hi = Vec2::new(hi.x.max(y.x), hi.y.max(y.y));
        let a = ambient
            .sample(t0, y)
            .map_err(|e| ParticleError::Invalid(e.to_string()))?;
        speed = speed.max((a.v_plus - curve.v[i]).norm()).max((a.v_minus - curve.v[i]).norm());
    }
    let extent = (hi - lo).norm().max(xb - xa);
    let reach = (1.2 * speed * config.duration).max(1e-3 * extent);
    let lo = lo - Vec2::new(reach, reach);
    let hi = hi + Vec2::new(reach, reach);
    let size = hi - lo;

    let aspect = size.x / size.y;
    let nx = ((config.n_particles as f64 * aspect).sqrt().round() as usize).clamp(1, config.n_particles);
    let ny = (config.n_particles / nx).max(1);
    let cell = Vec2::new(size.x / nx as f64, size.y / ny as f64);
    let area = cell.x * cell.y;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let nb = config.batches;
    let mut mass = vec![0.0; nb];
    let mut momentum = vec![Vec2::default(); nb];
    let mut absorbed = 0;
    for k in 0..nx * ny {
        let (ix, iy) = (k % nx, k / nx);
        let x = Vec2::new(
            lo.x + (ix as f64 + rng.gen::<f64>()) * cell.x,
            lo.y + (iy as f64 + rng.gen::<f64>()) * cell.y,
        );
        let batch = rng.gen_range(0..nb);
        let nearest = segs
            .iter()
            .map(|s| s.side(x))
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .expect("segments");
        let Ok(a) = ambient.sample(t0, x) else { continue };
        // the + side is the one the normal p^⊥ points into
        let (rho, v) = if nearest.1 > 0.0 { (a.rho_plus, a.v_plus) } else { (a.rho_minus, a.v_minus) };
        if rho <= 0.0 {
            continue;
        }
        let hit = segs
            .iter()
            .filter_map(|s| s.crossing(x, v, config.duration))
            .min_by(|a, b| a.0.total_cmp(&b.0));
        if let Some((_, xi)) = hit {
            if xi >= xa && xi <= xb {
                let m = rho * area;
                mass[batch] += m;
                momentum[batch] = momentum[batch] + v * m;
                absorbed += 1;
            }
        }
    }

    let norm = 1.0 / ((xb - xa) * config.duration);
    let total_mass: f64 = mass.iter().sum();
    let total_mom = momentum.iter().fold(Vec2::default(), |s, m| s + *m);
    // batch totals scaled to full-sample estimates
    let err = |vals: &[f64], total: f64| {
        if nb < 2 {
            return 0.0;
        }
        let scaled: Vec<f64> = vals.iter().map(|v| v * nb as f64).collect();
        let var = scaled.iter().map(|s| (s - total).powi(2)).sum::<f64>() / (nb - 1) as f64;
        (var / nb as f64).sqrt()
    };
    let mx: Vec<f64> = momentum.iter().map(|m| m.x).collect();
    let my: Vec<f64> = momentum.iter().map(|m| m.y).collect();
    Ok(AccretionEstimate {
        mass_rate: total_mass * norm,
        mass_rate_err: err(&mass, total_mass) * norm,
        momentum_rate: total_mom * norm,
        momentum_rate_err: err(&mx, total_mom.x).max(err(&my, total_mom.y)) * norm,
        absorbed,
        seeded: nx * ny,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{stencil::uniform_nodes, CurveData};

    fn line() -> CurveState {
        CurveData::from_coeffs(0.0, 4, [&[0.0, 1.0], &[]], &[1.0], [&[], &[]])
            .unwrap()
            .state_on(&uniform_nodes(-1.0, 1.0, 41), 0.0)
            .unwrap()
    }

    fn config(n: usize, seed: u64) -> AccretionConfig {
        AccretionConfig {
            n_particles: n,
            window: (-0.5, 0.5),
            duration: 0.2,
            seed,
            batches: 16,
        }
    }

    #[test]
    fn slab_rate_is_two() {
        let amb = AmbientState::constant(1.0, 1.0, Vec2::new(0.0, -1.0), Vec2::new(0.0, 1.0));
        let est = sample_accretion_scenario(&line(), &amb, &config(10_000, 7)).unwrap();
        assert!((est.mass_rate - 2.0).abs() < 0.04, "{est:?}");
        assert!(est.momentum_rate.norm() < 0.04);
    }

    #[test]
    fn one_sided_and_vacuum() {
        let one = AmbientState::constant(1.0, 0.0, Vec2::new(0.0, -1.0), Vec2::new(0.0, 1.0));
        let est = sample_accretion_scenario(&line(), &one, &config(10_000, 3)).unwrap();
        assert!((est.mass_rate - 1.0).abs() < 0.02, "{est:?}");
        assert!((est.momentum_rate - Vec2::new(0.0, -1.0)).norm() < 0.02);
        let none = sample_accretion_scenario(&line(), &AmbientState::vacuum(), &config(1000, 3)).unwrap();
        assert_eq!(none.mass_rate, 0.0);
        assert_eq!(none.absorbed, 0);
    }

    #[test]
    fn same_seed_same_estimate() {
        let amb = AmbientState::constant(0.7, 1.3, Vec2::new(0.2, -1.0), Vec2::new(0.1, 0.5));
        let a = sample_accretion_scenario(&line(), &amb, &config(2000, 11)).unwrap();
        let b = sample_accretion_scenario(&line(), &amb, &config(2000, 11)).unwrap();
        assert_eq!(a, b);
    }
}
