//! Sticky particles: ballistic flight, and perfectly inelastic merging when
//! two particles come within the collision radius.

mod accretion;

pub use accretion::{sample_accretion_scenario, AccretionConfig, AccretionEstimate};

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::series::Vec2;

#[derive(Debug, Error)]
pub enum ParticleError {
    #[error("particles {i} and {j} start within the collision radius ({distance:e})")]
    Overlap { i: usize, j: usize, distance: f64 },
    #[error("invalid particle input: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub mass: f64,
    pub x: Vec2,
    pub v: Vec2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParticleSystem {
    pub particles: Vec<Particle>,
    #[serde(default = "default_radius")]
    pub collision_radius: f64,
    #[serde(default)]
    pub time: f64,
}

fn default_radius() -> f64 {
    1e-9
}

impl ParticleSystem {
    pub fn new(particles: Vec<Particle>, collision_radius: f64) -> Self {
        Self {
            particles,
            collision_radius,
            time: 0.0,
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.particles.iter().map(|p| p.mass).sum()
    }

    pub fn total_momentum(&self) -> Vec2 {
        self.particles.iter().fold(Vec2::default(), |m, p| m + p.v * p.mass)
    }

    fn validate(&self) -> Result<(), ParticleError> {
        if !(self.collision_radius >= 0.0) {
            return Err(ParticleError::Invalid("collision radius must be nonnegative".into()));
        }
        for (i, p) in self.particles.iter().enumerate() {
            if !(p.mass > 0.0) || !p.x.x.is_finite() || !p.x.y.is_finite() || !p.v.x.is_finite() || !p.v.y.is_finite() {
                return Err(ParticleError::Invalid(format!("particle {i} needs positive mass and finite state")));
            }
        }
        for i in 0..self.particles.len() {
            for j in i + 1..self.particles.len() {
                let d = (self.particles[i].x - self.particles[j].x).norm();
                if d <= self.collision_radius {
                    return Err(ParticleError::Overlap { i, j, distance: d });
                }
            }
        }
        Ok(())
    }
}

/// One merge. `i < j` are indices into the initial particle list; the
/// compound particle keeps index `i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MergeEvent {
    pub t: f64,
    pub i: usize,
    pub j: usize,
    pub mass: f64,
    pub x: Vec2,
    pub v: Vec2,
}

#[derive(Debug, Clone, Serialize)]
pub struct StickyRun {
    pub events: Vec<MergeEvent>,
    /// Surviving particles at the final time, with their initial indices.
    pub survivors: Vec<usize>,
    pub state: ParticleSystem,
}

// Time after `now` at which two particles first come within `r`, if ever.
fn meeting_time(a: &Particle, b: &Particle, r: f64) -> Option<f64> {
    let dx = b.x - a.x;
    let dv = b.v - a.v;
    let qa = dv.dot(dv);
    let qb = 2.0 * dx.dot(dv);
    let qc = dx.dot(dx) - r * r;
    if qa == 0.0 {
        return None;
    }
    if qc <= 0.0 {
        return (qb <= 0.0).then_some(0.0);
    }
    if qb >= 0.0 {
        return None;
    }
    let disc = qb * qb - 4.0 * qa * qc;
    let t_min = -qb / (2.0 * qa);
    if disc >= 0.0 {
        let t = (-qb - disc.sqrt()) / (2.0 * qa);
        return Some(t.max(0.0));
    }
    // Grazing within rounding counts as contact at closest approach.
    let closest = (dx + dv * t_min).norm();
    (closest <= r + 1e-12 * (1.0 + dx.norm())).then_some(t_min)
}

#[derive(Debug, PartialEq)]
struct Pending {
    t: f64,
    i: usize,
    j: usize,
}

impl Eq for Pending {}

impl Ord for Pending {
    // Reversed so the heap pops the earliest event, lowest indices first.
    fn cmp(&self, o: &Self) -> Ordering {
        o.t.total_cmp(&self.t).then(o.i.cmp(&self.i)).then(o.j.cmp(&self.j))
    }
}

impl PartialOrd for Pending {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

fn schedule(alive: &[Option<Particle>], r: f64) -> BinaryHeap<Pending> {
    let mut heap = BinaryHeap::new();
    for i in 0..alive.len() {
        let Some(a) = &alive[i] else { continue };
        for j in i + 1..alive.len() {
            let Some(b) = &alive[j] else { continue };
            if let Some(t) = meeting_time(a, b, r) {
                heap.push(Pending { t, i, j });
            }
        }
    }
    heap
}

fn drift(alive: &mut [Option<Particle>], dt: f64) {
    for p in alive.iter_mut().flatten() {
        p.x = p.x + p.v * dt;
    }
}

/// Runs the system to `t_end`, or to its last merge when `t_end` is
/// infinite.
pub fn simulate_sticky(ps: &ParticleSystem, t_end: f64) -> Result<StickyRun, ParticleError> {
    ps.validate()?;
    if !(t_end >= ps.time) {
        return Err(ParticleError::Invalid(format!("end time {t_end} precedes start time {}", ps.time)));
    }
    let r = ps.collision_radius;
    let mut alive: Vec<Option<Particle>> = ps.particles.iter().copied().map(Some).collect();
    let mut now = ps.time;
    let mut events = Vec::new();
    loop {
        let next = schedule(&alive, r).pop();
        let Some(ev) = next.filter(|e| now + e.t <= t_end) else {
            break;
        };
        drift(&mut alive, ev.t);
        now += ev.t;
        let a = alive[ev.i].take().expect("live particle");
        let b = alive[ev.j].take().expect("live particle");
        let mass = a.mass + b.mass;
        let merged = Particle {
            mass,
            x: (a.x * a.mass + b.x * b.mass) * (1.0 / mass),
            v: (a.v * a.mass + b.v * b.mass) * (1.0 / mass),
        };
        alive[ev.i] = Some(merged);
        events.push(MergeEvent {
            t: now,
            i: ev.i,
            j: ev.j,
            mass,
            x: merged.x,
            v: merged.v,
        });
    }
    if t_end.is_finite() {
        drift(&mut alive, t_end - now);
        now = t_end;
    }
    let survivors: Vec<usize> = (0..alive.len()).filter(|&i| alive[i].is_some()).collect();
    Ok(StickyRun {
        events,
        state: ParticleSystem {
            particles: alive.into_iter().flatten().collect(),
            collision_radius: r,
            time: now,
        },
        survivors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(mass: f64, x: [f64; 2], v: [f64; 2]) -> Particle {
        Particle {
            mass,
            x: x.into(),
            v: v.into(),
        }
    }

    #[test]
    fn head_on_pair() {
        let ps = ParticleSystem::new(vec![p(1.0, [-1.0, 0.0], [1.0, 0.0]), p(1.0, [1.0, 0.0], [-1.0, 0.0])], 0.0);
        let run = simulate_sticky(&ps, 5.0).unwrap();
        assert_eq!(run.events.len(), 1);
        let e = run.events[0];
        assert_eq!(e.t, 1.0);
        assert_eq!(e.x, Vec2::new(0.0, 0.0));
        assert_eq!(e.v, Vec2::new(0.0, 0.0));
        assert_eq!(run.state.time, 5.0);
        assert_eq!(run.survivors, vec![0]);
    }

    #[test]
    fn unequal_masses_average_momentum() {
        let ps = ParticleSystem::new(vec![p(1.0, [-1.0, 0.0], [1.0, 0.0]), p(2.0, [1.0, 0.0], [-1.0, 0.0])], 0.0);
        let run = simulate_sticky(&ps, f64::INFINITY).unwrap();
        assert!((run.events[0].v - Vec2::new(-1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert_eq!(run.state.particles[0].mass, 3.0);
    }

    #[test]
    fn simultaneous_events_break_ties_by_index() {
        // 0 and 1 meet at t = 1, as do 2 and 3.
        let ps = ParticleSystem::new(
            vec![
                p(1.0, [2.0, 5.0], [-1.0, 0.0]),
                p(1.0, [0.0, 5.0], [1.0, 0.0]),
                p(1.0, [-1.0, 0.0], [1.0, 0.0]),
                p(1.0, [1.0, 0.0], [-1.0, 0.0]),
            ],
            0.0,
        );
        let run = simulate_sticky(&ps, 3.0).unwrap();
        assert_eq!(run.events.len(), 2);
        assert_eq!((run.events[0].i, run.events[0].j), (0, 1));
        assert_eq!((run.events[1].i, run.events[1].j), (2, 3));
    }

    #[test]
    fn overlapping_start_is_rejected() {
        let ps = ParticleSystem::new(vec![p(1.0, [0.0, 0.0], [0.0, 0.0]), p(1.0, [0.0, 0.0], [1.0, 0.0])], 0.0);
        assert!(matches!(simulate_sticky(&ps, 1.0), Err(ParticleError::Overlap { .. })));
    }

    #[test]
    fn missing_pair_never_merges() {
        let ps = ParticleSystem::new(vec![p(1.0, [-1.0, 0.0], [1.0, 0.0]), p(1.0, [1.0, 0.1], [-1.0, 0.0])], 1e-9);
        let run = simulate_sticky(&ps, 10.0).unwrap();
        assert!(run.events.is_empty());
        assert_eq!(run.state.particles.len(), 2);
    }
}
