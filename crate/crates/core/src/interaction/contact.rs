use serde::Serialize;

use super::{ContactCase, ContactMap, ContactPoint, CurveEvolution, InteractionError};
use crate::series::{Mat2, Vec2};

const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_ITER: usize = 30;
const CONTACT_TOL: f64 = 1e-9;
const ANGLE_TOL: f64 = 1e-8;

struct Solved {
    t: f64,
    s: f64,
    dt: f64,
    ds: f64,
    residual: f64,
}

// Rows of the projected contact equations `rows · (γ₁(ξ, t) − γ₂(s, t)) = 0`.
struct System<'a, C1: ?Sized, C2: ?Sized> {
    c1: &'a C1,
    c2: &'a C2,
    rows: [Vec2; 2],
}

impl<C1: CurveEvolution + ?Sized, C2: CurveEvolution + ?Sized> System<'_, C1, C2> {
    fn residual_and_jacobian(&self, xi: f64, t: f64, s: f64) -> (Vec2, Mat2, Vec2) {
        let a = self.c1.node(xi, t);
        let b = self.c2.node(s, t);
        let gap = a.y - b.y;
        let dv = a.v - b.v;
        let [r1, r2] = self.rows;
        let f = Vec2::new(r1.dot(gap), r2.dot(gap));
        let j = Mat2::new(r1.dot(dv), -r1.dot(b.p), r2.dot(dv), -r2.dot(b.p));
        let dxi = Vec2::new(r1.dot(a.p), r2.dot(a.p));
        (f, j, dxi)
    }

    fn solve(&self, xi: f64, mut t: f64, mut s: f64) -> Option<Solved> {
        for _ in 0..NEWTON_MAX_ITER {
            let (f, j, dxi) = self.residual_and_jacobian(xi, t, s);
            let step = j.solve(f)?;
            if !(step.x.is_finite() && step.y.is_finite()) {
                return None;
            }
            t -= step.x;
            s -= step.y;
            if step.max_abs() <= NEWTON_TOL * (1.0 + t.abs().max(s.abs())) {
                let (f, j, _) = self.residual_and_jacobian(xi, t, s);
                let d = j.solve(-dxi)?;
                return Some(Solved {
                    t,
                    s,
                    dt: d.x,
                    ds: d.y,
                    residual: f.max_abs(),
                });
            }
        }
        None
    }

    // Marches outward from the node nearest the contact, warm-starting each
    // node from its neighbour's value and slope.
    fn march(&self, case: ContactCase, at: ContactPoint, xi: &[f64]) -> Result<ContactMap, InteractionError> {
        if xi.is_empty() || xi.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(InteractionError::Invalid("ξ-grid must be nonempty and increasing".into()));
        }
        let (_, j, dxi) = self.residual_and_jacobian(at.xi0, at.t0, at.s0);
        let d0 = j.solve(-dxi).ok_or(InteractionError::DegenerateGeometry)?;
        let i0 = (0..xi.len())
            .min_by(|&a, &b| (xi[a] - at.xi0).abs().total_cmp(&(xi[b] - at.xi0).abs()))
            .unwrap();
        let h0 = xi[i0] - at.xi0;
        let first = self
            .solve(xi[i0], at.t0 + d0.x * h0, at.s0 + d0.y * h0)
            .ok_or_else(|| InteractionError::NewtonFailed {
                xi: xi[i0],
                residual: self.residual_and_jacobian(xi[i0], at.t0, at.s0).0.max_abs(),
            })?;

        let mut truncated = false;
        let mut run = |range: &mut dyn Iterator<Item = usize>| -> Vec<(usize, Solved)> {
            let mut out = Vec::new();
            let (mut x, mut prev) = (xi[i0], (first.t, first.s, first.dt, first.ds));
            for i in range {
                let h = xi[i] - x;
                match self.solve(xi[i], prev.0 + prev.2 * h, prev.1 + prev.3 * h) {
                    Some(sol) => {
                        x = xi[i];
                        prev = (sol.t, sol.s, sol.dt, sol.ds);
                        out.push((i, sol));
                    }
                    None => {
                        truncated = true;
                        break;
                    }
                }
            }
            out
        };
        let right = run(&mut (i0 + 1..xi.len()));
        let left = run(&mut (0..i0).rev());

        let mut nodes: Vec<(usize, Solved)> = left.into_iter().rev().collect();
        nodes.push((i0, first));
        nodes.extend(right);
        Ok(ContactMap {
            case,
            contact: at,
            xi: nodes.iter().map(|(i, _)| xi[*i]).collect(),
            t_sharp: nodes.iter().map(|(_, n)| n.t).collect(),
            s_sharp: nodes.iter().map(|(_, n)| n.s).collect(),
            dt_dxi: nodes.iter().map(|(_, n)| n.dt).collect(),
            ds_dxi: nodes.iter().map(|(_, n)| n.ds).collect(),
            residual: nodes.iter().map(|(_, n)| n.residual).fold(0.0, f64::max),
            truncated,
        })
    }
}

fn check_contact(a: Vec2, b: Vec2) -> Result<(), InteractionError> {
    let gap = (a - b).norm();
    if gap > CONTACT_TOL * (1.0 + a.norm()) {
        return Err(InteractionError::Separated { gap });
    }
    Ok(())
}

/// Contact map for two curves touching tangentially at `at`.
///
/// In the frame `e₁ = γ₁'/|γ₁'|`, `e₂ = e₁^⊥`, curve 1 must lie below
/// curve 2 near the contact (`κ₁ < κ₂`) and move toward it faster
/// (`⟨e₂, v₁ − v₂⟩ > 0`).
pub fn solve_tangential_contact<C1, C2>(
    c1: &C1,
    c2: &C2,
    at: ContactPoint,
    xi: &[f64],
) -> Result<ContactMap, InteractionError>
where
    C1: CurveEvolution + ?Sized,
    C2: CurveEvolution + ?Sized,
{
    let a = c1.node(at.xi0, at.t0);
    let b = c2.node(at.s0, at.t0);
    check_contact(a.y, b.y)?;
    let e1 = a.p.normalized();
    let e2 = e1.perp();
    if e1.dot(b.p) <= 0.0 {
        return Err(InteractionError::WrongOrientation);
    }
    let sine = a.p.cross(b.p) / (a.p.norm() * b.p.norm());
    if sine.abs() > ANGLE_TOL {
        return Err(InteractionError::NotTangent { sine });
    }
    let normal_speed = e2.dot(a.v - b.v);
    if !(normal_speed > 0.0) {
        return Err(InteractionError::NoContact { normal_speed });
    }
    let k1 = e2.dot(c1.second_tangent(at.xi0, at.t0)) / e1.dot(a.p).powi(2);
    let k2 = e2.dot(c2.second_tangent(at.s0, at.t0)) / e1.dot(b.p).powi(2);
    if !(k1 < k2) {
        return Err(InteractionError::CurvatureOrder { k1, k2 });
    }
    System { c1, c2, rows: [e1, e2] }.march(ContactCase::Tangential, at, xi)
}

/// Geometry of an endpoint contact and the resulting contact map.
#[derive(Debug, Clone, Serialize)]
pub struct EndpointContact {
    /// Unit normals `γ'^⊥/|γ'|` at the contact, frozen.
    pub normals: [Vec2; 2],
    /// `⟨n̄₁, ∂_s γ₂⟩`.
    pub b: f64,
    /// Velocity of the intersection point.
    pub q_dot: Vec2,
    /// `t♯'` and `s♯'` at the contact, in closed form.
    pub dt_dxi: f64,
    pub ds_dxi: f64,
    pub map: ContactMap,
}

/// Contact map for two curves meeting at a common endpoint with
/// transversal tangents, curve 2 turned counterclockwise from curve 1.
pub fn solve_endpoint_contact<C1, C2>(
    c1: &C1,
    c2: &C2,
    at: ContactPoint,
    xi: &[f64],
) -> Result<EndpointContact, InteractionError>
where
    C1: CurveEvolution + ?Sized,
    C2: CurveEvolution + ?Sized,
{
    let a = c1.node(at.xi0, at.t0);
    let b = c2.node(at.s0, at.t0);
    check_contact(a.y, b.y)?;
    let sine = a.p.cross(b.p) / (a.p.norm() * b.p.norm());
    if sine.abs() <= ANGLE_TOL {
        return Err(InteractionError::DegenerateGeometry);
    }
    if sine < 0.0 {
        return Err(InteractionError::WrongOrientation);
    }
    let n1 = a.p.perp().normalized();
    let n2 = b.p.perp().normalized();
    let dv = a.v - b.v;
    let (dn1, dn2) = (n1.dot(dv), n2.dot(dv));
    if !(dn1 >= 0.0 && dn2 > 0.0) {
        return Err(InteractionError::NonMerging { n1: dn1, n2: dn2 });
    }
    let bb = n1.dot(b.p);
    let q_dot = Mat2::new(n1.x, n1.y, n2.x, n2.y)
        .solve(Vec2::new(n1.dot(a.v), n2.dot(b.v)))
        .ok_or(InteractionError::DegenerateGeometry)?;
    let n2p1 = n2.dot(a.p);
    let dt_dxi = -n2p1 / dn2;
    let ds_dxi = -dn1 * n2p1 / (bb * dn2);
    let map = System { c1, c2, rows: [n1, n2] }.march(ContactCase::Endpoint, at, xi)?;
    Ok(EndpointContact {
        normals: [n1, n2],
        b: bb,
        q_dot,
        dt_dxi,
        ds_dxi,
        map,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{build_jet, stencil::uniform_nodes, AmbientState, CurveData, CurveJet};

    fn jet(y: [&[f64]; 2], v: [&[f64]; 2]) -> CurveJet {
        let d = CurveData::from_coeffs(0.0, 8, y, &[1.0], v).unwrap();
        build_jet(&d, &AmbientState::vacuum(), 0.0, 8).unwrap()
    }

    fn contact() -> ContactPoint {
        ContactPoint { t0: 0.0, xi0: 0.0, s0: 0.0 }
    }

    #[test]
    fn parabolas_meet_at_twice_xi_squared() {
        let g1 = jet([&[0.0, 1.0], &[0.0, 0.0, -1.0]], [&[0.0], &[1.0]]);
        let g2 = jet([&[0.0, 1.0], &[0.0, 0.0, 1.0]], [&[], &[]]);
        let xi = uniform_nodes(-0.2, 0.2, 41);
        let map = solve_tangential_contact(&g1, &g2, contact(), &xi).unwrap();
        assert!(!map.truncated);
        assert_eq!(map.len(), 41);
        for i in 0..map.len() {
            let x = map.xi[i];
            assert!((map.t_sharp[i] - 2.0 * x * x).abs() < 1e-12);
            assert!((map.s_sharp[i] - x).abs() < 1e-12);
            assert!((map.dt_dxi[i] - 4.0 * x).abs() < 1e-10);
            assert!((map.ds_dxi[i] - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn tangential_preconditions() {
        let below = jet([&[0.0, 1.0], &[0.0, 0.0, -1.0]], [&[0.0], &[1.0]]);
        let above = jet([&[0.0, 1.0], &[0.0, 0.0, 1.0]], [&[], &[]]);
        let xi = uniform_nodes(-0.1, 0.1, 5);
        let e = solve_tangential_contact(&above, &below, contact(), &xi).unwrap_err();
        assert!(matches!(e, InteractionError::NoContact { .. }), "{e}");
        let flat_fast = jet([&[0.0, 1.0], &[0.0, 0.0, 2.0]], [&[0.0], &[1.0]]);
        let e = solve_tangential_contact(&flat_fast, &above, contact(), &xi).unwrap_err();
        assert!(matches!(e, InteractionError::CurvatureOrder { .. }), "{e}");
        let tilted = jet([&[0.0, 1.0], &[0.0, 0.5]], [&[0.0], &[1.0]]);
        let e = solve_tangential_contact(&tilted, &above, contact(), &xi).unwrap_err();
        assert!(matches!(e, InteractionError::NotTangent { .. }), "{e}");
        let apart = jet([&[0.0, 1.0], &[-0.1, 0.0, -1.0]], [&[0.0], &[1.0]]);
        let e = solve_tangential_contact(&apart, &above, contact(), &xi).unwrap_err();
        assert!(matches!(e, InteractionError::Separated { .. }), "{e}");
    }

    fn crossed(m1: &[f64], m2: &[f64]) -> (CurveJet, CurveJet) {
        (
            jet([&[0.0, 1.0], m1], [&[0.0], &[1.0]]),
            jet([&[0.0, 1.0], m2], [&[0.0], &[-1.0]]),
        )
    }

    #[test]
    fn crossed_lines() {
        let (g1, g2) = crossed(&[0.0, -1.0], &[0.0, 1.0]);
        let xi = uniform_nodes(0.0, 0.2, 11);
        let ep = solve_endpoint_contact(&g1, &g2, contact(), &xi).unwrap();
        assert!((ep.q_dot - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        assert!((ep.dt_dxi - 1.0).abs() < 1e-15);
        assert!((ep.ds_dxi - 1.0).abs() < 1e-15);
        for i in 0..ep.map.len() {
            assert!((ep.map.t_sharp[i] - ep.map.xi[i]).abs() < 1e-14);
            assert!((ep.map.s_sharp[i] - ep.map.xi[i]).abs() < 1e-14);
        }
    }

    #[test]
    fn endpoint_slopes_match_finite_differences() {
        let g1 = jet([&[0.0, 1.0], &[0.0, -1.0, 0.3, 0.5]], [&[0.0], &[1.0]]);
        let g2 = jet([&[0.0, 1.0, 0.2], &[0.0, 1.0, 0.2]], [&[0.3], &[-1.0]]);
        let err = |h: f64| {
            let ep = solve_endpoint_contact(&g1, &g2, contact(), &[-h, 0.0, h]).unwrap();
            let m = &ep.map;
            let ft = (m.t_sharp[2] - m.t_sharp[0]) / (2.0 * h);
            let fs = (m.s_sharp[2] - m.s_sharp[0]) / (2.0 * h);
            (ft - ep.dt_dxi).abs().max((fs - ep.ds_dxi).abs())
        };
        let (e1, e2) = (err(0.02), err(0.01));
        assert!(e1 > 0.0 && e2 < 0.3 * e1, "{e1} {e2}");
        assert!(e2 < 1e-3, "{e2}");
    }

    #[test]
    fn endpoint_preconditions() {
        let (g1, g2) = crossed(&[0.0, 1.0], &[0.0, 1.0]);
        let xi = [0.0, 0.1];
        let e = solve_endpoint_contact(&g1, &g2, contact(), &xi).unwrap_err();
        assert!(matches!(e, InteractionError::DegenerateGeometry), "{e}");
        let apart = jet([&[0.0, 1.0], &[0.0, -1.0]], [&[0.0], &[-1.0]]);
        let still = jet([&[0.0, 1.0], &[0.0, 1.0]], [&[], &[]]);
        let e = solve_endpoint_contact(&apart, &still, contact(), &xi).unwrap_err();
        assert!(matches!(e, InteractionError::NonMerging { .. }), "{e}");
    }
}
