use super::{merged_boundary_series, ContactPoint, InteractionError};
use crate::curve::{solve_cauchy, AmbientState, BoundaryData, CurveJet};
use crate::series::UniSeries;

// Positions of (Y₁, Y₂, W, Z₁, Z₂, P₁, P₂, τ).
const Z1: usize = 3;
const P1: usize = 5;

/// The merged system `A(x₁) U_{x₂} = B U_{x₁} + G̃` in `x₁ = ξ`,
/// `x₂ = t − t♯(ξ)`.
///
/// Since `∂_ξ = ∂_{x₁} − c ∂_{x₂}` with `c = t♯'`, the tangent equation
/// `p_t = v_ξ` reads `P_{x₂} + c Z_{x₂} = Z_{x₁} + V'`: `A` is the
/// identity plus `c` in the (P, Z) entries and `B` copies `Z_{x₁}` into
/// the P rows.
#[derive(Debug, Clone)]
pub struct MergedSystem {
    pub c: UniSeries,
}

impl MergedSystem {
    pub fn new(boundary: &BoundaryData) -> Self {
        Self {
            c: boundary.t_sharp.derivative(0),
        }
    }

    fn coupling(&self, x1: f64) -> f64 {
        self.c.eval([x1])
    }

    pub fn a_matrix(&self, x1: f64) -> [[f64; 8]; 8] {
        let c = self.coupling(x1);
        let mut a = identity();
        a[P1][Z1] = c;
        a[P1 + 1][Z1 + 1] = c;
        a
    }

    pub fn a_inverse(&self, x1: f64) -> [[f64; 8]; 8] {
        let c = self.coupling(x1);
        let mut a = identity();
        a[P1][Z1] = -c;
        a[P1 + 1][Z1 + 1] = -c;
        a
    }

    /// `A⁻¹ B`; `B` is constant, so only its two nonzero entries move.
    pub fn b_matrix(&self, x1: f64) -> [[f64; 8]; 8] {
        let _ = x1;
        let mut b = [[0.0; 8]; 8];
        b[P1][Z1] = 1.0;
        b[P1 + 1][Z1 + 1] = 1.0;
        b
    }

    /// `A⁻¹ g`.
    pub fn solve(&self, x1: f64, g: [f64; 8]) -> [f64; 8] {
        let inv = self.a_inverse(x1);
        std::array::from_fn(|i| (0..8).map(|j| inv[i][j] * g[j]).sum())
    }
}

fn identity() -> [[f64; 8]; 8] {
    std::array::from_fn(|i| std::array::from_fn(|j| if i == j { 1.0 } else { 0.0 }))
}

/// Boundary data, system and local solution of the merged curve about one
/// node of the contact front.
#[derive(Debug, Clone)]
pub struct MergedCauchy {
    pub boundary: BoundaryData,
    pub system: MergedSystem,
    pub jet: CurveJet,
}

/// Builds the merged curve's data on the front `t = t♯(ξ)` near `at` and
/// solves the merged system there by power series.
pub fn assemble_merged_cauchy_problem(
    j1: &CurveJet,
    j2: &CurveJet,
    at: ContactPoint,
    ambient: &AmbientState,
    order: usize,
) -> Result<MergedCauchy, InteractionError> {
    let boundary = merged_boundary_series(j1, j2, at, order)?;
    let jet = solve_cauchy(&boundary, ambient, order)?;
    Ok(MergedCauchy {
        system: MergedSystem::new(&boundary),
        boundary,
        jet,
    })
}
