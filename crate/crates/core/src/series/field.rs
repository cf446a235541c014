use super::{BiSeries, Mat2, SeriesError, Vec2};

/// Planar initial data: velocity `w = (w1, w2)` and optional density `ρ̄`.
///
/// Derivative series up to third order are built once at construction, so
/// Jacobians and Hessians are exact evaluations of the truncated polynomial.
#[derive(Debug, Clone)]
pub struct AnalyticField {
    w: [BiSeries; 2],
    rho_bar: Option<BiSeries>,
    // dw[i][j] = ∂_j w_i, d2w[i][j][k] = ∂_j ∂_k w_i
    dw: [[BiSeries; 2]; 2],
    d2w: [[[BiSeries; 2]; 2]; 2],
}

impl AnalyticField {
    pub fn new(w1: BiSeries, w2: BiSeries, rho_bar: Option<BiSeries>) -> Result<Self, SeriesError> {
        w1.is_compatible(&w2)?;
        if let Some(r) = &rho_bar {
            if r.center() != w1.center() {
                return Err(SeriesError::CenterMismatch(
                    w1.center().to_vec(),
                    r.center().to_vec(),
                ));
            }
        }
        let w = [w1, w2];
        let dw = std::array::from_fn(|i| std::array::from_fn(|j| w[i].derivative(j)));
        let d2w = std::array::from_fn(|i: usize| {
            std::array::from_fn(|j: usize| {
                std::array::from_fn(|k: usize| w[i].derivative(j).derivative(k))
            })
        });
        Ok(Self {
            w,
            rho_bar,
            dw,
            d2w,
        })
    }

    /// The linear field `w(x) = A (x - center)` with `ρ̄ ≡ 1`.
    pub fn linear(a: Mat2, max_degree: usize) -> Self {
        let c = [0.0, 0.0];
        let w1 = BiSeries::from_terms(c, max_degree, &[([1, 0], a.a11), ([0, 1], a.a12)]).unwrap();
        let w2 = BiSeries::from_terms(c, max_degree, &[([1, 0], a.a21), ([0, 1], a.a22)]).unwrap();
        Self::new(w1, w2, None).unwrap()
    }

    pub fn w1(&self) -> &BiSeries {
        &self.w[0]
    }

    pub fn w2(&self) -> &BiSeries {
        &self.w[1]
    }

    pub fn rho_bar(&self) -> Option<&BiSeries> {
        self.rho_bar.as_ref()
    }

    /// The `∂_j w_i` series.
    pub fn jacobian_series(&self) -> &[[BiSeries; 2]; 2] {
        &self.dw
    }

    pub fn center(&self) -> Vec2 {
        self.w[0].center().into()
    }

    pub fn radius(&self) -> f64 {
        self.w[0].radius()
    }

    pub fn check_in_box(&self, x: Vec2) -> Result<(), SeriesError> {
        self.w[0].check_in_box(x.to_array())
    }

    pub fn eval(&self, x: Vec2) -> Result<Vec2, SeriesError> {
        self.check_in_box(x)?;
        let p = x.to_array();
        Ok(Vec2::new(self.w[0].eval(p), self.w[1].eval(p)))
    }

    /// `Dw(x)` with rows indexed by component.
    pub fn jacobian(&self, x: Vec2) -> Result<Mat2, SeriesError> {
        self.check_in_box(x)?;
        let p = x.to_array();
        Ok(Mat2::new(
            self.dw[0][0].eval(p),
            self.dw[0][1].eval(p),
            self.dw[1][0].eval(p),
            self.dw[1][1].eval(p),
        ))
    }

    /// Hessians of `w1` and `w2`.
    pub fn hessian(&self, x: Vec2) -> Result<[Mat2; 2], SeriesError> {
        self.check_in_box(x)?;
        let p = x.to_array();
        Ok(std::array::from_fn(|i| {
            let h = &self.d2w[i];
            Mat2::new(h[0][0].eval(p), h[0][1].eval(p), h[1][0].eval(p), h[1][1].eval(p))
        }))
    }

    /// Initial density; a field without `ρ̄` carries unit density.
    pub fn density(&self, x: Vec2) -> Result<f64, SeriesError> {
        self.check_in_box(x)?;
        Ok(self
            .rho_bar
            .as_ref()
            .map_or(1.0, |r| r.eval(x.to_array())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_field_jacobians() {
        let f = AnalyticField::linear(Mat2::diag(-1.0, -1.0), 3);
        let j = f.jacobian(Vec2::new(0.3, -0.2)).unwrap();
        assert_eq!(j, Mat2::diag(-1.0, -1.0));

        let shear = AnalyticField::linear(Mat2::new(0.0, 1.0, 0.0, 0.0), 3);
        assert_eq!(
            shear.jacobian(Vec2::new(0.1, 0.9)).unwrap(),
            Mat2::new(0.0, 1.0, 0.0, 0.0)
        );
    }

    #[test]
    fn out_of_box_is_a_domain_error() {
        let f = AnalyticField::linear(Mat2::IDENTITY, 3);
        assert!(matches!(
            f.eval(Vec2::new(1.5, 0.0)),
            Err(SeriesError::OutsideValidityBox { .. })
        ));
    }
}
