//! Truncated multivariate power series.
//!
//! A [`Series<N>`] holds the Taylor coefficients of a polynomial in `N`
//! variables about a fixed center, truncated at a total degree. Storage is
//! dense and graded: all monomials of degree `d` come before those of degree
//! `d + 1`, so "every coefficient of degree at most `k`" is always a prefix of
//! the coefficient vector.
//!
//! Arithmetic is exact through the truncation degree: the product of two
//! series agrees with the product of the underlying analytic functions in
//! every coefficient of degree `<= max_degree`.

mod field;
mod linalg;

pub use field::AnalyticField;
pub use linalg::{Mat2, Vec2};

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use thiserror::Error;

/// Default truncation degree for scenario data.
pub const DEFAULT_MAX_DEGREE: usize = 12;
/// Default half-width of the validity box `‖x − center‖∞ ≤ radius`.
pub const DEFAULT_RADIUS: f64 = 1.0;

pub type UniSeries = Series<1>;
pub type BiSeries = Series<2>;
pub type TriSeries = Series<3>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error("reciprocal of a series with zero constant term")]
    ZeroConstantTerm,
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("center mismatch: {0:?} vs {1:?}")]
    CenterMismatch(Vec<f64>, Vec<f64>),
    #[error("exponent {exponent:?} exceeds max degree {max_degree}")]
    TermOutOfRange {
        exponent: Vec<usize>,
        max_degree: usize,
    },
    #[error("point {point:?} lies outside the validity box of radius {radius} about {center:?}")]
    OutsideValidityBox {
        point: Vec<f64>,
        center: Vec<f64>,
        radius: f64,
    },
}

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Number of monomials of total degree `<= degree` in `vars` variables.
pub fn coeff_count(vars: usize, degree: usize) -> usize {
    binom(degree + vars, vars)
}

/// Position of a multi-index in graded storage.
pub fn index_of(exp: &[usize]) -> usize {
    let n = exp.len();
    let d: usize = exp.iter().sum();
    let below = if d == 0 { 0 } else { binom(d - 1 + n, n) };
    below + rank_within(exp, d)
}

// Rank among multi-indices of equal total degree, ordered by the first
// exponent descending and then recursively on the tail.
fn rank_within(exp: &[usize], d: usize) -> usize {
    let n = exp.len();
    if n <= 1 {
        return 0;
    }
    let rest = d - exp[0];
    let before = if rest == 0 {
        0
    } else {
        binom(rest - 1 + n - 1, n - 1)
    };
    before + rank_within(&exp[1..], rest)
}

/// All multi-indices of total degree `<= degree`, in storage order.
pub fn exponents<const N: usize>(degree: usize) -> Vec<[usize; N]> {
    let mut out = Vec::with_capacity(coeff_count(N, degree));
    for d in 0..=degree {
        let mut cur = [0usize; N];
        push_degree(&mut out, &mut cur, 0, d);
    }
    out
}

fn push_degree<const N: usize>(
    out: &mut Vec<[usize; N]>,
    cur: &mut [usize; N],
    pos: usize,
    remaining: usize,
) {
    if pos + 1 == N {
        cur[pos] = remaining;
        out.push(*cur);
        return;
    }
    for a in (0..=remaining).rev() {
        cur[pos] = a;
        push_degree(out, cur, pos + 1, remaining - a);
    }
}

fn total<const N: usize>(e: &[usize; N]) -> usize {
    e.iter().sum()
}

/// Truncated power series in `N` variables about `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series<const N: usize> {
    center: [f64; N],
    max_degree: usize,
    radius: f64,
    coeffs: Vec<f64>,
}

impl<const N: usize> Series<N> {
    pub fn zeros(center: [f64; N], max_degree: usize) -> Self {
        assert!(N > 0, "series need at least one variable");
        Self {
            center,
            max_degree,
            radius: DEFAULT_RADIUS,
            coeffs: vec![0.0; coeff_count(N, max_degree)],
        }
    }

    pub fn constant(center: [f64; N], max_degree: usize, value: f64) -> Self {
        let mut s = Self::zeros(center, max_degree);
        s.coeffs[0] = value;
        s
    }

    /// The coordinate function `x ↦ x[axis]` expanded about `center`.
    pub fn variable(center: [f64; N], max_degree: usize, axis: usize) -> Self {
        let mut s = Self::constant(center, max_degree, center[axis]);
        if max_degree >= 1 {
            let mut e = [0usize; N];
            e[axis] = 1;
            s.coeffs[index_of(&e)] = 1.0;
        }
        s
    }

    /// Builds a series from `(exponent, coefficient)` pairs. Repeated
    /// exponents accumulate.
    pub fn from_terms(
        center: [f64; N],
        max_degree: usize,
        terms: &[([usize; N], f64)],
    ) -> Result<Self, SeriesError> {
        let mut s = Self::zeros(center, max_degree);
        for (e, c) in terms {
            if total(e) > max_degree {
                return Err(SeriesError::TermOutOfRange {
                    exponent: e.to_vec(),
                    max_degree,
                });
            }
            s.coeffs[index_of(e)] += c;
        }
        Ok(s)
    }

    pub fn with_radius(mut self, radius: f64) -> Self {
        self.radius = radius;
        self
    }

    pub fn center(&self) -> [f64; N] {
        self.center
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, e: [usize; N]) -> f64 {
        if total(&e) > self.max_degree {
            0.0
        } else {
            self.coeffs[index_of(&e)]
        }
    }

    pub fn set_coeff(&mut self, e: [usize; N], value: f64) {
        assert!(
            total(&e) <= self.max_degree,
            "exponent {e:?} beyond degree {}",
            self.max_degree
        );
        self.coeffs[index_of(&e)] = value;
    }

    pub fn constant_term(&self) -> f64 {
        self.coeffs[0]
    }

    /// Nonzero terms as `(exponent, coefficient)` pairs in storage order.
    pub fn terms(&self) -> Vec<([usize; N], f64)> {
        exponents::<N>(self.max_degree)
            .into_iter()
            .zip(self.coeffs.iter().copied())
            .filter(|(_, c)| *c != 0.0)
            .collect()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn is_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.max_degree != other.max_degree {
            return Err(SeriesError::DegreeMismatch(
                self.max_degree,
                other.max_degree,
            ));
        }
        if self.center != other.center {
            return Err(SeriesError::CenterMismatch(
                self.center.to_vec(),
                other.center.to_vec(),
            ));
        }
        Ok(())
    }

    fn expect_compatible(&self, other: &Self) {
        if let Err(e) = self.is_compatible(other) {
            panic!("incompatible series: {e}");
        }
    }

    pub fn in_box(&self, x: [f64; N]) -> bool {
        x.iter()
            .zip(self.center.iter())
            .all(|(xi, ci)| (xi - ci).abs() <= self.radius * (1.0 + 1e-12))
    }

    pub fn check_in_box(&self, x: [f64; N]) -> Result<(), SeriesError> {
        if self.in_box(x) {
            Ok(())
        } else {
            Err(SeriesError::OutsideValidityBox {
                point: x.to_vec(),
                center: self.center.to_vec(),
                radius: self.radius,
            })
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.is_compatible(other)?;
        Ok(self + other)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.is_compatible(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|c| *c *= k);
        out
    }

    pub fn add_scalar(&self, k: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += k;
        out
    }

    fn mul_raw(&self, other: &Self) -> Vec<f64> {
        let exps = exponents::<N>(self.max_degree);
        let mut out = vec![0.0; self.coeffs.len()];
        for (ia, ea) in exps.iter().enumerate() {
            let ca = self.coeffs[ia];
            if ca == 0.0 {
                continue;
            }
            let room = self.max_degree - total(ea);
            let nb = coeff_count(N, room);
            for (ib, eb) in exps[..nb].iter().enumerate() {
                let cb = other.coeffs[ib];
                if cb == 0.0 {
                    continue;
                }
                let mut e = *ea;
                for k in 0..N {
                    e[k] += eb[k];
                }
                out[index_of(&e)] += ca * cb;
            }
        }
        out
    }

    /// Multiplicative inverse, exact through `max_degree`.
    pub fn reciprocal(&self) -> Result<Self, SeriesError> {
        let a0 = self.coeffs[0];
        if a0 == 0.0 {
            return Err(SeriesError::ZeroConstantTerm);
        }
        let exps = exponents::<N>(self.max_degree);
        let mut b = vec![0.0; self.coeffs.len()];
        b[0] = 1.0 / a0;
        for (ig, eg) in exps.iter().enumerate().skip(1) {
            // b_g = -(1/a0) Σ_{0 < β ≤ g} a_β b_{g-β}
            let mut acc = 0.0;
            for (ib, eb) in exps[..=ig].iter().enumerate().skip(1) {
                if (0..N).any(|k| eb[k] > eg[k]) {
                    continue;
                }
                let ab = self.coeffs[ib];
                if ab == 0.0 {
                    continue;
                }
                let mut rest = *eg;
                for k in 0..N {
                    rest[k] -= eb[k];
                }
                acc += ab * b[index_of(&rest)];
            }
            b[ig] = -acc / a0;
        }
        Ok(Self {
            coeffs: b,
            ..self.clone()
        })
    }

    /// Partial derivative along `axis`. The result keeps `max_degree`; its
    /// top-degree coefficients are zero.
    pub fn derivative(&self, axis: usize) -> Self {
        let exps = exponents::<N>(self.max_degree);
        let mut out = Self::zeros(self.center, self.max_degree).with_radius(self.radius);
        for (i, e) in exps.iter().enumerate() {
            if e[axis] == 0 || self.coeffs[i] == 0.0 {
                continue;
            }
            let mut t = *e;
            t[axis] -= 1;
            out.coeffs[index_of(&t)] += e[axis] as f64 * self.coeffs[i];
        }
        out
    }

    /// Antiderivative along `axis` vanishing on `x[axis] = center[axis]`;
    /// terms pushed past `max_degree` are dropped.
    pub fn integral(&self, axis: usize) -> Self {
        let exps = exponents::<N>(self.max_degree);
        let mut out = Self::zeros(self.center, self.max_degree).with_radius(self.radius);
        for (i, e) in exps.iter().enumerate() {
            if total(e) == self.max_degree || self.coeffs[i] == 0.0 {
                continue;
            }
            let mut t = *e;
            t[axis] += 1;
            out.coeffs[index_of(&t)] += self.coeffs[i] / t[axis] as f64;
        }
        out
    }

    /// Evaluates the truncated polynomial at `x` (no box check).
    pub fn eval(&self, x: [f64; N]) -> f64 {
        let d = self.max_degree;
        let mut pows = vec![[1.0f64; N]; d + 1];
        for k in 1..=d {
            for a in 0..N {
                pows[k][a] = pows[k - 1][a] * (x[a] - self.center[a]);
            }
        }
        exponents::<N>(d)
            .iter()
            .zip(self.coeffs.iter())
            .filter(|(_, c)| **c != 0.0)
            .map(|(e, c)| {
                let mut m = *c;
                for a in 0..N {
                    m *= pows[e[a]][a];
                }
                m
            })
            .sum()
    }

    pub fn eval_checked(&self, x: [f64; N]) -> Result<f64, SeriesError> {
        self.check_in_box(x)?;
        Ok(self.eval(x))
    }

    /// Re-expands the same truncated polynomial about a new center.
    pub fn recenter(&self, new_center: [f64; N]) -> Self {
        let mut cur = self.clone();
        for axis in 0..N {
            let delta = new_center[axis] - cur.center[axis];
            if delta == 0.0 {
                continue;
            }
            let exps = exponents::<N>(self.max_degree);
            let mut next = vec![0.0; cur.coeffs.len()];
            for (i, e) in exps.iter().enumerate() {
                let c = cur.coeffs[i];
                if c == 0.0 {
                    continue;
                }
                // (h + δ)^k = Σ_j C(k, j) δ^(k-j) h^j
                let k = e[axis];
                let mut t = *e;
                for j in 0..=k {
                    t[axis] = j;
                    next[index_of(&t)] += c * binom(k, j) as f64 * delta.powi((k - j) as i32);
                }
            }
            cur.coeffs = next;
            cur.center[axis] = new_center[axis];
        }
        cur
    }

    /// Same coefficients truncated (or zero-padded) to `degree`.
    pub fn with_degree(&self, degree: usize) -> Self {
        let mut out = Self::zeros(self.center, degree).with_radius(self.radius);
        for (i, e) in exponents::<N>(self.max_degree).iter().enumerate() {
            if total(e) <= degree {
                out.coeffs[index_of(e)] = self.coeffs[i];
            }
        }
        out
    }

    /// Composition `self(inner[0], …, inner[N-1])`, exact through the inner
    /// series' degree for the truncated outer polynomial.
    ///
    /// The outer polynomial is first re-expanded about the inner constant
    /// terms, which must lie inside the outer validity box.
    pub fn compose<const M: usize>(&self, inner: &[Series<M>; N]) -> Result<Series<M>, SeriesError> {
        Ok(compose_all(&[self], inner)?.pop().expect("one outer series"))
    }
}

/// Composes several outer series with the same inner substitution, sharing
/// the monomials of the inner series between them.
pub fn compose_all<const N: usize, const M: usize>(
    outers: &[&Series<N>],
    inner: &[Series<M>; N],
) -> Result<Vec<Series<M>>, SeriesError> {
    let first = &inner[0];
    for s in inner.iter().skip(1) {
        first.is_compatible(s)?;
    }
    let consts: [f64; N] = std::array::from_fn(|i| inner[i].coeffs[0]);
    let shifted: Vec<Series<N>> = outers
        .iter()
        .map(|o| {
            o.check_in_box(consts)?;
            Ok(o.recenter(consts))
        })
        .collect::<Result<_, SeriesError>>()?;
    let degree = first.max_degree;
    // Re-expansion never raises the degree, so monomials above the highest
    // nonzero term are never needed.
    let outer_degree = outers
        .iter()
        .map(|o| {
            exponents::<N>(o.max_degree)
                .iter()
                .zip(&o.coeffs)
                .filter(|(_, c)| **c != 0.0)
                .map(|(e, _)| total(e))
                .max()
                .unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    let live = degree.min(outer_degree);

    let h: Vec<Series<M>> = inner
        .iter()
        .map(|s| {
            let mut h = s.clone();
            h.coeffs[0] = 0.0;
            h
        })
        .collect();
    // Graded order puts e − unit(a) before e, so each monomial is one
    // product away from an earlier one.
    let exps = exponents::<N>(live);
    let mut monos: Vec<Series<M>> = Vec::with_capacity(exps.len());
    for e in &exps {
        let m = match e.iter().position(|&k| k > 0) {
            None => Series::<M>::constant(first.center, degree, 1.0).with_radius(first.radius),
            Some(a) => {
                let mut prev = *e;
                prev[a] -= 1;
                &monos[index_of(&prev)] * &h[a]
            }
        };
        monos.push(m);
    }

    Ok(shifted
        .iter()
        .map(|outer| {
            let mut out = Series::<M>::zeros(first.center, degree).with_radius(first.radius);
            for (i, mono) in monos.iter().enumerate() {
                let Some(&c) = outer.coeffs.get(i) else { break };
                if c == 0.0 {
                    continue;
                }
                for (o, t) in out.coeffs.iter_mut().zip(mono.coeffs.iter()) {
                    *o += c * t;
                }
            }
            out
        })
        .collect())
}

impl Series<1> {
    /// Coefficient of `(x - center)^k`.
    pub fn at(&self, k: usize) -> f64 {
        self.coeff([k])
    }
}

impl Series<2> {
    /// Embeds a univariate series as a function of the first variable.
    pub fn from_first_axis(s: &Series<1>, second_center: f64) -> Self {
        let mut out = Self::zeros([s.center[0], second_center], s.max_degree).with_radius(s.radius);
        for (i, c) in s.coeffs.iter().enumerate() {
            out.coeffs[index_of(&[i, 0])] = *c;
        }
        out
    }

    /// Substitutes a value for the second variable, leaving a series in the first.
    pub fn fix_second(&self, x2: f64) -> Series<1> {
        let h = x2 - self.center[1];
        let mut out = Series::<1>::zeros([self.center[0]], self.max_degree).with_radius(self.radius);
        for (i, e) in exponents::<2>(self.max_degree).iter().enumerate() {
            let c = self.coeffs[i];
            if c != 0.0 {
                out.coeffs[e[0]] += c * h.powi(e[1] as i32);
            }
        }
        out
    }

    /// Coefficient block of `(x2 - c2)^k` as a series in the first variable.
    pub fn second_axis_block(&self, k: usize) -> Series<1> {
        let mut out = Series::<1>::zeros([self.center[0]], self.max_degree).with_radius(self.radius);
        if k <= self.max_degree {
            for i in 0..=(self.max_degree - k) {
                out.coeffs[i] = self.coeffs[index_of(&[i, k])];
            }
        }
        out
    }
}

impl<const N: usize> Add for &Series<N> {
    type Output = Series<N>;
    fn add(self, rhs: &Series<N>) -> Series<N> {
        self.expect_compatible(rhs);
        let mut out = self.clone();
        out.radius = self.radius.min(rhs.radius);
        for (o, r) in out.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *o += r;
        }
        out
    }
}

impl<const N: usize> Sub for &Series<N> {
    type Output = Series<N>;
    fn sub(self, rhs: &Series<N>) -> Series<N> {
        self.expect_compatible(rhs);
        let mut out = self.clone();
        out.radius = self.radius.min(rhs.radius);
        for (o, r) in out.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *o -= r;
        }
        out
    }
}

impl<const N: usize> Mul for &Series<N> {
    type Output = Series<N>;
    fn mul(self, rhs: &Series<N>) -> Series<N> {
        self.expect_compatible(rhs);
        Series {
            center: self.center,
            max_degree: self.max_degree,
            radius: self.radius.min(rhs.radius),
            coeffs: self.mul_raw(rhs),
        }
    }
}

impl<const N: usize> Neg for &Series<N> {
    type Output = Series<N>;
    fn neg(self) -> Series<N> {
        self.scale(-1.0)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<const N: usize> $tr for Series<N> {
            type Output = Series<N>;
            fn $m(self, rhs: Series<N>) -> Series<N> {
                (&self).$m(&rhs)
            }
        }
        impl<const N: usize> $tr<&Series<N>> for Series<N> {
            type Output = Series<N>;
            fn $m(self, rhs: &Series<N>) -> Series<N> {
                (&self).$m(rhs)
            }
        }
        impl<const N: usize> $tr<Series<N>> for &Series<N> {
            type Output = Series<N>;
            fn $m(self, rhs: Series<N>) -> Series<N> {
                self.$m(&rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<const N: usize> Neg for Series<N> {
    type Output = Series<N>;
    fn neg(self) -> Series<N> {
        self.scale(-1.0)
    }
}

impl<const N: usize> AddAssign<&Series<N>> for Series<N> {
    fn add_assign(&mut self, rhs: &Series<N>) {
        self.expect_compatible(rhs);
        for (o, r) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *o += r;
        }
    }
}

impl<const N: usize> Mul<f64> for &Series<N> {
    type Output = Series<N>;
    fn mul(self, k: f64) -> Series<N> {
        self.scale(k)
    }
}

impl<const N: usize> Mul<f64> for Series<N> {
    type Output = Series<N>;
    fn mul(self, k: f64) -> Series<N> {
        self.scale(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bi(terms: &[([usize; 2], f64)], deg: usize) -> BiSeries {
        BiSeries::from_terms([0.0, 0.0], deg, terms).unwrap()
    }

    #[test]
    fn storage_order_matches_index_formula() {
        for (i, e) in exponents::<3>(7).iter().enumerate() {
            assert_eq!(index_of(e), i, "{e:?}");
        }
        for (i, e) in exponents::<2>(9).iter().enumerate() {
            assert_eq!(index_of(e), i);
        }
        assert_eq!(exponents::<3>(12).len(), 455);
        assert_eq!(coeff_count(2, 12), 91);
    }

    #[test]
    fn difference_of_squares() {
        let a = bi(&[([0, 0], 1.0), ([1, 0], 1.0)], 2);
        let b = bi(&[([0, 0], 1.0), ([1, 0], -1.0)], 2);
        let p = &a * &b;
        assert_eq!(p, bi(&[([0, 0], 1.0), ([2, 0], -1.0)], 2));
    }

    #[test]
    fn geometric_reciprocal() {
        let a = bi(&[([0, 0], 1.0), ([1, 0], 1.0)], 3);
        let r = a.reciprocal().unwrap();
        let expect = bi(
            &[([0, 0], 1.0), ([1, 0], -1.0), ([2, 0], 1.0), ([3, 0], -1.0)],
            3,
        );
        assert_eq!(r, expect);
    }

    #[test]
    fn reciprocal_of_zero_constant_fails() {
        let a = bi(&[([1, 0], 1.0)], 3);
        assert_eq!(a.reciprocal(), Err(SeriesError::ZeroConstantTerm));
    }

    #[test]
    fn mismatched_operands_are_reported() {
        let a = bi(&[([0, 0], 1.0)], 3);
        let b = bi(&[([0, 0], 1.0)], 4);
        assert!(matches!(
            a.checked_mul(&b),
            Err(SeriesError::DegreeMismatch(3, 4))
        ));
        let c = BiSeries::constant([0.5, 0.0], 3, 1.0);
        assert!(matches!(
            a.checked_add(&c),
            Err(SeriesError::CenterMismatch(..))
        ));
    }

    #[test]
    fn exp_of_sum_matches_multinomial_expansion() {
        // Oracle: exp(x1 + x2) = Σ x1^i x2^j / (i! j!).
        let deg = 6;
        let mut fact = vec![1.0f64; deg + 1];
        for k in 1..=deg {
            fact[k] = fact[k - 1] * k as f64;
        }
        let exp_jet = UniSeries::from_terms(
            [0.0],
            deg,
            &(0..=deg).map(|k| ([k], 1.0 / fact[k])).collect::<Vec<_>>(),
        )
        .unwrap();
        let sum = bi(&[([1, 0], 1.0), ([0, 1], 1.0)], deg);
        let composed = exp_jet.compose(&[sum]).unwrap();
        for e in exponents::<2>(deg) {
            let expect = 1.0 / (fact[e[0]] * fact[e[1]]);
            assert!((composed.coeff(e) - expect).abs() < 1e-14, "{e:?}");
        }
    }

    #[test]
    fn compose_shifts_outer_center() {
        // f(u) = u^2 about 0, composed with u = 0.5 + x: (0.5 + x)^2.
        let f = UniSeries::from_terms([0.0], 4, &[([2], 1.0)]).unwrap();
        let inner = UniSeries::from_terms([0.0], 4, &[([0], 0.5), ([1], 1.0)]).unwrap();
        let g = f.compose(&[inner]).unwrap();
        assert!((g.at(0) - 0.25).abs() < 1e-15);
        assert!((g.at(1) - 1.0).abs() < 1e-15);
        assert!((g.at(2) - 1.0).abs() < 1e-15);
        assert_eq!(g.at(3), 0.0);
    }

    #[test]
    fn compose_rejects_out_of_box_inner_constants() {
        let f = UniSeries::from_terms([0.0], 4, &[([2], 1.0)]).unwrap();
        let inner = UniSeries::constant([0.0], 4, 3.0);
        assert!(matches!(
            f.compose(&[inner]),
            Err(SeriesError::OutsideValidityBox { .. })
        ));
    }

    #[test]
    fn recenter_preserves_values() {
        let s = bi(
            &[([0, 0], 0.3), ([1, 1], -2.0), ([3, 0], 0.7), ([0, 2], 1.1)],
            4,
        );
        let r = s.recenter([0.2, -0.3]);
        for x in [[0.1, 0.1], [-0.4, 0.25], [0.0, 0.0]] {
            assert!((s.eval(x) - r.eval(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn fix_second_and_blocks() {
        let s = bi(&[([1, 0], 2.0), ([0, 1], 3.0), ([1, 1], 1.0)], 3);
        let f = s.fix_second(0.5);
        assert!((f.at(0) - 1.5).abs() < 1e-15);
        assert!((f.at(1) - 2.5).abs() < 1e-15);
        let b1 = s.second_axis_block(1);
        assert_eq!(b1.at(0), 3.0);
        assert_eq!(b1.at(1), 1.0);
    }
}
