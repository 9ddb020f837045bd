//! 2×2 matrix-valued Laurent polynomials in ξ with magnitude bounds.
//!
//! Every coefficient carries an entrywise bound on the sum of absolute values
//! of the terms that produced it. After an algebraic cancellation the true
//! coefficient is zero but the computed one is rounding noise of size
//! `ε · bound`; [`LaurentMat::snap`] removes such entries before evaluation at
//! large ξ, where the noise would otherwise be amplified by `ξ^k`.

use nalgebra::Matrix2;

use crate::mode::Mat2;
use crate::C64;

type Bound = Matrix2<f64>;

#[derive(Debug, Clone, PartialEq)]
pub struct LaurentMat {
    /// Exponent of `coeffs[0]`.
    lo: i32,
    coeffs: Vec<Mat2>,
    bounds: Vec<Bound>,
}

fn abs_entries(c: &Mat2) -> Bound {
    c.map(|z| z.norm())
}

impl LaurentMat {
    pub fn zero() -> Self {
        Self {
            lo: 0,
            coeffs: Vec::new(),
            bounds: Vec::new(),
        }
    }

    /// `c · ξ^k`.
    pub fn monomial(k: i32, c: Mat2) -> Self {
        Self {
            lo: k,
            coeffs: vec![c],
            bounds: vec![abs_entries(&c)],
        }
    }

    /// `Σ_k terms[k].1 · ξ^{terms[k].0}`.
    pub fn from_terms(terms: impl IntoIterator<Item = (i32, Mat2)>) -> Self {
        terms
            .into_iter()
            .fold(Self::zero(), |acc, (k, c)| acc.add(&Self::monomial(k, c)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.iter().all(|z| *z == C64::new(0.0, 0.0)))
    }

    fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    /// Exponent range `(lo, hi)` of the stored coefficients, if any.
    pub fn degree_range(&self) -> Option<(i32, i32)> {
        (!self.coeffs.is_empty()).then(|| (self.lo, self.hi()))
    }

    /// Coefficient of `ξ^k`.
    pub fn coeff(&self, k: i32) -> Mat2 {
        let i = k - self.lo;
        if i < 0 || i as usize >= self.coeffs.len() {
            Mat2::zeros()
        } else {
            self.coeffs[i as usize]
        }
    }

    fn bound(&self, k: i32) -> Bound {
        let i = k - self.lo;
        if i < 0 || i as usize >= self.bounds.len() {
            Bound::zeros()
        } else {
            self.bounds[i as usize]
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() {
            return other.clone();
        }
        if other.coeffs.is_empty() {
            return self.clone();
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi).map(|k| self.coeff(k) + other.coeff(k)).collect();
        let bounds = (lo..=hi).map(|k| self.bound(k) + other.bound(k)).collect();
        Self { lo, coeffs, bounds }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> Self {
        let n = s.norm();
        Self {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
            bounds: self.bounds.iter().map(|b| b * n).collect(),
        }
    }

    /// Matrix product, coefficients convolved.
    pub fn mul(&self, other: &Self) -> Self {
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            return Self::zero();
        }
        let n = self.coeffs.len() + other.coeffs.len() - 1;
        let mut coeffs = vec![Mat2::zeros(); n];
        let mut bounds = vec![Bound::zeros(); n];
        for (i, (a, ba)) in self.coeffs.iter().zip(&self.bounds).enumerate() {
            for (j, (b, bb)) in other.coeffs.iter().zip(&other.bounds).enumerate() {
                coeffs[i + j] += a * b;
                bounds[i + j] += ba * bb;
            }
        }
        Self {
            lo: self.lo + other.lo,
            coeffs,
            bounds,
        }
    }

    /// Conjugate transpose (ξ real).
    pub fn adjoint(&self) -> Self {
        Self {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c.adjoint()).collect(),
            bounds: self.bounds.iter().map(|b| b.transpose()).collect(),
        }
    }

    /// Zeroes every entry with `|c| ≤ rel · bound` and returns the largest
    /// `|c| / bound` among the zeroed entries (0 when nothing was removed).
    pub fn snap(&mut self, rel: f64) -> f64 {
        let mut leftover: f64 = 0.0;
        for (c, b) in self.coeffs.iter_mut().zip(&self.bounds) {
            for (z, &bz) in c.iter_mut().zip(b.iter()) {
                let a = z.norm();
                if a <= rel * bz {
                    if bz > 0.0 {
                        leftover = leftover.max(a / bz);
                    }
                    *z = C64::new(0.0, 0.0);
                }
            }
        }
        self.trim();
        leftover
    }

    fn trim(&mut self) {
        let nz = |c: &Mat2| c.iter().any(|z| z.re != 0.0 || z.im != 0.0);
        let Some(first) = self.coeffs.iter().position(nz) else {
            *self = Self::zero();
            return;
        };
        let last = self.coeffs.iter().rposition(nz).unwrap();
        self.coeffs = self.coeffs[first..=last].to_vec();
        self.bounds = self.bounds[first..=last].to_vec();
        self.lo += first as i32;
    }

    /// Evaluates at ξ ≠ 0 (ξ = 0 is allowed when no negative powers remain).
    pub fn eval(&self, xi: f64) -> Mat2 {
        if self.coeffs.is_empty() {
            return Mat2::zeros();
        }
        let x = C64::new(xi, 0.0);
        let mut acc = Mat2::zeros();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc * x.powi(self.lo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sample(seed: u64) -> LaurentMat {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut z = || c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        LaurentMat::from_terms((-3..=2).map(|k| (k, Mat2::new(z(), z(), z(), z()))))
    }

    #[test]
    fn eval_matches_direct_sum() {
        let p = sample(1);
        for xi in [0.5, 1.0, 3.0] {
            let mut direct = Mat2::zeros();
            for k in -3..=2 {
                direct += p.coeff(k) * c(f64::powi(xi, k), 0.0);
            }
            assert!((p.eval(xi) - direct).norm() < 1e-12 * (1.0 + direct.norm()));
        }
    }

    #[test]
    fn product_and_adjoint_commute_with_eval() {
        let (p, q) = (sample(2), sample(3));
        let xi = 1.7;
        let pq = p.mul(&q).eval(xi);
        assert!((pq - p.eval(xi) * q.eval(xi)).norm() < 1e-12 * pq.norm());
        assert!((p.adjoint().eval(xi) - p.eval(xi).adjoint()).norm() < 1e-14);
        let s = p.add(&q).sub(&q).eval(xi);
        assert!((s - p.eval(xi)).norm() < 1e-12);
    }

    #[test]
    fn snap_removes_cancelled_terms_only() {
        let a = Mat2::new(c(0.1, 0.0), c(0.0, 0.3), c(0.2, 0.0), c(-0.7, 0.0));
        let big = LaurentMat::monomial(5, a);
        // (big + small) − big leaves rounding noise at ξ^5 and the genuine ξ^0 term
        let small = LaurentMat::monomial(0, Mat2::identity());
        let mut r = big.add(&small).add(&LaurentMat::monomial(5, a * c(1e-17, 0.0))).sub(&big);
        let left = r.snap(1e-10);
        assert!(left < 1e-10);
        assert_eq!(r.degree_range(), Some((0, 0)));
        assert_eq!(r.eval(1024.0), Mat2::identity());
    }

    #[test]
    fn zero_handling() {
        let z = LaurentMat::zero();
        assert!(z.is_zero());
        assert_eq!(z.eval(3.0), Mat2::zeros());
        assert!(z.mul(&sample(4)).is_zero());
        let mut p = sample(5);
        let q = p.clone();
        p = p.sub(&q);
        p.snap(1e-10);
        assert!(p.is_zero());
        assert_eq!(p.degree_range(), None);
    }
}
