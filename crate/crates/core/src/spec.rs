//! The constant-coefficient equation
//!
//! ```text
//! D_t u = D_x^{2m} u + Σ_{j=1}^{2m} ( a_j D_x^{2m-j} u + b_j D_x^{2m-j} ū ),   D = -i∂
//! ```
//!
//! Coefficients are addressed 1-based (`a(j)`, `j = 1..=2m`) everywhere in the
//! public API; storage is 0-based, `a[j - 1]`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::C64;

#[derive(Debug, Clone, PartialEq)]
pub struct EquationSpec {
    m: usize,
    a: Vec<C64>,
    b: Vec<C64>,
}

impl EquationSpec {
    pub fn new(m: usize, a: Vec<C64>, b: Vec<C64>) -> Result<Self> {
        if m == 0 {
            return Err(Error::invalid("m must be at least 1"));
        }
        for (name, v) in [("a", &a), ("b", &b)] {
            if v.len() != 2 * m {
                return Err(Error::invalid(format!(
                    "{name} has {} coefficients, expected 2m = {}",
                    v.len(),
                    2 * m
                )));
            }
            if let Some(j) = v.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::invalid(format!("{name}_{} is not finite", j + 1)));
            }
        }
        Ok(Self { m, a, b })
    }

    /// The free equation `D_t u = D_x^{2m} u`.
    pub fn zero(m: usize) -> Result<Self> {
        Self::new(m, vec![C64::new(0.0, 0.0); 2 * m], vec![C64::new(0.0, 0.0); 2 * m])
    }

    /// Seeded random spec, real and imaginary parts uniform in `[-1, 1]`.
    pub fn random<R: Rng + ?Sized>(m: usize, rng: &mut R) -> Self {
        let mut draw = || C64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
        let a = (0..2 * m).map(|_| draw()).collect();
        let b = (0..2 * m).map(|_| draw()).collect();
        Self { m: m.max(1), a, b }
    }

    /// Builder-style override of `a_j` (1-based). Panics when `j` is out of range.
    pub fn with_a(mut self, j: usize, value: C64) -> Self {
        assert!((1..=2 * self.m).contains(&j), "a index {j} out of 1..={}", 2 * self.m);
        self.a[j - 1] = value;
        self
    }

    /// Builder-style override of `b_j` (1-based). Panics when `j` is out of range.
    pub fn with_b(mut self, j: usize, value: C64) -> Self {
        assert!((1..=2 * self.m).contains(&j), "b index {j} out of 1..={}", 2 * self.m);
        self.b[j - 1] = value;
        self
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Equation order `2m`.
    pub fn order(&self) -> usize {
        2 * self.m
    }

    /// `a_j`, 1-based.
    #[inline]
    pub fn a(&self, j: usize) -> C64 {
        self.a[j - 1]
    }

    /// `b_j`, 1-based.
    #[inline]
    pub fn b(&self, j: usize) -> C64 {
        self.b[j - 1]
    }

    pub fn a_slice(&self) -> &[C64] {
        &self.a
    }

    pub fn b_slice(&self) -> &[C64] {
        &self.b
    }

    pub fn set_a(&mut self, j: usize, value: C64) {
        self.a[j - 1] = value;
    }

    pub fn set_b(&mut self, j: usize, value: C64) {
        self.b[j - 1] = value;
    }

    /// `max(1, |a_j|, |b_j|)`.
    pub fn scale(&self) -> f64 {
        self.a
            .iter()
            .chain(&self.b)
            .map(|z| z.norm())
            .fold(1.0, f64::max)
    }

    /// Default threshold below which a λ_j counts as zero.
    pub fn default_zero_tolerance(&self) -> f64 {
        1e-12 * self.scale()
    }

    pub fn b_is_zero(&self) -> bool {
        self.b.iter().all(|z| *z == C64::new(0.0, 0.0))
    }

    /// Multiply every coefficient by a real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            m: self.m,
            a: self.a.iter().map(|z| z * factor).collect(),
            b: self.b.iter().map(|z| z * factor).collect(),
        }
    }
}
