//! Per-frequency evolution.
//!
//! For each ξ the pair `U_ξ = (û(ξ), conj û(−ξ))` obeys the linear system
//! `∂_t U = i M(ξ) U` with `M(ξ) = Σ_{j=0}^{2m} ξ^{2m−j} X_j`, so
//! `U(t) = exp(i t M(ξ)) U(0)`.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::spec::EquationSpec;
use crate::C64;

pub type Mat2 = Matrix2<C64>;
pub type Vec2 = Vector2<C64>;

/// Natural-log modulus above which exponentials are refused.
pub const OVERFLOW_LOG_MODULUS: f64 = 700.0;

/// Below this `|δ|` the sinhc factor uses its Taylor series.
const SERIES_SWITCH: f64 = 1e-4;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// `X_j` with rows `(a_j, b_j)` and `((−1)^{j+1} b̄_j, (−1)^{j+1} ā_j)`; `X_0 = diag(1, −1)`.
pub fn coupling_matrix(spec: &EquationSpec, j: usize) -> Mat2 {
    if j == 0 {
        return Mat2::new(ONE, ZERO, ZERO, -ONE);
    }
    let s = if j % 2 == 1 { 1.0 } else { -1.0 };
    let (a, b) = (spec.a(j), spec.b(j));
    Mat2::new(a, b, b.conj() * s, a.conj() * s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMatrix {
    pub xi: f64,
    pub matrix: Mat2,
}

/// `M(ξ)` by Horner evaluation of the matrix polynomial in ξ.
pub fn build_mode_matrix(spec: &EquationSpec, xi: f64) -> ModeMatrix {
    let mut acc = coupling_matrix(spec, 0);
    for j in 1..=spec.order() {
        acc = acc * C64::new(xi, 0.0) + coupling_matrix(spec, j);
    }
    ModeMatrix { xi, matrix: acc }
}

fn overflow(log_modulus: f64) -> Error {
    Error::ModeOverflow {
        xi: None,
        log_modulus,
        limit: OVERFLOW_LOG_MODULUS,
    }
}

/// Traceless split `A = μI + B`, returning `(μ, B, δ)` with `δ² = −det B` and `Re δ ≥ 0`.
fn traceless_split(a: &Mat2) -> (C64, Mat2, C64) {
    let mu = (a[(0, 0)] + a[(1, 1)]) * 0.5;
    let d = (a[(0, 0)] - a[(1, 1)]) * 0.5;
    let b = Mat2::new(d, a[(0, 1)], a[(1, 0)], -d);
    let delta = (d * d + a[(0, 1)] * a[(1, 0)]).sqrt();
    (mu, b, delta)
}

/// `max Re(eigenvalue)` of `a`.
pub fn max_log_growth(a: &Mat2) -> f64 {
    let (mu, _, delta) = traceless_split(a);
    mu.re + delta.re.abs()
}

/// Closed-form exponential of a 2×2 complex matrix.
///
/// With `A = μI + B`, `tr B = 0`, `δ² = −det B`:
/// `exp A = e^μ (cosh δ · I + sinh δ / δ · B)`.
/// For `|δ| > 1` the same expression is evaluated as
/// `e^{μ+δ} (I + B/δ)/2 + e^{μ−δ} (I − B/δ)/2` so a decaying eigen-component
/// keeps its relative accuracy next to a growing one.
pub fn mat_exp_2x2(a: &Mat2) -> Result<Mat2> {
    if a.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(Error::Numeric("non-finite matrix entry".into()));
    }
    let (mu, b, delta) = traceless_split(a);
    let log_mod = mu.re + delta.re.abs();
    if log_mod > OVERFLOW_LOG_MODULUS {
        return Err(overflow(log_mod));
    }
    let r = delta.norm();
    if r > 1.0 {
        // Spectral projectors (δ ± B)/(2δ). The diagonal entries δ ± d are
        // formed without cancellation using (δ + d)(δ − d) = b₀₁ b₁₀.
        let d = b[(0, 0)];
        let bc = b[(0, 1)] * b[(1, 0)];
        let (sum, diff) = if (delta + d).norm() >= (delta - d).norm() {
            let s = delta + d;
            (s, bc / s)
        } else {
            let df = delta - d;
            (bc / df, df)
        };
        let two_delta = delta * 2.0;
        let off = Mat2::new(ZERO, b[(0, 1)], b[(1, 0)], ZERO) / two_delta;
        let p_hi = Mat2::new(sum / two_delta, ZERO, ZERO, diff / two_delta) + off;
        let p_lo = Mat2::new(diff / two_delta, ZERO, ZERO, sum / two_delta) - off;
        return Ok(p_hi * (mu + delta).exp() + p_lo * (mu - delta).exp());
    }
    let (cosh, sinhc) = if r < SERIES_SWITCH {
        // six terms of each even series in δ²
        let d2 = delta * delta;
        let mut cosh = ZERO;
        let mut sinhc = ZERO;
        let mut pow = ONE;
        let mut fact_even = 1.0;
        let mut fact_odd = 1.0;
        for k in 0..6 {
            if k > 0 {
                fact_even *= ((2 * k - 1) * (2 * k)) as f64;
                fact_odd *= ((2 * k) * (2 * k + 1)) as f64;
            }
            cosh += pow / fact_even;
            sinhc += pow / fact_odd;
            pow *= d2;
        }
        (cosh, sinhc)
    } else {
        (delta.cosh(), delta.sinh() / delta)
    };
    Ok((Mat2::identity() * cosh + b * sinhc) * mu.exp())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePair {
    pub xi: f64,
    /// `û(ξ)`
    pub u_plus: C64,
    /// `conj û(−ξ)`
    pub u_minus_bar: C64,
}

impl ModePair {
    pub fn new(xi: f64, u_plus: C64, u_minus_bar: C64) -> Self {
        Self {
            xi,
            u_plus,
            u_minus_bar,
        }
    }

    /// Builds the pair from the two Fourier coefficients `û(ξ)` and `û(−ξ)`.
    pub fn from_coefficients(xi: f64, at_xi: C64, at_minus_xi: C64) -> Self {
        Self::new(xi, at_xi, at_minus_xi.conj())
    }

    pub fn vector(&self) -> Vec2 {
        Vec2::new(self.u_plus, self.u_minus_bar)
    }

    pub fn with_vector(&self, v: Vec2) -> Self {
        Self::new(self.xi, v[0], v[1])
    }

    /// `(û(ξ), û(−ξ))`.
    pub fn coefficients(&self) -> (C64, C64) {
        (self.u_plus, self.u_minus_bar.conj())
    }

    /// The same data seen from `−ξ`: components swapped and conjugated.
    pub fn mirrored(&self) -> Self {
        Self::new(-self.xi, self.u_minus_bar.conj(), self.u_plus.conj())
    }

    pub fn norm(&self) -> f64 {
        self.vector().norm()
    }
}

/// Propagator `exp(i t M(ξ))`.
pub fn propagator(spec: &EquationSpec, xi: f64, t: f64) -> Result<Mat2> {
    let m = build_mode_matrix(spec, xi).matrix;
    mat_exp_2x2(&(m * (I * t))).map_err(|e| e.at_xi(xi))
}

pub fn evolve_mode(spec: &EquationSpec, pair: &ModePair, t: f64) -> Result<ModePair> {
    if !t.is_finite() {
        return Err(Error::invalid("evolution time must be finite"));
    }
    if t == 0.0 {
        return Ok(*pair);
    }
    let p = propagator(spec, pair.xi, t)?;
    Ok(pair.with_vector(p * pair.vector()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenExponents {
    pub mu1: C64,
    pub mu2: C64,
    pub growth1: f64,
    pub growth2: f64,
    /// Eigenvectors of `iM(ξ)` for `mu1` and `mu2`, unit norm.
    pub v1: Vec2,
    pub v2: Vec2,
    pub defect_flag: bool,
}

/// Eigenvalues of `iM(ξ)`; `mu1` has the larger real part.
pub fn eigen_exponents(spec: &EquationSpec, xi: f64) -> EigenExponents {
    let m = build_mode_matrix(spec, xi).matrix;
    let g = m * I;
    let (mu, b, delta) = traceless_split(&g);
    let scale = m.norm_squared();
    let defect_flag = (delta * delta).norm() < 1e-10 * scale;
    let (e1, e2) = (mu + delta, mu - delta);
    let v1 = eigenvector(&b, delta);
    let v2 = eigenvector(&b, -delta);
    EigenExponents {
        mu1: e1,
        mu2: e2,
        growth1: e1.re,
        growth2: e2.re,
        v1,
        v2,
        defect_flag,
    }
}

/// Unit eigenvector of the traceless `b` for eigenvalue `d` (`d² = −det b`).
fn eigenvector(b: &Mat2, d: C64) -> Vec2 {
    // (b - d) v = 0 has solutions (b01, d - b00) and (d + b00, b10)... pick the larger
    let c1 = Vec2::new(b[(0, 1)], d - b[(0, 0)]);
    let c2 = Vec2::new(d + b[(0, 0)], b[(1, 0)]);
    let v = if c1.norm() >= c2.norm() { c1 } else { c2 };
    let n = v.norm();
    if n == 0.0 {
        Vec2::new(ONE, ZERO)
    } else {
        v / C64::new(n, 0.0)
    }
}

/// `−½ Σ_{j=1}^{2m−1} λ_j ξ^{2m−j} − Im a_{2m}`.
///
/// For `b ≡ 0` this is exactly the log-modulus rate of `û(ξ)`; the last term is
/// the zeroth-order coefficient, which no λ_j sees.
pub fn predicted_rate_diagonal(spec: &EquationSpec, lambda: &[f64], xi: f64) -> f64 {
    let n = spec.order();
    // Horner over j = 1..2m-1, then one more multiply by ξ for the ξ^1 term.
    let mut acc = 0.0;
    for j in 1..n {
        acc = acc * xi + lambda[j - 1];
    }
    -0.5 * acc * xi - spec.a(n).im
}

/// Classical RK4 integration of `∂_t U = i M(ξ) U` with the largest step
/// `≤ step` that divides `|t|`.
pub fn rk4_oracle(spec: &EquationSpec, pair: &ModePair, t: f64, step: f64) -> Result<ModePair> {
    if !(step > 0.0) || !t.is_finite() {
        return Err(Error::invalid("rk4 step must be positive and t finite"));
    }
    let ratio = t.abs() / step;
    if ratio > 1e7 {
        return Err(Error::invalid(format!("t/step = {ratio:e} exceeds 1e7")));
    }
    let n = ratio.ceil() as usize;
    if n == 0 {
        return Ok(*pair);
    }
    let h = C64::new(t / n as f64, 0.0);
    let g = build_mode_matrix(spec, pair.xi).matrix * I;
    let mut u = pair.vector();
    for _ in 0..n {
        let k1 = g * u;
        let k2 = g * (u + k1 * (h * 0.5));
        let k3 = g * (u + k2 * (h * 0.5));
        let k4 = g * (u + k3 * h);
        let two = C64::new(2.0, 0.0);
        u += (k1 + k2 * two + k3 * two + k4) * (h / 6.0);
        if !(u[0].norm().is_finite() && u[1].norm().is_finite()) {
            return Err(Error::ModeOverflow {
                xi: Some(pair.xi),
                log_modulus: f64::INFINITY,
                limit: OVERFLOW_LOG_MODULUS,
            });
        }
    }
    Ok(pair.with_vector(u))
}
