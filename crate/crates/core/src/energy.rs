//! The modified energy `E(f; N)` and the correction functionals of the
//! elliptic case, all evaluated in coefficient space.

use serde::Serialize;

use crate::coefficients::{gamma_sequence, CoefficientTable};
use crate::error::{Error, Result};
use crate::estimates::QuadraticForm;
use crate::laurent::LaurentMat;
use crate::mode::{build_mode_matrix, Mat2};
use crate::spec::EquationSpec;
use crate::state::{Projection, SpectralState};
use crate::C64;

/// Frequencies checked by [`select_n`] reach at least this far.
pub const SELECT_N_MIN_RANGE: usize = 1024;

/// `c(ξ) = Σ_j γ_j ξ^{−2j}`, the off-diagonal symbol of the γ correction.
fn gamma_symbol(gamma: &[C64], xi: f64) -> C64 {
    let inv2 = 1.0 / (xi * xi);
    let mut p = 1.0;
    let mut c = C64::new(0.0, 0.0);
    for g in gamma {
        p *= inv2;
        c += g * p;
    }
    c
}

/// Smallest power of two `N ≥ 1` with `|c(ξ)| < 1/2 + (N/2) ξ^{−2m}` for every
/// integer `ξ ∈ [1, max(K, 1024)]`.
///
/// The correction pairs `û(ξ)` with `û(−ξ)`; per pair it is the form
/// `2 Re(c conj(x) y)` whose operator norm on unit pairs is `|c|`. The bound
/// above therefore gives `|correction| ≤ ½‖f‖² + (N/2)‖∂^{−m}P≠0 f‖²`, which is
/// what the two-sided comparison with `E` needs.
pub fn select_n(spec: &EquationSpec, cutoff: usize) -> f64 {
    let gamma = gamma_sequence(spec);
    if gamma.iter().all(|g| g.norm() == 0.0) {
        return 1.0;
    }
    let top = cutoff.max(SELECT_N_MIN_RANGE);
    let m = spec.m() as i32;
    // N needed at ξ: 2 (|c| − 1/2) ξ^{2m}; take the max and round up to a power of two.
    let need = (1..=top)
        .map(|k| {
            let xi = k as f64;
            2.0 * (gamma_symbol(&gamma, xi).norm() - 0.5) * xi.powi(2 * m)
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let mut n = 1.0;
    while n <= need {
        n *= 2.0;
    }
    n
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub l2_sq: f64,
    pub e_value: f64,
    pub n_used: f64,
    /// `Σ_j Re γ_j ⟨D^{−2j} P≠0 f̄, P≠0 f⟩`
    pub correction_value: f64,
    /// `‖∂^{−m} P≠0 f‖²`
    pub negative_norm_sq: f64,
    /// `(s, ‖f‖_{H^s})` for s = 0, 1/2, 1.
    pub sobolev: Vec<(f64, f64)>,
    pub plus_norm: f64,
    pub minus_norm: f64,
    pub zero_norm: f64,
}

impl EnergyReport {
    /// `‖f‖² + N‖∂^{−m}P≠0 f‖²`, the quantity compared with `E`.
    pub fn main_part(&self) -> f64 {
        self.l2_sq + self.n_used * self.negative_norm_sq
    }

    /// `½E ≤ main ≤ 2E`.
    pub fn sandwich_holds(&self) -> bool {
        let main = self.main_part();
        0.5 * self.e_value <= main && main <= 2.0 * self.e_value
    }
}

/// `E(f; N) = ‖f‖² + N‖∂^{−m}P≠0 f‖² + Σ_j Re γ_j ⟨D^{−2j}P≠0 f̄, P≠0 f⟩`.
///
/// The conjugate `f̄` has coefficient `conj f̂(−ξ)` at ξ, so the pairing is
/// `2 Σ_{ξ≥1} ξ^{−2j} conj f̂(ξ) conj f̂(−ξ)`.
pub fn energy_e(spec: &EquationSpec, state: &SpectralState, n: f64) -> EnergyReport {
    let gamma = gamma_sequence(spec);
    let m = spec.m() as i32;
    let mut negative = 0.0;
    let mut corr = 0.0;
    for k in 1..=state.cutoff() {
        let xi = k as f64;
        let (x, y) = (state.get(k as i64), state.get(-(k as i64)));
        negative += xi.powi(-2 * m) * (x.norm_sqr() + y.norm_sqr());
        corr += 2.0 * (gamma_symbol(&gamma, xi) * x.conj() * y.conj()).re;
    }
    let l2_sq = state.l2_norm_sq();
    EnergyReport {
        l2_sq,
        e_value: l2_sq + n * negative + corr,
        n_used: n,
        correction_value: corr,
        negative_norm_sq: negative,
        sobolev: [0.0, 0.5, 1.0].iter().map(|&s| (s, state.sobolev_norm(s))).collect(),
        plus_norm: state.project(Projection::Plus).l2_norm(),
        minus_norm: state.project(Projection::Minus).l2_norm(),
        zero_norm: state.project(Projection::Zero).l2_norm(),
    }
}

/// Per-pair matrix of `E` at ξ ≥ 1; ξ = 0 carries `|û(0)|² = U*(I/2)U`.
pub fn energy_density(spec: &EquationSpec, n: f64, xi: usize) -> Mat2 {
    if xi == 0 {
        return Mat2::identity() * C64::new(0.5, 0.0);
    }
    let x = xi as f64;
    let c = gamma_symbol(&gamma_sequence(spec), x);
    let d = C64::new(1.0 + n * x.powi(-2 * spec.m() as i32), 0.0);
    Mat2::new(d, c, c.conj(), d)
}

/// Largest generalized eigenvalue of the Hermitian pencil `(R, A)`, `A > 0`.
fn pencil_max(r: &Mat2, a: &Mat2) -> f64 {
    // det(R − λA) = λ² det A − λ (R00 A11 + R11 A00 − R01 A10 − R10 A01) + det R
    let qa = a.determinant().re;
    let qb = -(r[(0, 0)] * a[(1, 1)] + r[(1, 1)] * a[(0, 0)] - r[(0, 1)] * a[(1, 0)] - r[(1, 0)] * a[(0, 1)]).re;
    let qc = r.determinant().re;
    let disc = (qb * qb - 4.0 * qa * qc).max(0.0).sqrt();
    (-qb + disc) / (2.0 * qa)
}

/// Growth constant `Ĉ(K) = max_{0≤ξ≤K} λ_max(R_E(ξ), A_E(ξ))`, so that
/// `dE/dt ≤ Ĉ E` along every solution truncated at K and `E(t) ≤ E(0) e^{Ĉt}`
/// for `t ≥ 0`. Requires `A_E > 0`, which `select_n` guarantees.
pub fn gronwall_rate(spec: &EquationSpec, cutoff: usize, n: f64) -> Result<f64> {
    let mut worst = f64::NEG_INFINITY;
    for xi in 0..=cutoff {
        let a = energy_density(spec, n, xi);
        if a.determinant().re <= 0.0 || a[(0, 0)].re <= 0.0 {
            return Err(Error::Numeric(format!("energy form not positive at xi = {xi}")));
        }
        let m = build_mode_matrix(spec, xi as f64).matrix;
        let r = (a * m - m.adjoint() * a) * C64::new(0.0, 1.0);
        worst = worst.max(pencil_max(&r, &a));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrectionValues {
    pub g_plus: f64,
    pub g_minus: f64,
    /// `F⁻_k`, k = 1..
    pub f_minus: Vec<f64>,
    /// `F⁺_k`, k = 1..
    pub f_plus: Vec<f64>,
    pub beta_plus: Vec<f64>,
    pub beta_minus: Vec<f64>,
}

/// `G^± = Σ_j Re α_j ⟨D^{−j} conj(P^∓u), P^±u⟩ + Σ_k β^±_k F^∓_k` with
///
/// ```text
/// F⁻_k = ‖|∂|^{−(k+2)/2} P⁻u‖² + Σ_j Re α_j ⟨D^{−j}|∂|^{−k−2} conj(P⁺u), P⁻u⟩
/// F⁺_k = ‖|∂|^{−(k+2)/2} P⁺u‖² + Σ_j Re α_j ⟨D^{−j}|∂|^{−k−2} conj(P⁻u), P⁺u⟩
/// ```
pub fn correction_terms(
    spec: &EquationSpec,
    table: &CoefficientTable,
    state: &SpectralState,
    jstar: usize,
) -> Result<CorrectionValues> {
    let beta = table.betas(jstar, spec.default_zero_tolerance())?;
    let n_beta = beta.plus.len();
    let mut g_plus = 0.0;
    let mut g_minus = 0.0;
    let mut f_minus = vec![0.0; n_beta];
    let mut f_plus = vec![0.0; n_beta];
    for k in 1..=state.cutoff() {
        let xi = k as f64;
        let x = state.get(k as i64);
        let y = state.get(-(k as i64)).conj();
        let cross = x.conj() * y;
        // Σ α_j ξ^{−j} and Σ (−1)^j α_j ξ^{−j}
        let (mut sa, mut sa_alt) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
        let mut p = 1.0;
        for (i, al) in table.alpha.iter().enumerate() {
            p /= xi;
            sa += al * p;
            sa_alt += if i % 2 == 0 { -al * p } else { al * p };
        }
        g_plus += (sa * cross).re;
        g_minus += (sa_alt * cross).re;
        for kk in 0..n_beta {
            let w = xi.powi(-(kk as i32 + 3));
            f_minus[kk] += w * (y.norm_sqr() + (sa_alt * cross).re);
            f_plus[kk] += w * (x.norm_sqr() + (sa * cross).re);
        }
    }
    g_plus += beta.plus.iter().zip(&f_minus).map(|(b, f)| b * f).sum::<f64>();
    g_minus += beta.minus.iter().zip(&f_plus).map(|(b, f)| b * f).sum::<f64>();
    Ok(CorrectionValues {
        g_plus,
        g_minus,
        f_minus,
        f_plus,
        beta_plus: beta.plus,
        beta_minus: beta.minus,
    })
}

/// Energy of a state under a Laurent-form density (helper for cross-checks).
pub fn form_energy(form: &LaurentMat, state: &SpectralState) -> f64 {
    QuadraticForm::new("", form.clone()).evaluate(state)
}
