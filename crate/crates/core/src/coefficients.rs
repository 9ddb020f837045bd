//! Recursive coefficient sequences γ, λ, α, λ⁺, λ⁻ and the β correction weights.
//!
//! All sequences are returned as 0-based vectors holding the 1-based quantity
//! at `index - 1`: `gamma[j - 1] = γ_j`, `lambda[j - 1] = λ_j`, and so on.

use crate::error::{Error, Result};
use crate::spec::EquationSpec;
use crate::C64;

/// `(1 + (-1)^n) / 2`: 1 for even `n`, 0 for odd.
#[inline]
fn even(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        0.0
    }
}

#[inline]
fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `γ_j = b_{2j} − Σ_{k<j} ā_{2(j−k)} γ_k` for `j = 1..m-1`. Empty when `m = 1`.
pub fn gamma_sequence(spec: &EquationSpec) -> Vec<C64> {
    let m = spec.m();
    let mut gamma: Vec<C64> = Vec::with_capacity(m.saturating_sub(1));
    for j in 1..m {
        let mut g = spec.b(2 * j);
        for k in 1..j {
            g -= spec.a(2 * (j - k)).conj() * gamma[k - 1];
        }
        gamma.push(g);
    }
    gamma
}

/// λ_1..λ_{2m−1} from γ.
///
/// ```text
/// λ_{2j}   = 2 Im a_{2j}   − 2 Σ_{k<j} Im( b̄_{2(j−k)}   γ_k )
/// λ_{2j−1} = 2 Im a_{2j−1} + 2 Σ_{k<j} Im( b̄_{2(j−k)−1} γ_k )
/// ```
pub fn lambda_sequence(spec: &EquationSpec, gamma: &[C64]) -> Vec<f64> {
    let m = spec.m();
    debug_assert_eq!(gamma.len(), m - 1);
    let mut lambda = vec![0.0; 2 * m - 1];
    for j in 1..m {
        let mut s = 0.0;
        for k in 1..j {
            s += (spec.b(2 * (j - k)).conj() * gamma[k - 1]).im;
        }
        lambda[2 * j - 1] = 2.0 * spec.a(2 * j).im - 2.0 * s;
    }
    for j in 1..=m {
        let mut s = 0.0;
        for k in 1..j {
            s += (spec.b(2 * (j - k) - 1).conj() * gamma[k - 1]).im;
        }
        lambda[2 * j - 2] = 2.0 * spec.a(2 * j - 1).im + 2.0 * s;
    }
    lambda
}

/// `α_j = b_j − ½ Σ_{k<j} (1 + (−1)^{j−k}) ā_{j−k} α_k` for `j = 1..2m-1`.
pub fn alpha_sequence(spec: &EquationSpec) -> Vec<C64> {
    let n = 2 * spec.m() - 1;
    let mut alpha: Vec<C64> = Vec::with_capacity(n);
    for j in 1..=n {
        let mut v = spec.b(j);
        for k in 1..j {
            v -= even(j - k) * spec.a(j - k).conj() * alpha[k - 1];
        }
        alpha.push(v);
    }
    alpha
}

/// `(λ⁺, λ⁻)`, each of length `2m − 1`.
///
/// ```text
/// λ⁺_j = 2 Im a_j + Σ_{k<j} (−1)^{j−k+1} Im( b̄_{j−k} α_k )
/// λ⁻_j =          − Σ_{k<j}             Im( b̄_{j−k} α_k )
/// ```
pub fn lambda_pm_sequences(spec: &EquationSpec, alpha: &[C64]) -> (Vec<f64>, Vec<f64>) {
    let n = 2 * spec.m() - 1;
    debug_assert_eq!(alpha.len(), n);
    let mut plus = vec![0.0; n];
    let mut minus = vec![0.0; n];
    for j in 1..=n {
        let mut sp = 0.0;
        let mut sm = 0.0;
        for k in 1..j {
            let t = (spec.b(j - k).conj() * alpha[k - 1]).im;
            sp -= sign(j - k) * t;
            sm -= t;
        }
        plus[j - 1] = 2.0 * spec.a(j).im + sp;
        minus[j - 1] = sm;
    }
    (plus, minus)
}

/// Solution of the two lower-triangular systems defining β⁺ and β⁻:
///
/// ```text
/// λ⁻_{2j*+k+1} = Σ_{j=1}^{k} (−1)^{k−j} λ⁺_{2j*+k−j−1} β⁺_j
/// λ⁻_{2j*+k+1} = Σ_{j=1}^{k} (−1)^{k}   λ⁺_{2j*+k−j−1} β⁻_j      k = 1..2(m−j*−1)
/// ```
///
/// For `j* ∈ {m−1, m}` the systems are empty and so are the results.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BetaSequences {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
}

impl BetaSequences {
    /// Max |lhs − rhs| after substituting β back into both systems.
    pub fn back_substitution_residual(
        &self,
        lambda_plus: &[f64],
        lambda_minus: &[f64],
        jstar: usize,
    ) -> f64 {
        let mut worst: f64 = 0.0;
        for k in 1..=self.plus.len() {
            let target = lambda_minus[2 * jstar + k];
            let mut sp = 0.0;
            let mut sm = 0.0;
            for j in 1..=k {
                let lp = lambda_plus[2 * jstar + k - j - 2];
                sp += sign(k - j) * lp * self.plus[j - 1];
                sm += sign(k) * lp * self.minus[j - 1];
            }
            worst = worst.max((sp - target).abs()).max((sm - target).abs());
        }
        worst
    }
}

pub fn beta_sequences(
    lambda_plus: &[f64],
    lambda_minus: &[f64],
    m: usize,
    jstar: usize,
    tolerance: f64,
) -> Result<BetaSequences> {
    if jstar == 0 || jstar > m {
        return Err(Error::invalid(format!("j* = {jstar} outside 1..={m}")));
    }
    let pivot = lambda_plus[2 * jstar - 2];
    if pivot.abs() <= tolerance {
        return Err(Error::DegenerateBeta {
            index: 2 * jstar - 1,
            value: pivot,
            tolerance,
        });
    }
    if jstar + 1 >= m {
        return Ok(BetaSequences::default());
    }
    let n = 2 * (m - jstar - 1);
    let mut plus = Vec::with_capacity(n);
    let mut minus = Vec::with_capacity(n);
    for k in 1..=n {
        let target = lambda_minus[2 * jstar + k];
        let mut sp = 0.0;
        let mut sm = 0.0;
        for j in 1..k {
            let lp = lambda_plus[2 * jstar + k - j - 2];
            sp += sign(k - j) * lp * plus[j - 1];
            sm += sign(k) * lp * minus[j - 1];
        }
        plus.push((target - sp) / pivot);
        minus.push((target - sm) / (sign(k) * pivot));
    }
    Ok(BetaSequences { plus, minus })
}

/// Every derived sequence of one equation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientTable {
    pub m: usize,
    pub gamma: Vec<C64>,
    pub lambda: Vec<f64>,
    pub alpha: Vec<C64>,
    pub lambda_plus: Vec<f64>,
    pub lambda_minus: Vec<f64>,
    /// Present when the equation is elliptic with `j* ≤ m − 2`.
    pub beta: Option<BetaSequences>,
    pub jstar: Option<usize>,
}

impl CoefficientTable {
    /// Computes all sequences; β is attached when the equation classifies as
    /// elliptic at `zero_tolerance` and the β systems are nonempty.
    pub fn compute(spec: &EquationSpec, zero_tolerance: f64) -> Result<Self> {
        let gamma = gamma_sequence(spec);
        let lambda = lambda_sequence(spec, &gamma);
        let alpha = alpha_sequence(spec);
        let (lambda_plus, lambda_minus) = lambda_pm_sequences(spec, &alpha);
        let mut table = Self {
            m: spec.m(),
            gamma,
            lambda,
            alpha,
            lambda_plus,
            lambda_minus,
            beta: None,
            jstar: None,
        };
        if let Some(idx) = table.first_nonzero_lambda(zero_tolerance) {
            if idx % 2 == 1 {
                let jstar = idx.div_ceil(2);
                table.jstar = Some(jstar);
                if jstar + 2 <= table.m {
                    table.beta = Some(table.betas(jstar, zero_tolerance)?);
                }
            }
        }
        Ok(table)
    }

    /// β sequences for an explicit `j*`.
    pub fn betas(&self, jstar: usize, tolerance: f64) -> Result<BetaSequences> {
        beta_sequences(&self.lambda_plus, &self.lambda_minus, self.m, jstar, tolerance)
    }

    /// 1-based index of the first λ_j with `|λ_j| > tol`.
    pub fn first_nonzero_lambda(&self, tol: f64) -> Option<usize> {
        self.lambda.iter().position(|l| l.abs() > tol).map(|i| i + 1)
    }

    pub fn gamma(&self, j: usize) -> C64 {
        self.gamma[j - 1]
    }

    pub fn lambda(&self, j: usize) -> f64 {
        self.lambda[j - 1]
    }

    pub fn alpha(&self, j: usize) -> C64 {
        self.alpha[j - 1]
    }

    pub fn lambda_plus(&self, j: usize) -> f64 {
        self.lambda_plus[j - 1]
    }

    pub fn lambda_minus(&self, j: usize) -> f64 {
        self.lambda_minus[j - 1]
    }

    /// Largest magnitude among all table entries (at least 1).
    pub fn magnitude(&self) -> f64 {
        let c = self.gamma.iter().chain(&self.alpha).map(|z| z.norm());
        let r = self
            .lambda
            .iter()
            .chain(&self.lambda_plus)
            .chain(&self.lambda_minus)
            .map(|x| x.abs());
        c.chain(r).fold(1.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn gamma_empty_for_m1() {
        let spec = EquationSpec::random(1, &mut ChaCha8Rng::seed_from_u64(1));
        assert!(gamma_sequence(&spec).is_empty());
    }

    #[test]
    fn gamma_one_is_b2() {
        let spec = EquationSpec::zero(2).unwrap().with_b(2, c(0.0, -1.0));
        assert_eq!(gamma_sequence(&spec), vec![c(0.0, -1.0)]);
    }

    #[test]
    fn gamma_two_matches_unrolled_formula() {
        let spec = EquationSpec::random(3, &mut ChaCha8Rng::seed_from_u64(2));
        let g = gamma_sequence(&spec);
        let g1 = spec.b(2);
        let g2 = spec.b(4) - spec.a(2).conj() * g1;
        assert!((g[0] - g1).norm() < 1e-15);
        assert!((g[1] - g2).norm() < 1e-15);
    }

    #[test]
    fn lambda_examples() {
        let spec = EquationSpec::zero(2).unwrap().with_a(1, c(0.0, 1.0));
        let l = lambda_sequence(&spec, &gamma_sequence(&spec));
        assert_eq!(l, vec![2.0, 0.0, 0.0]);

        let mixed = EquationSpec::zero(2)
            .unwrap()
            .with_a(3, c(0.0, 1.0))
            .with_b(1, c(1.0, 0.0))
            .with_b(2, c(0.0, -1.0));
        let l = lambda_sequence(&mixed, &gamma_sequence(&mixed));
        assert!(l.iter().all(|x| x.abs() < 1e-15), "{l:?}");

        let zero = EquationSpec::zero(3).unwrap();
        assert!(lambda_sequence(&zero, &gamma_sequence(&zero)).iter().all(|x| *x == 0.0));
    }

    #[test]
    fn alpha_leading_terms() {
        let spec = EquationSpec::random(2, &mut ChaCha8Rng::seed_from_u64(3));
        let al = alpha_sequence(&spec);
        assert_eq!(al[0], spec.b(1));
        assert_eq!(al[1], spec.b(2));
        assert!((al[2] - (spec.b(3) - spec.a(2).conj() * spec.b(1))).norm() < 1e-15);
    }

    #[test]
    fn alpha_vanishes_without_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut spec = EquationSpec::random(3, &mut rng);
        for j in 1..=6 {
            spec.set_b(j, c(0.0, 0.0));
        }
        let al = alpha_sequence(&spec);
        assert!(al.iter().all(|z| z.norm() == 0.0));
        let (lp, lm) = lambda_pm_sequences(&spec, &al);
        assert!(lm.iter().all(|x| *x == 0.0));
        for j in 1..=5 {
            assert_eq!(lp[j - 1], 2.0 * spec.a(j).im);
        }
    }

    #[test]
    fn remark21_identities_m2() {
        let spec = EquationSpec::random(2, &mut ChaCha8Rng::seed_from_u64(5));
        let t = CoefficientTable::compute(&spec, 1e-12).unwrap();
        assert!((t.lambda(2) - t.lambda_plus(2) - t.lambda_minus(2)).abs() < 1e-14);
        assert!((t.lambda(3) - t.lambda_plus(3) + t.lambda_minus(3)).abs() < 1e-14);
    }

    #[test]
    fn beta_single_row() {
        // m = 3, j* = 1: two unknowns; the first row is β₁⁺ = λ⁻_4 / λ⁺_1.
        let lp = vec![2.0, 0.5, -1.0, 0.25, 3.0];
        let lm = vec![0.0, 0.0, 0.0, 0.7, -0.3];
        let b = beta_sequences(&lp, &lm, 3, 1, 1e-12).unwrap();
        assert_eq!(b.plus.len(), 2);
        assert!((b.plus[0] - 0.7 / 2.0).abs() < 1e-15);
        assert!((b.minus[0] - 0.7 / -2.0).abs() < 1e-15);
        assert!(b.back_substitution_residual(&lp, &lm, 1) < 1e-14);
    }

    #[test]
    fn beta_homogeneous_and_empty() {
        let lp = vec![1.5, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7];
        let lm = vec![0.0; 7];
        let b = beta_sequences(&lp, &lm, 4, 1, 1e-12).unwrap();
        assert_eq!(b.plus, vec![0.0; 4]);
        assert_eq!(b.minus, vec![0.0; 4]);
        // j* = m - 1 and j* = m give empty correction sums
        let lp3 = vec![0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        assert!(beta_sequences(&lp3, &lm, 4, 3, 1e-12).unwrap().plus.is_empty());
        assert!(beta_sequences(&lp3, &lm, 4, 4, 1e-12).unwrap().plus.is_empty());
    }

    #[test]
    fn beta_degenerate_pivot() {
        let lp = vec![0.0; 7];
        let lm = vec![0.0; 7];
        assert!(matches!(
            beta_sequences(&lp, &lm, 4, 1, 1e-12),
            Err(Error::DegenerateBeta { index: 1, .. })
        ));
    }

    #[test]
    fn beta_back_substitution_random_m4() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let spec = EquationSpec::random(4, &mut rng);
            let t = CoefficientTable::compute(&spec, spec.default_zero_tolerance()).unwrap();
            assert_eq!(t.jstar, Some(1));
            let b = t.beta.as_ref().unwrap();
            assert_eq!(b.plus.len(), 4);
            let r = b.back_substitution_residual(&t.lambda_plus, &t.lambda_minus, 1);
            assert!(r < 1e-10, "{r}");
        }
    }
}
