//! Structural checks on the coefficient sequences: the Hamiltonian and mass
//! conditions, the λ = λ⁺ ± λ⁻ identities, the λ⁻ recursion and the vanishing
//! of the leading λ⁻ under the even-index hypothesis.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::coefficients::{gamma_sequence, CoefficientTable};
use crate::error::{Error, Result};
use crate::spec::EquationSpec;
use crate::C64;

/// Tolerance of the randomized identity checks, relative to the table scale.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub max_residual: f64,
    pub tolerance: f64,
    pub details: Vec<(String, f64)>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    fn from_details(name: &str, tolerance: f64, details: Vec<(String, f64)>) -> Self {
        let max_residual = details.iter().map(|d| d.1).fold(0.0, f64::max);
        let passed = details.iter().all(|d| d.1 <= tolerance);
        Self {
            name: name.to_string(),
            passed,
            max_residual,
            tolerance,
            details,
            notes: Vec::new(),
        }
    }

    /// The `n` largest residuals, largest first.
    pub fn worst(&self, n: usize) -> Vec<(String, f64)> {
        let mut d = self.details.clone();
        d.sort_by(|a, b| b.1.total_cmp(&a.1));
        d.truncate(n);
        d
    }
}

/// `Im a_j = 0` for `j < 2m` and `b_{2n−1} = 0`: the equation admits the
/// quadratic Hamiltonian. Passing implies dispersive type.
pub fn hamiltonian_check(spec: &EquationSpec) -> CheckReport {
    let m = spec.m();
    let tol = spec.default_zero_tolerance();
    let mut details = Vec::new();
    for j in 1..2 * m {
        details.push((format!("Im a_{j}"), spec.a(j).im.abs()));
    }
    for n in 1..=m {
        details.push((format!("b_{}", 2 * n - 1), spec.b(2 * n - 1).norm()));
    }
    let mut r = CheckReport::from_details("hamiltonian", tol, details);
    r.notes
        .push("a Hamiltonian equation has all lambda_j = 0 (dispersive type)".into());
    r
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassConservationReport {
    /// `Im a_j = 0` for `1 ≤ j ≤ 2m−1` and `b_{2n} = 0`.
    pub literal: CheckReport,
    /// The literal condition plus `Im a_{2m} = 0`; only this one makes
    /// `‖u(t)‖` constant, since the zeroth-order term contributes `−2 Im a_{2m}‖u‖²`.
    pub strict: CheckReport,
}

pub fn mass_conservation_check(spec: &EquationSpec) -> MassConservationReport {
    let m = spec.m();
    let tol = spec.default_zero_tolerance();
    let mut details = Vec::new();
    for j in 1..2 * m {
        details.push((format!("Im a_{j}"), spec.a(j).im.abs()));
    }
    for n in 1..=m {
        details.push((format!("b_{}", 2 * n), spec.b(2 * n).norm()));
    }
    let literal = CheckReport::from_details("mass_conservation_literal", tol, details.clone());
    details.push((format!("Im a_{}", 2 * m), spec.a(2 * m).im.abs()));
    let strict = CheckReport::from_details("mass_conservation_strict", tol, details);
    MassConservationReport { literal, strict }
}

/// Residuals of `λ_{2j} = λ⁺_{2j} + λ⁻_{2j}`, `λ_{2k−1} = λ⁺_{2k−1} − λ⁻_{2k−1}`,
/// `γ_j = α_{2j}` and `λ⁻_1 = λ⁻_2 = λ⁻_3 = 0`, relative to the table magnitude.
pub fn remark21_residual(table: &CoefficientTable) -> f64 {
    let m = table.m;
    let mut worst: f64 = 0.0;
    for j in 1..m {
        worst = worst
            .max((table.lambda(2 * j) - table.lambda_plus(2 * j) - table.lambda_minus(2 * j)).abs())
            .max((table.gamma(j) - table.alpha(2 * j)).norm());
    }
    for k in 1..=m {
        worst = worst.max(
            (table.lambda(2 * k - 1) - table.lambda_plus(2 * k - 1) + table.lambda_minus(2 * k - 1))
                .abs(),
        );
    }
    for j in 1..=3.min(2 * m - 1) {
        worst = worst.max(table.lambda_minus(j).abs());
    }
    worst / table.magnitude()
}

/// Randomized suite of [`remark21_residual`] over `m = 1..=m_max`.
pub fn remark21_check(m_max: usize, trials: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut details = Vec::with_capacity(m_max * trials);
    for m in 1..=m_max {
        for t in 0..trials {
            let spec = EquationSpec::random(m, &mut rng);
            let table = table_of(&spec);
            details.push((format!("m={m}/trial={t}"), remark21_residual(&table)));
        }
    }
    CheckReport::from_details("remark21", IDENTITY_TOLERANCE, details)
}

fn table_of(spec: &EquationSpec) -> CoefficientTable {
    // β is not needed here; a zero tolerance of +inf skips classification.
    CoefficientTable::compute(spec, f64::INFINITY).expect("no beta requested")
}

/// Both sides of the λ⁻ recursion for `j = 1..2(m−1)`:
///
/// ```text
/// λ⁻_{j+1} = −½ Σ_{l<j} (1+(−1)^l) (Re a_l) λ⁻_{j+1−l}
///            −½ Σ_{l<j} Σ_{k≤j−l} (1+(−1)^l) (Im a_l) Re( b̄_{j−l−k+1} α_k )
/// ```
///
/// Returns `(lhs, rhs)` pairs.
pub fn lemma22_sides(spec: &EquationSpec, table: &CoefficientTable) -> Vec<(f64, f64)> {
    let m = spec.m();
    let mut out = Vec::with_capacity(2 * (m - 1));
    for j in 1..=2 * (m - 1) {
        let lhs = table.lambda_minus(j + 1);
        let mut rhs = 0.0;
        for l in (2..j).step_by(2) {
            rhs -= spec.a(l).re * table.lambda_minus(j + 1 - l);
            let mut s = 0.0;
            for k in 1..=j - l {
                s += (spec.b(j - l - k + 1).conj() * table.alpha(k)).re;
            }
            rhs -= spec.a(l).im * s;
        }
        out.push((lhs, rhs));
    }
    out
}

/// The λ⁻ recursion of [`lemma22_sides`] on `spec` itself (trial 0) and on `trials − 1` further
/// random specs of the same order.
pub fn lemma22_check(spec: &EquationSpec, trials: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut details = Vec::with_capacity(trials.max(1));
    for t in 0..trials.max(1) {
        let s = if t == 0 {
            spec.clone()
        } else {
            EquationSpec::random(spec.m(), &mut rng)
        };
        let table = table_of(&s);
        let scale = table.magnitude();
        let r = lemma22_sides(&s, &table)
            .into_iter()
            .map(|(l, r)| (l - r).abs() / scale)
            .fold(0.0, f64::max);
        details.push((format!("m={}/trial={t}", s.m()), r));
    }
    CheckReport::from_details("lemma22", IDENTITY_TOLERANCE, details)
}

/// Draws a random spec of order `2m` and then solves `λ_{2j} = 0` for
/// `Im a_{2j}`, `j = 1..=jstar`, in increasing `j`. Each λ_{2j} depends on
/// `a_{2j}` and on γ_1..γ_{j−1}, which only involve `a_2..a_{2j−2}`.
pub fn lemma23_sample<R: rand::Rng + ?Sized>(m: usize, jstar: usize, rng: &mut R) -> EquationSpec {
    let mut spec = EquationSpec::random(m, rng);
    for j in 1..=jstar.min(m - 1) {
        let gamma = gamma_sequence(&spec);
        let mut s = 0.0;
        for k in 1..j {
            s += (spec.b(2 * (j - k)).conj() * gamma[k - 1]).im;
        }
        let re = spec.a(2 * j).re;
        spec.set_a(2 * j, C64::new(re, s));
    }
    spec
}

/// Largest violation among the conclusions for a spec satisfying the
/// hypothesis `λ_{2j} = 0`, `j ≤ jstar`: `Im a_{2j} = λ⁺_{2j} = 0` (`j ≤ jstar`),
/// `λ⁻_j = 0` (`j ≤ 2·jstar + 3`), and `λ_{2j*+2} = 2 Im a_{2j*+2}`,
/// `λ_{2j*+4} = 2 Im a_{2j*+4}` where those indices exist.
pub fn lemma23_residual(spec: &EquationSpec, jstar: usize) -> f64 {
    let table = table_of(spec);
    let n = 2 * spec.m() - 1;
    let mut worst: f64 = 0.0;
    for j in 1..=jstar {
        worst = worst
            .max(spec.a(2 * j).im.abs())
            .max(table.lambda_plus(2 * j).abs());
    }
    for j in 1..=(2 * jstar + 3).min(n) {
        worst = worst.max(table.lambda_minus(j).abs());
    }
    for idx in [2 * jstar + 2, 2 * jstar + 4] {
        if idx <= n {
            worst = worst.max((table.lambda(idx) - 2.0 * spec.a(idx).im).abs());
        }
    }
    worst / table.magnitude()
}

pub fn lemma23_check(m: usize, jstar: usize, trials: usize, seed: u64) -> Result<CheckReport> {
    if m < 2 || jstar == 0 || jstar >= m {
        return Err(Error::invalid(format!(
            "lemma23 needs 1 <= jstar <= m - 1, got m = {m}, jstar = {jstar}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let details = (0..trials)
        .map(|t| {
            let spec = lemma23_sample(m, jstar, &mut rng);
            (format!("m={m}/jstar={jstar}/trial={t}"), lemma23_residual(&spec, jstar))
        })
        .collect();
    Ok(CheckReport::from_details("lemma23", IDENTITY_TOLERANCE, details))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn i() -> C64 {
        C64::new(0.0, 1.0)
    }

    #[test]
    fn hamiltonian_examples() {
        assert!(hamiltonian_check(&EquationSpec::zero(2).unwrap()).passed);
        let s = EquationSpec::zero(2).unwrap().with_b(1, C64::new(1.0, 0.0));
        assert!(!hamiltonian_check(&s).passed);
    }

    #[test]
    fn hamiltonian_implies_dispersive() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..500 {
            let m = 1 + (rand::Rng::gen_range(&mut rng, 0..5));
            let mut s = EquationSpec::random(m, &mut rng);
            for j in 1..2 * m {
                let re = s.a(j).re;
                s.set_a(j, C64::new(re, 0.0));
            }
            for n in 1..=m {
                s.set_b(2 * n - 1, C64::new(0.0, 0.0));
            }
            assert!(hamiltonian_check(&s).passed);
            let c = crate::classify::classify(&s, s.default_zero_tolerance());
            assert_eq!(c.kind, crate::classify::Kind::Dispersive, "{s:?}");
        }
    }

    #[test]
    fn mass_conservation_variants() {
        let z = mass_conservation_check(&EquationSpec::zero(2).unwrap());
        assert!(z.literal.passed && z.strict.passed);
        let s = EquationSpec::zero(2).unwrap().with_a(4, i());
        let r = mass_conservation_check(&s);
        assert!(r.literal.passed);
        assert!(!r.strict.passed);
    }

    #[test]
    fn lemma22_trivial_without_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut s = EquationSpec::random(3, &mut rng);
        for j in 1..=6 {
            s.set_b(j, C64::new(0.0, 0.0));
        }
        let t = table_of(&s);
        for (l, r) in lemma22_sides(&s, &t) {
            assert_eq!(l, 0.0);
            assert_eq!(r, 0.0);
        }
    }

    #[test]
    fn lemma22_random() {
        let s = EquationSpec::random(2, &mut ChaCha8Rng::seed_from_u64(3));
        assert!(lemma22_check(&s, 50, 1).passed);
        let s6 = EquationSpec::random(6, &mut ChaCha8Rng::seed_from_u64(4));
        let r = lemma22_check(&s6, 1000, 5);
        assert!(r.passed, "max residual {}", r.max_residual);
    }

    #[test]
    fn lemma22_printed_sign_does_not_hold() {
        // The (Im a_l) double sum enters with a minus sign; flipping it breaks
        // the identity as soon as some Im a_{2l} is nonzero.
        let s = EquationSpec::random(3, &mut ChaCha8Rng::seed_from_u64(8));
        let t = table_of(&s);
        let j = 4;
        let l = 2;
        let mut s2 = 0.0;
        for k in 1..=j - l {
            s2 += (s.b(j - l - k + 1).conj() * t.alpha(k)).re;
        }
        let (lhs, rhs) = lemma22_sides(&s, &t)[j - 1];
        assert!((lhs - rhs).abs() < 1e-12);
        let flipped = rhs + 2.0 * s.a(l).im * s2;
        assert!((lhs - flipped).abs() > 1e-3);
    }

    #[test]
    fn lemma23_zero_b() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut s = lemma23_sample(4, 2, &mut rng);
        for j in 1..=8 {
            s.set_b(j, C64::new(0.0, 0.0));
        }
        for j in 1..=2 {
            let re = s.a(2 * j).re;
            s.set_a(2 * j, C64::new(re, 0.0));
        }
        let t = table_of(&s);
        assert!(t.lambda_minus.iter().all(|x| *x == 0.0));
        assert_eq!(lemma23_residual(&s, 2), 0.0);
    }

    #[test]
    fn lemma23_m3_kills_lambda_minus_4_and_5() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let s = lemma23_sample(3, 1, &mut rng);
            let t = table_of(&s);
            assert!(t.lambda(2).abs() < 1e-14);
            assert!(t.lambda_minus(4).abs() < 1e-12);
            assert!(t.lambda_minus(5).abs() < 1e-12);
        }
    }

    #[test]
    fn lemma23_m5_jstar3() {
        let r = lemma23_check(5, 3, 500, 9).unwrap();
        assert!(r.passed, "max residual {}", r.max_residual);
    }

    #[test]
    fn lemma23_rejects_bad_jstar() {
        assert!(lemma23_check(3, 3, 1, 0).is_err());
        assert!(lemma23_check(3, 0, 1, 0).is_err());
    }

    #[test]
    fn remark21_random() {
        let r = remark21_check(6, 200, 1);
        assert!(r.passed, "{}", r.max_residual);
        assert_eq!(r.worst(3).len(), 3);
    }
}
