//! Energy densities as per-mode quadratic forms and their time derivatives.
//!
//! Each energy is `Σ_{ξ≥1} U_ξ* A(ξ) U_ξ` with `U_ξ = (û(ξ), conj û(−ξ))`.
//! Along `∂_t U = iMU` its derivative density is `R = i(A M − M* A)`. An
//! estimate "closes" when `R` plus the compensating λ densities stays bounded
//! in ξ; the forms are built as Laurent polynomials so that cancellations are
//! exact up to rounding and can be snapped before evaluation at large ξ.

use std::io::Write;

use serde::Serialize;

use crate::classify::{classify, Classification, Kind, Smoothing};
use crate::coefficients::CoefficientTable;
use crate::error::{Error, Result};
use crate::laurent::LaurentMat;
use crate::mode::{build_mode_matrix, coupling_matrix, eigen_exponents, predicted_rate_diagonal, Mat2};
use crate::spec::EquationSpec;
use crate::C64;

/// Coefficients below this fraction of their term bound count as cancelled.
pub const SNAP_RELATIVE: f64 = 1e-10;
/// Slope thresholds for bounded / growing residuals.
pub const BOUNDED_SLOPE: f64 = 0.1;
pub const GROWING_SLOPE: f64 = 0.9;
/// Exponents of the evaluation grid `ξ = 2^k` and of the fitted tail.
pub const GRID_EXPONENTS: std::ops::RangeInclusive<i32> = 0..=10;
pub const FIT_EXPONENTS: std::ops::RangeInclusive<i32> = 6..=10;

const ZERO: C64 = C64::new(0.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn diag(a: f64, b: f64) -> Mat2 {
    Mat2::new(re(a), ZERO, ZERO, re(b))
}

/// Hermitian off-diagonal `(0, c; c̄, 0)`.
fn offdiag(c: C64) -> Mat2 {
    Mat2::new(ZERO, c, c.conj(), ZERO)
}

fn sign(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "+",
            Side::Minus => "-",
        }
    }
}

/// `A(ξ)` for ξ ≥ 1 as a Laurent polynomial.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    pub description: String,
    pub form: LaurentMat,
}

impl QuadraticForm {
    pub fn new(description: impl Into<String>, form: LaurentMat) -> Self {
        Self {
            description: description.into(),
            form,
        }
    }

    /// `‖u‖²`.
    pub fn identity() -> Self {
        Self::new("|u|^2", LaurentMat::monomial(0, Mat2::identity()))
    }

    /// `‖u‖² + Σ_j Re γ_j ⟨D^{−2j} P≠0 ū, P≠0 u⟩`.
    pub fn gamma_energy(table: &CoefficientTable, ablate: bool) -> Self {
        let mut a = LaurentMat::monomial(0, Mat2::identity());
        if !ablate {
            for (j, g) in table.gamma.iter().enumerate() {
                a = a.add(&LaurentMat::monomial(-2 * (j as i32 + 1), offdiag(*g)));
            }
        }
        Self::new("|u|^2 + sum Re gamma_j <D^-2j ubar, u>", a)
    }

    /// `‖P±u‖² + Σ_j Re α_j ⟨D^{−j} conj(P∓u), P±u⟩`.
    pub fn alpha_energy(table: &CoefficientTable, side: Side, ablate: bool) -> Self {
        let mut a = LaurentMat::monomial(
            0,
            match side {
                Side::Plus => diag(1.0, 0.0),
                Side::Minus => diag(0.0, 1.0),
            },
        );
        if !ablate {
            for (i, al) in table.alpha.iter().enumerate() {
                let j = i + 1;
                let c = match side {
                    Side::Plus => *al,
                    Side::Minus => al * sign(j),
                };
                a = a.add(&LaurentMat::monomial(-(j as i32), offdiag(c * 0.5)));
            }
        }
        Self::new(format!("|P{0}u|^2 + alpha pairings", side.label()), a)
    }

    /// The α energy plus `Σ_k β_k F_k^∓`, the twisted energy of the elliptic case.
    pub fn beta_energy(table: &CoefficientTable, side: Side, beta: &[f64], ablate: bool) -> Self {
        let mut a = Self::alpha_energy(table, side, false).form;
        if !ablate {
            for (i, &bk) in beta.iter().enumerate() {
                let shift = i as i32 + 3; // k + 2
                let weight = match side {
                    Side::Plus => diag(0.0, bk),
                    Side::Minus => diag(bk, 0.0),
                };
                a = a.add(&LaurentMat::monomial(-shift, weight));
                for (l, al) in table.alpha.iter().enumerate() {
                    let j = l + 1;
                    let c = match side {
                        Side::Plus => al * sign(j),
                        Side::Minus => *al,
                    };
                    a = a.add(&LaurentMat::monomial(-(j as i32) - shift, offdiag(c * (0.5 * bk))));
                }
            }
        }
        Self::new(format!("twisted P{0} energy with beta corrections", side.label()), a)
    }

    pub fn at(&self, xi: f64) -> Mat2 {
        self.form.eval(xi)
    }

    /// `Σ_{ξ=1}^{K} U_ξ* A(ξ) U_ξ` over a state.
    pub fn evaluate(&self, state: &crate::state::SpectralState) -> f64 {
        (1..=state.cutoff())
            .map(|xi| {
                let u = state.pair(xi).vector();
                (u.adjoint() * self.at(xi as f64) * u)[(0, 0)].re
            })
            .sum()
    }
}

/// `M(ξ)` as a polynomial in ξ.
pub fn mode_matrix_laurent(spec: &EquationSpec) -> LaurentMat {
    let n = spec.order();
    LaurentMat::from_terms((0..=n).map(|j| ((n - j) as i32, coupling_matrix(spec, j))))
}

/// `R(ξ) = i(A M − M* A)`, the density of `d/dt U*AU`.
pub fn derivative_form(spec: &EquationSpec, a: &QuadraticForm, xi: f64) -> Mat2 {
    let m = build_mode_matrix(spec, xi).matrix;
    let a = a.at(xi);
    (a * m - m.adjoint() * a) * I
}

pub fn derivative_laurent(spec: &EquationSpec, a: &QuadraticForm) -> LaurentMat {
    let m = mode_matrix_laurent(spec);
    a.form.mul(&m).sub(&m.adjoint().mul(&a.form)).scale(I)
}

/// `diag(Σ_k w0_k ξ^{2m−k}, Σ_k w1_k ξ^{2m−k})`, `k = 1..2m−1`.
fn diag_density(m: usize, w0: impl Fn(usize) -> f64, w1: impl Fn(usize) -> f64) -> LaurentMat {
    LaurentMat::from_terms((1..2 * m).map(|k| ((2 * m - k) as i32, diag(w0(k), w1(k)))))
}

/// Per-mode matrix of `Σ λ_{2j}‖|∂|^{m−j}u‖² + Σ λ_{2j−1}⟨D^{2(m−j)+1}u, u⟩`.
pub fn lambda_density(table: &CoefficientTable) -> LaurentMat {
    let l = &table.lambda;
    diag_density(table.m, |k| l[k - 1], |k| sign(k) * l[k - 1])
}

/// Per-mode matrix of `Σ_j λ^±_j ‖|∂|^{m−j/2} P^± u‖²` for the chosen side.
pub fn lambda_pm_density(table: &CoefficientTable, side: Side) -> LaurentMat {
    let (lp, lm) = (&table.lambda_plus, &table.lambda_minus);
    match side {
        Side::Plus => diag_density(table.m, |k| lp[k - 1], |k| lm[k - 1]),
        Side::Minus => diag_density(table.m, |k| sign(k) * lm[k - 1], |k| sign(k) * lp[k - 1]),
    }
}

/// A residual density, snapped and ready for evaluation on a ξ grid.
#[derive(Debug, Clone)]
pub struct ResidualForm {
    pub name: String,
    pub residual: LaurentMat,
    /// Largest `|coefficient| / bound` removed as cancelled.
    pub cancellation_leftover: f64,
    /// Reference scale for the norm floor in the growth fit.
    pub scale: f64,
}

impl ResidualForm {
    fn build(name: String, mut residual: LaurentMat, scale: f64) -> Self {
        let cancellation_leftover = residual.snap(SNAP_RELATIVE);
        Self {
            name,
            residual,
            cancellation_leftover,
            scale,
        }
    }

    /// `R + λ density` for the γ-corrected energy.
    pub fn prop21(spec: &EquationSpec, table: &CoefficientTable, ablate: bool) -> Self {
        let a = QuadraticForm::gamma_energy(table, ablate);
        let r = derivative_laurent(spec, &a).add(&lambda_density(table));
        let name = if ablate { "prop21 (ablated)" } else { "prop21" };
        Self::build(name.into(), r, table.magnitude())
    }

    /// `R + λ^± density` for the α-corrected `P±` energy.
    pub fn lemma21(spec: &EquationSpec, table: &CoefficientTable, side: Side, ablate: bool) -> Self {
        let a = QuadraticForm::alpha_energy(table, side, ablate);
        let r = derivative_laurent(spec, &a).add(&lambda_pm_density(table, side));
        let name = format!("lemma21{}{}", side.label(), if ablate { " (ablated)" } else { "" });
        Self::build(name, r, table.magnitude())
    }

    /// Twisted elliptic energy: `S (R + λ⁺_{2j*−1} compensator) S` with
    /// `S = diag(ξ^{−(m−j*)}, 1)` on the plus side (`diag(1, ξ^{−(m−j*)})` on
    /// the minus side), so the allowed `C‖|∂|^{m−j*}P±u‖²` density is divided out.
    pub fn prop22(
        spec: &EquationSpec,
        table: &CoefficientTable,
        side: Side,
        ablate: bool,
    ) -> Result<Self> {
        let jstar = table
            .jstar
            .ok_or_else(|| Error::invalid("prop22 needs an elliptic equation"))?;
        let beta = match &table.beta {
            Some(b) => match side {
                Side::Plus => b.plus.clone(),
                Side::Minus => b.minus.clone(),
            },
            None if jstar + 2 <= table.m => {
                let b = table.betas(jstar, spec.default_zero_tolerance())?;
                match side {
                    Side::Plus => b.plus,
                    Side::Minus => b.minus,
                }
            }
            None => Vec::new(),
        };
        let a = QuadraticForm::beta_energy(table, side, &beta, ablate);
        let lead = table.lambda_plus(2 * jstar - 1);
        let p = (2 * table.m - 2 * jstar + 1) as i32;
        let comp = match side {
            Side::Plus => diag(lead, 0.0),
            Side::Minus => diag(0.0, -lead),
        };
        let mut r = derivative_laurent(spec, &a).add(&LaurentMat::monomial(p, comp));
        let cancellation_leftover = r.snap(SNAP_RELATIVE);
        let e = -((table.m - jstar) as i32);
        let s = match side {
            Side::Plus => LaurentMat::monomial(e, diag(1.0, 0.0)).add(&LaurentMat::monomial(0, diag(0.0, 1.0))),
            Side::Minus => LaurentMat::monomial(0, diag(1.0, 0.0)).add(&LaurentMat::monomial(e, diag(0.0, 1.0))),
        };
        let weighted = s.mul(&r).mul(&s);
        let name = format!("prop22{}{}", side.label(), if ablate { " (ablated)" } else { "" });
        Ok(Self {
            name,
            residual: weighted,
            cancellation_leftover,
            scale: table.magnitude(),
        })
    }

    pub fn at(&self, xi: f64) -> Mat2 {
        self.residual.eval(xi)
    }

    pub fn scan(&self) -> EstimateReport {
        EstimateReport::from_form(self)
    }
}

pub fn prop21_residual(spec: &EquationSpec, table: &CoefficientTable, xi: f64) -> Mat2 {
    ResidualForm::prop21(spec, table, false).at(xi)
}

pub fn lemma21_residual(spec: &EquationSpec, table: &CoefficientTable, xi: f64, side: Side) -> Mat2 {
    ResidualForm::lemma21(spec, table, side, false).at(xi)
}

pub fn prop22_residual(spec: &EquationSpec, table: &CoefficientTable, xi: f64, side: Side) -> Result<Mat2> {
    Ok(ResidualForm::prop22(spec, table, side, false)?.at(xi))
}

/// Largest singular value of a 2×2 matrix.
pub fn operator_norm(a: &Mat2) -> f64 {
    let f2 = a.norm_squared();
    let det = a.determinant().norm();
    let disc = (f2 * f2 - 4.0 * det * det).max(0.0);
    ((f2 + disc.sqrt()) / 2.0).sqrt()
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub name: String,
    pub xi_grid: Vec<f64>,
    pub norms: Vec<f64>,
    pub sup_norm: f64,
    /// Log-log slope of the residual norm over the tail of the grid.
    pub growth_fit: f64,
    pub passed: bool,
    pub cancellation_leftover: f64,
}

impl EstimateReport {
    pub fn from_form(form: &ResidualForm) -> Self {
        let xi_grid: Vec<f64> = GRID_EXPONENTS.map(|k| 2f64.powi(k)).collect();
        let norms: Vec<f64> = xi_grid.iter().map(|&x| operator_norm(&form.at(x))).collect();
        let sup_norm = norms.iter().copied().fold(0.0, f64::max);
        let floor = 1e-12 * form.scale;
        let (fx, fy): (Vec<f64>, Vec<f64>) = xi_grid
            .iter()
            .zip(&norms)
            .filter(|(x, _)| FIT_EXPONENTS.contains(&(x.log2().round() as i32)))
            .map(|(&x, &n)| (x, n.max(floor)))
            .unzip();
        let growth_fit = loglog_slope(&fx, &fy);
        let passed = sup_norm.is_finite() && growth_fit <= BOUNDED_SLOPE;
        Self {
            name: form.name.clone(),
            xi_grid,
            norms,
            sup_norm,
            growth_fit,
            passed,
            cancellation_leftover: form.cancellation_leftover,
        }
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["xi", "norm"])?;
        for (x, n) in self.xi_grid.iter().zip(&self.norms) {
            w.write_record([format!("{x:.16e}"), format!("{n:.16e}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateRow {
    pub xi: f64,
    /// Forward log-modulus rate of the eigenvector dominated by `û(ξ)`.
    pub rate_plus: f64,
    /// Same for the eigenvector dominated by `conj û(−ξ)`.
    pub rate_minus: f64,
    pub predicted_diagonal: f64,
    /// Eigenvectors equally aligned or eigenvalues defective.
    pub tie: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateScan {
    pub rows: Vec<RateRow>,
    /// Expected signs of (rate_plus, rate_minus), `None` for dispersive equations.
    pub expected: Option<(f64, f64)>,
    /// Smallest ξ from which every row matches the expected signs.
    pub xi0: Option<f64>,
}

/// Signs of the forward rates implied by the smoothing directions.
pub fn expected_rate_signs(c: &Classification) -> Option<(f64, f64)> {
    match c.smoothing {
        Smoothing::None => None,
        Smoothing::Parabolic { forward: true } => Some((-1.0, -1.0)),
        Smoothing::Parabolic { forward: false } => Some((1.0, 1.0)),
        Smoothing::Elliptic { plus_forward: true } => Some((-1.0, 1.0)),
        Smoothing::Elliptic { plus_forward: false } => Some((1.0, -1.0)),
    }
}

pub fn smoothing_rate_scan(spec: &EquationSpec, xi_max: usize) -> Result<RateScan> {
    if xi_max < 4 {
        return Err(Error::invalid("xi-max must be at least 4"));
    }
    let class = classify(spec, spec.default_zero_tolerance());
    let lambda = &class.lambda;
    let rows: Vec<RateRow> = (1..=xi_max)
        .map(|k| {
            let xi = k as f64;
            let e = eigen_exponents(spec, xi);
            let (a1, a2) = (e.v1[0].norm(), e.v2[0].norm());
            let tie = e.defect_flag || (a1 - a2).abs() <= 1e-12;
            let (rate_plus, rate_minus) = if a1 >= a2 {
                (e.growth1, e.growth2)
            } else {
                (e.growth2, e.growth1)
            };
            RateRow {
                xi,
                rate_plus,
                rate_minus,
                predicted_diagonal: predicted_rate_diagonal(spec, lambda, xi),
                tie,
            }
        })
        .collect();
    let expected = expected_rate_signs(&class);
    let xi0 = expected.and_then(|(sp, sm)| {
        let ok = |r: &RateRow| !r.tie && r.rate_plus * sp > 0.0 && r.rate_minus * sm > 0.0;
        let first_bad = rows.iter().rposition(|r| !ok(r));
        match first_bad {
            None => Some(1.0),
            Some(i) if i + 1 < rows.len() => Some(rows[i + 1].xi),
            Some(_) => None,
        }
    });
    debug_assert!(class.kind != Kind::Dispersive || expected.is_none());
    Ok(RateScan { rows, expected, xi0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode::{evolve_mode, ModePair};
    use crate::state::SpectralState;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn table(spec: &EquationSpec) -> CoefficientTable {
        CoefficientTable::compute(spec, spec.default_zero_tolerance()).unwrap()
    }

    fn dispersive_example() -> EquationSpec {
        EquationSpec::zero(2)
            .unwrap()
            .with_a(3, c(0.0, 1.0))
            .with_b(1, c(1.0, 0.0))
            .with_b(2, c(0.0, -1.0))
    }

    fn hermitian_defect(a: &Mat2) -> f64 {
        (a - a.adjoint()).norm()
    }

    #[test]
    fn unitary_flow_has_zero_derivative() {
        let spec = EquationSpec::zero(2).unwrap().with_a(1, c(0.4, 0.0)).with_a(3, c(-2.0, 0.0));
        let r = derivative_form(&spec, &QuadraticForm::identity(), 3.0);
        assert_eq!(r, Mat2::zeros());
    }

    #[test]
    fn identity_derivative_is_twice_diagonal_rate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut spec = EquationSpec::random(3, &mut rng);
        for j in 1..=6 {
            spec.set_b(j, ZERO);
        }
        let t = table(&spec);
        for xi in [1.0, 2.0, 5.0] {
            let r = derivative_form(&spec, &QuadraticForm::identity(), xi);
            let want = 2.0 * predicted_rate_diagonal(&spec, &t.lambda, xi);
            assert!((r[(0, 0)].re - want).abs() <= 1e-10 * want.abs().max(1.0));
            assert!(r[(0, 1)].norm() < 1e-12);
        }
    }

    #[test]
    fn derivative_form_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for m in 1..=3 {
            let spec = EquationSpec::random(m, &mut rng);
            let t = table(&spec);
            let forms = [
                QuadraticForm::identity(),
                QuadraticForm::gamma_energy(&t, false),
                QuadraticForm::alpha_energy(&t, Side::Plus, false),
                QuadraticForm::alpha_energy(&t, Side::Minus, false),
            ];
            for xi in [1.0, 4.0, 16.0] {
                let p = ModePair::new(xi, c(0.3, -0.8), c(1.1, 0.2));
                // truncation error of the central difference is O((h‖M‖)²)
                let h = f64::min(1e-6, 1e-3 / operator_norm(&build_mode_matrix(&spec, xi).matrix));
                for a in &forms {
                    let q = |s: f64| {
                        let u = evolve_mode(&spec, &p, s).unwrap().vector();
                        (u.adjoint() * a.at(xi) * u)[(0, 0)].re
                    };
                    let fd = (q(h) - q(-h)) / (2.0 * h);
                    let u = p.vector();
                    let exact = (u.adjoint() * derivative_form(&spec, a, xi) * u)[(0, 0)].re;
                    let scale = operator_norm(&derivative_form(&spec, a, xi)) * p.norm().powi(2);
                    assert!((fd - exact).abs() <= 1e-6 * scale.max(1.0), "m={m} xi={xi} {fd} {exact}");
                }
            }
        }
    }

    #[test]
    fn laurent_and_direct_derivatives_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec = EquationSpec::random(2, &mut rng);
        let a = QuadraticForm::gamma_energy(&table(&spec), false);
        let l = derivative_laurent(&spec, &a);
        for xi in [1.0, 3.0, 7.0] {
            let d = derivative_form(&spec, &a, xi);
            assert!((l.eval(xi) - d).norm() <= 1e-12 * d.norm());
        }
    }

    #[test]
    fn lambda_density_matches_direct_pairings() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let spec = EquationSpec::random(3, &mut rng);
        let t = table(&spec);
        let f = SpectralState::random_hs(12, 0.0, 9, 0.05).unwrap();
        let form = QuadraticForm::new("lambda", lambda_density(&t));
        let m = 3;
        let mut direct = 0.0;
        for (xi, v) in f.modes() {
            let x = xi as f64;
            for j in 1..=m {
                if j < m {
                    direct += t.lambda(2 * j) * x.abs().powi(2 * (m - j) as i32) * v.norm_sqr();
                }
                direct += t.lambda(2 * j - 1) * x.powi(2 * (m - j) as i32 + 1) * v.norm_sqr();
            }
        }
        let via = form.evaluate(&f);
        assert!((via - direct).abs() <= 1e-10 * direct.abs().max(1.0));
    }

    #[test]
    fn residuals_are_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for m in 1..=4 {
            let spec = EquationSpec::random(m, &mut rng);
            let t = table(&spec);
            for xi in [1.0, 8.0, 64.0] {
                let mut all = vec![prop21_residual(&spec, &t, xi)];
                for side in [Side::Plus, Side::Minus] {
                    all.push(lemma21_residual(&spec, &t, xi, side));
                }
                for r in all {
                    assert!(hermitian_defect(&r) <= 1e-12 * operator_norm(&r).max(1.0));
                }
            }
        }
    }

    #[test]
    fn zero_spec_residual_vanishes() {
        let spec = EquationSpec::zero(2).unwrap();
        let t = table(&spec);
        assert_eq!(prop21_residual(&spec, &t, 10.0), Mat2::zeros());
        assert!(prop22_residual(&spec, &t, 10.0, Side::Plus).is_err());
    }

    #[test]
    fn dispersive_example_bounded_and_ablation_grows() {
        let spec = dispersive_example();
        let t = table(&spec);
        let ok = ResidualForm::prop21(&spec, &t, false).scan();
        assert!(ok.passed, "{ok:?}");
        let at32 = operator_norm(&prop21_residual(&spec, &t, 32.0));
        assert!(ok.sup_norm <= 2.0 * at32.max(1e-300) || ok.sup_norm < 1e-9);
        let bad = ResidualForm::prop21(&spec, &t, true).scan();
        assert!(!bad.passed && bad.growth_fit >= GROWING_SLOPE, "{bad:?}");
    }

    #[test]
    fn diagonal_lemma21_is_bounded() {
        let spec = EquationSpec::zero(2).unwrap().with_a(2, c(0.3, 0.7)).with_a(4, c(0.0, 2.0));
        let t = table(&spec);
        for side in [Side::Plus, Side::Minus] {
            let f = ResidualForm::lemma21(&spec, &t, side, false);
            let r = f.at(100.0);
            assert!(r[(0, 1)].norm() == 0.0);
            assert!(operator_norm(&r) <= 2.0 * 2.0 + 1e-12);
            assert!(f.scan().passed);
        }
    }

    #[test]
    fn prop22_elliptic_examples() {
        let spec = EquationSpec::zero(2).unwrap().with_a(3, c(0.0, 1.0));
        let t = table(&spec);
        for side in [Side::Plus, Side::Minus] {
            let r = ResidualForm::prop22(&spec, &t, side, false).unwrap().scan();
            assert!(r.passed, "{r:?}");
        }
    }

    #[test]
    fn alpha_energy_matches_correction_pairings() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let spec = EquationSpec::random(2, &mut rng);
        let t = table(&spec);
        let f = SpectralState::random_hs(10, 0.0, 3, 0.05).unwrap();
        let q = QuadraticForm::alpha_energy(&t, Side::Plus, false).evaluate(&f);
        let plus = f.project(crate::state::Projection::Plus).l2_norm_sq();
        let mut pair = 0.0;
        for (i, al) in t.alpha.iter().enumerate() {
            let j = (i + 1) as i32;
            // ⟨D^{−j} conj(P⁻u), P⁺u⟩ = Σ_{ξ≥1} ξ^{−j} conj û(−ξ) conj û(ξ)
            let s: C64 = (1..=10i64)
                .map(|x| (x as f64).powi(-j) * f.get(-x).conj() * f.get(x).conj())
                .sum();
            pair += (al * s).re;
        }
        assert!((q - plus - pair).abs() < 1e-12);
    }

    #[test]
    fn rate_scan_directions() {
        let ell = EquationSpec::zero(2).unwrap().with_a(3, c(0.0, 1.0));
        let scan = smoothing_rate_scan(&ell, 64).unwrap();
        assert_eq!(scan.expected, Some((-1.0, 1.0)));
        assert!(scan.xi0.unwrap() <= 4.0);
        let last = scan.rows.last().unwrap();
        assert!((last.rate_plus + 64.0).abs() <= 1e-9 * 64.0);

        let flipped = smoothing_rate_scan(&ell.clone().with_a(3, c(0.0, -1.0)), 64).unwrap();
        assert_eq!(flipped.expected, Some((1.0, -1.0)));
        assert!(flipped.xi0.is_some());

        let par = EquationSpec::zero(2).unwrap().with_a(2, c(0.0, 1.0));
        let s = smoothing_rate_scan(&par, 64).unwrap();
        let r = s.rows.last().unwrap();
        assert!((r.rate_plus + 64.0 * 64.0).abs() <= 0.05 * 64.0 * 64.0);
        assert!((r.rate_minus + 64.0 * 64.0).abs() <= 0.05 * 64.0 * 64.0);

        let disp = smoothing_rate_scan(&dispersive_example(), 256).unwrap();
        assert_eq!(disp.expected, None);
        let worst = disp.rows.iter().map(|r| r.rate_plus.abs().max(r.rate_minus.abs())).fold(0.0, f64::max);
        assert!(worst < 10.0, "{worst}");

        assert!(smoothing_rate_scan(&ell, 3).is_err());
    }

    #[test]
    fn rate_scan_signs_are_scale_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let spec = EquationSpec::random(2, &mut rng);
            let a = smoothing_rate_scan(&spec, 64).unwrap();
            let b = smoothing_rate_scan(&spec.scaled(3.5), 64).unwrap();
            assert_eq!(a.expected, b.expected);
            let tail = |s: &RateScan| {
                s.rows[48..].iter().map(|r| (r.rate_plus > 0.0, r.rate_minus > 0.0)).collect::<Vec<_>>()
            };
            assert_eq!(tail(&a), tail(&b));
        }
    }

    #[test]
    fn diagonal_rates_match_prediction() {
        let spec = EquationSpec::zero(2).unwrap().with_a(1, c(0.2, 0.3)).with_a(4, c(0.0, -0.5));
        for r in smoothing_rate_scan(&spec, 32).unwrap().rows {
            assert!((r.rate_plus - r.predicted_diagonal).abs() <= 1e-10 * r.predicted_diagonal.abs().max(1.0));
        }
    }

    #[test]
    fn report_csv() {
        let spec = dispersive_example();
        let rep = ResidualForm::prop21(&spec, &table(&spec), false).scan();
        let mut buf = Vec::new();
        rep.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 12);
        assert!(text.starts_with("xi,norm\n1.0000000000000000e0,"));
    }
}
