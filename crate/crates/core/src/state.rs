//! Truncated Fourier series on the circle.
//!
//! A state holds `û(ξ)` for integer `ξ ∈ [−K, K]`, normalized so that
//! `‖e^{iξx}‖ = 1`: every norm is a plain coefficient sum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mode::{evolve_mode, max_log_growth, build_mode_matrix, ModePair, OVERFLOW_LOG_MODULUS};
use crate::spec::EquationSpec;
use crate::C64;

const ZERO: C64 = C64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Projection {
    /// ξ ≥ 1
    Plus,
    /// ξ ≤ −1
    Minus,
    /// ξ = 0
    Zero,
    /// |ξ| ≥ 1
    NonZero,
}

impl Projection {
    pub fn keeps(self, xi: i64) -> bool {
        match self {
            Projection::Plus => xi >= 1,
            Projection::Minus => xi <= -1,
            Projection::Zero => xi == 0,
            Projection::NonZero => xi != 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Multiplier {
    /// `|ξ|^s`
    Riesz(f64),
    /// `⟨ξ⟩^s = (1 + ξ²)^{s/2}`
    Bessel(f64),
    /// `ξ^k`
    Dpow(i32),
}

impl Multiplier {
    fn singular_at_zero(self) -> bool {
        match self {
            Multiplier::Riesz(s) => s < 0.0,
            Multiplier::Bessel(_) => false,
            Multiplier::Dpow(k) => k < 0,
        }
    }

    fn symbol(self, xi: i64) -> f64 {
        let x = xi as f64;
        match self {
            Multiplier::Riesz(0.0) => 1.0,
            Multiplier::Riesz(s) => x.abs().powf(s),
            Multiplier::Bessel(s) => (1.0 + x * x).powf(s / 2.0),
            Multiplier::Dpow(k) => x.powi(k),
        }
    }
}

/// `⟨ξ⟩ = (1 + ξ²)^{1/2}`.
pub fn japanese(xi: f64) -> f64 {
    (1.0 + xi * xi).sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralState {
    cutoff: usize,
    /// `coeffs[ξ + K] = û(ξ)`
    coeffs: Vec<C64>,
    pub time_tag: f64,
}

impl SpectralState {
    /// The zero state with cutoff `K ≥ 1`.
    pub fn zeros(cutoff: usize) -> Result<Self> {
        if cutoff == 0 {
            return Err(Error::invalid("cutoff K must be positive"));
        }
        Ok(Self {
            cutoff,
            coeffs: vec![ZERO; 2 * cutoff + 1],
            time_tag: 0.0,
        })
    }

    /// State from an explicit `(ξ, û(ξ))` list; later entries overwrite earlier ones.
    pub fn from_modes(cutoff: usize, modes: &[(i64, C64)]) -> Result<Self> {
        let mut s = Self::zeros(cutoff)?;
        for &(xi, v) in modes {
            if xi.unsigned_abs() as usize > cutoff {
                return Err(Error::invalid(format!("mode {xi} outside [-{cutoff}, {cutoff}]")));
            }
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::invalid(format!("mode {xi} is not finite")));
            }
            s.set(xi, v);
        }
        Ok(s)
    }

    /// `û = 1` at a single ξ.
    pub fn delta(cutoff: usize, xi: i64) -> Result<Self> {
        Self::from_modes(cutoff, &[(xi, C64::new(1.0, 0.0))])
    }

    /// `û(ξ) = ⟨ξ⟩^{−s−1/2−ε} e^{iθ_ξ}` with seeded uniform phases.
    ///
    /// The data lies in `H^s` but not in `H^{s+1/2+ε}`. Phases are drawn in the
    /// order ξ = 0, 1, −1, 2, −2, … so a larger K extends the data of a smaller
    /// one with the same seed.
    pub fn random_hs(cutoff: usize, s: f64, seed: u64, epsilon: f64) -> Result<Self> {
        if !(s.is_finite() && epsilon.is_finite()) {
            return Err(Error::invalid("random_hs parameters must be finite"));
        }
        let mut st = Self::zeros(cutoff)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let power = -s - 0.5 - epsilon;
        let put = |st: &mut Self, xi: i64, rng: &mut ChaCha8Rng| {
            let theta = rng.gen_range(0.0..std::f64::consts::TAU);
            st.set(xi, C64::from_polar(japanese(xi as f64).powf(power), theta));
        };
        put(&mut st, 0, &mut rng);
        for xi in 1..=cutoff as i64 {
            put(&mut st, xi, &mut rng);
            put(&mut st, -xi, &mut rng);
        }
        Ok(st)
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `û(ξ)`, zero outside the cutoff.
    pub fn get(&self, xi: i64) -> C64 {
        if xi.unsigned_abs() as usize > self.cutoff {
            ZERO
        } else {
            self.coeffs[(xi + self.cutoff as i64) as usize]
        }
    }

    /// Panics when ξ is outside the cutoff.
    pub fn set(&mut self, xi: i64, v: C64) {
        let k = self.cutoff as i64;
        assert!((-k..=k).contains(&xi), "mode {xi} outside [-{k}, {k}]");
        self.coeffs[(xi + k) as usize] = v;
    }

    /// `(ξ, û(ξ))` for ξ ascending.
    pub fn modes(&self) -> impl Iterator<Item = (i64, C64)> + '_ {
        let k = self.cutoff as i64;
        self.coeffs.iter().enumerate().map(move |(i, &v)| (i as i64 - k, v))
    }

    /// The coupled pair `(û(ξ), conj û(−ξ))` for `ξ ≥ 0`.
    pub fn pair(&self, xi: usize) -> ModePair {
        let x = xi as i64;
        ModePair::from_coefficients(xi as f64, self.get(x), self.get(-x))
    }

    pub fn set_pair(&mut self, xi: usize, pair: &ModePair) {
        let (p, m) = pair.coefficients();
        self.set(xi as i64, p);
        if xi > 0 {
            self.set(-(xi as i64), m);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `⟨f, g⟩ = Σ f̂(ξ) conj ĝ(ξ)`.
    pub fn inner(&self, other: &Self) -> C64 {
        let k = self.cutoff.min(other.cutoff) as i64;
        (-k..=k).map(|xi| self.get(xi) * other.get(xi).conj()).sum()
    }

    pub fn l2_norm_sq(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.l2_norm_sq().sqrt()
    }

    /// `(Σ ⟨ξ⟩^{2s} |û(ξ)|²)^{1/2}`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        if s == 0.0 {
            return self.l2_norm();
        }
        self.modes()
            .map(|(xi, v)| (1.0 + (xi * xi) as f64).powf(s) * v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn project(&self, kind: Projection) -> Self {
        let mut out = self.clone();
        for (i, (xi, _)) in self.modes().enumerate() {
            if !kind.keeps(xi) {
                out.coeffs[i] = ZERO;
            }
        }
        out
    }

    /// Applies a Fourier multiplier. Negative powers need `û(0) = 0` unless
    /// `auto_project` is set, in which case `P≠0` is applied first.
    pub fn multiplier(&self, kind: Multiplier, auto_project: bool) -> Result<Self> {
        let base = if kind.singular_at_zero() {
            if self.get(0) != ZERO && !auto_project {
                return Err(Error::invalid(format!(
                    "{kind:?} is singular at xi = 0 and the state has a nonzero xi = 0 mode"
                )));
            }
            self.project(Projection::NonZero)
        } else {
            self.clone()
        };
        let mut out = base;
        let k = self.cutoff as i64;
        for xi in -k..=k {
            if kind.singular_at_zero() && xi == 0 {
                continue;
            }
            let i = (xi + k) as usize;
            out.coeffs[i] *= kind.symbol(xi);
        }
        Ok(out)
    }

    pub fn scaled(&self, f: C64) -> Self {
        let mut out = self.clone();
        out.coeffs.iter_mut().for_each(|z| *z *= f);
        out
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.cutoff != other.cutoff {
            return Err(Error::invalid("cutoff mismatch"));
        }
        let mut out = self.clone();
        out.coeffs.iter_mut().zip(&other.coeffs).for_each(|(a, b)| *a += b);
        Ok(out)
    }
}

/// Largest predicted log-modulus over `0 ≤ ξ ≤ K` for `exp(i t M(ξ))`, with its ξ.
pub fn predicted_log_growth(spec: &EquationSpec, cutoff: usize, t: f64) -> (f64, usize) {
    (0..=cutoff)
        .map(|xi| {
            let m = build_mode_matrix(spec, xi as f64).matrix;
            (max_log_growth(&(m * C64::new(0.0, t))), xi)
        })
        .fold((f64::NEG_INFINITY, 0), |a, b| if b.0 > a.0 { b } else { a })
}

/// Fails with [`Error::ModeOverflow`] naming the first offending ξ, without evolving.
pub fn overflow_precheck(spec: &EquationSpec, cutoff: usize, t: f64) -> Result<()> {
    for xi in 0..=cutoff {
        let m = build_mode_matrix(spec, xi as f64).matrix;
        let g = max_log_growth(&(m * C64::new(0.0, t)));
        if g > OVERFLOW_LOG_MODULUS {
            return Err(Error::ModeOverflow {
                xi: Some(xi as f64),
                log_modulus: g,
                limit: OVERFLOW_LOG_MODULUS,
            });
        }
    }
    Ok(())
}

/// Evolves every mode pair by `t`; the result's `time_tag` is advanced by `t`.
pub fn evolve_state(spec: &EquationSpec, state: &SpectralState, t: f64) -> Result<SpectralState> {
    let pairs: Vec<ModePair> = (0..=state.cutoff)
        .into_par_iter()
        .map(|xi| evolve_mode(spec, &state.pair(xi), t).map_err(|e| e.at_xi(xi as f64)))
        .collect::<Result<_>>()?;
    let mut out = state.clone();
    for (xi, p) in pairs.iter().enumerate() {
        out.set_pair(xi, p);
    }
    out.time_tag += t;
    if !out.is_finite() {
        return Err(Error::Numeric("evolved state is not finite".into()));
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    #[serde(rename = "K")]
    cutoff: usize,
    modes: Vec<[f64; 3]>,
    #[serde(default)]
    t: f64,
}

impl SpectralState {
    /// `{"K": .., "modes": [[xi, re, im], ...], "t": ..}`, nonzero modes only.
    pub fn to_json(&self) -> Result<String> {
        let file = StateFile {
            cutoff: self.cutoff,
            modes: self
                .modes()
                .filter(|(_, v)| *v != ZERO)
                .map(|(xi, v)| [xi as f64, v.re, v.im])
                .collect(),
            t: self.time_tag,
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: StateFile = serde_json::from_str(text)?;
        let mut modes = Vec::with_capacity(file.modes.len());
        for [xi, re, im] in file.modes {
            if xi.fract() != 0.0 {
                return Err(Error::invalid(format!("mode frequency {xi} is not an integer")));
            }
            modes.push((xi as i64, C64::new(re, im)));
        }
        let mut s = Self::from_modes(file.cutoff, &modes)?;
        s.time_tag = file.t;
        Ok(s)
    }
}
