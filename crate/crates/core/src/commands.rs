//! Command implementations shared by the binary and the examples.
//!
//! Every command returns a value that serializes to the JSON or CSV the
//! binary prints; exit codes come from [`exit_code`].

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::checks::{lemma22_check, lemma23_check, remark21_check, CheckReport};
use crate::classify::{classify, Kind};
use crate::coefficients::CoefficientTable;
use crate::config::RunConfig;
use crate::energy::{energy_e, select_n};
use crate::error::{Error, Result};
use crate::estimates::{smoothing_rate_scan, EstimateReport, RateScan, ResidualForm, Side};
use crate::spec::EquationSpec;
use crate::state::{evolve_state, overflow_precheck, Projection, SpectralState};
use crate::C64;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;
pub const EXIT_OVERFLOW: i32 = 4;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidConfig(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_) => EXIT_CONFIG,
        Error::DegenerateBeta { .. } | Error::Numeric(_) => EXIT_NUMERIC,
        Error::ModeOverflow { .. } => EXIT_OVERFLOW,
    }
}

/// Fixed 17-significant-digit float formatting for CSV output.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The bundled example equations, by config name.
pub fn named_examples() -> Vec<(&'static str, EquationSpec)> {
    let z = |m| EquationSpec::zero(m).expect("m >= 1");
    vec![
        (
            "m1_dispersive",
            z(1).with_a(1, c(2.0, 0.0))
                .with_a(2, c(0.5, 0.3))
                .with_b(1, c(0.4, -0.2))
                .with_b(2, c(1.0, 0.0)),
        ),
        ("m1_elliptic", z(1).with_a(1, c(0.0, 1.0))),
        ("m2_elliptic_a3", z(2).with_a(3, c(0.0, 1.0))),
        ("m2_elliptic_b", z(2).with_b(1, c(1.0, 0.0)).with_b(2, c(0.0, -1.0))),
        (
            "m2_dispersive_mixed",
            z(2).with_a(3, c(0.0, 1.0))
                .with_b(1, c(1.0, 0.0))
                .with_b(2, c(0.0, -1.0)),
        ),
        ("m2_parabolic_a2", z(2).with_a(2, c(0.0, 1.0))),
    ]
}

pub fn named_example(name: &str) -> Option<EquationSpec> {
    named_examples().into_iter().find(|(n, _)| *n == name).map(|(_, s)| s)
}

pub fn classify_report(cfg: &RunConfig) -> Result<Value> {
    let spec = cfg.spec()?;
    let cl = classify(&spec, cfg.zero_tolerance(&spec));
    Ok(json!({
        "kind": cl.kind,
        "jstar": cl.jstar,
        "sign": cl.sign,
        "lambda": cl.lambda,
        "smoothing": cl.smoothing.describe(),
        "zero_tolerance": cl.zero_tolerance,
    }))
}

pub fn table_report(cfg: &RunConfig) -> Result<Value> {
    let spec = cfg.spec()?;
    let t = CoefficientTable::compute(&spec, cfg.zero_tolerance(&spec))?;
    let beta = t.beta.as_ref().map(|b| {
        let jstar = t.jstar.expect("beta implies jstar");
        json!({
            "plus": b.plus,
            "minus": b.minus,
            "back_substitution_residual": b.back_substitution_residual(&t.lambda_plus, &t.lambda_minus, jstar),
        })
    });
    Ok(json!({
        "m": t.m,
        "gamma": pairs(&t.gamma),
        "lambda": t.lambda,
        "alpha": pairs(&t.alpha),
        "lambda_plus": t.lambda_plus,
        "lambda_minus": t.lambda_minus,
        "jstar": t.jstar,
        "beta": beta,
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimRow {
    pub t: f64,
    pub l2: f64,
    pub h_half: f64,
    pub h_half_plus: f64,
    pub h_half_minus: f64,
    pub e_value: f64,
}

#[derive(Debug, Clone)]
pub struct Simulation {
    pub rows: Vec<SimRow>,
    pub states: Vec<SpectralState>,
    pub n_used: f64,
}

/// Evolves the configured initial data to every requested time. All times are
/// prechecked for overflow before any evolution.
pub fn simulate(cfg: &RunConfig) -> Result<Simulation> {
    let spec = cfg.spec()?;
    let phi = cfg.initial_state()?;
    let k = phi.cutoff();
    let times = if cfg.times.is_empty() { vec![0.0] } else { cfg.times.clone() };
    for &t in &times {
        overflow_precheck(&spec, k, t)?;
    }
    let n = select_n(&spec, k);
    let mut rows = Vec::with_capacity(times.len());
    let mut states = Vec::with_capacity(times.len());
    for &t in &times {
        let u = evolve_state(&spec, &phi, t)?;
        let e = energy_e(&spec, &u, n);
        rows.push(SimRow {
            t,
            l2: u.l2_norm(),
            h_half: u.sobolev_norm(0.5),
            h_half_plus: u.project(Projection::Plus).sobolev_norm(0.5),
            h_half_minus: u.project(Projection::Minus).sobolev_norm(0.5),
            e_value: e.e_value,
        });
        states.push(u);
    }
    Ok(Simulation { rows, states, n_used: n })
}

/// The time at which [`simulate`] would overflow, if any, for diagnostics.
pub fn first_overflow(cfg: &RunConfig) -> Result<Option<(f64, f64)>> {
    let spec = cfg.spec()?;
    let k = cfg.cutoff()?;
    for &t in &cfg.times {
        if let Err(Error::ModeOverflow { xi, .. }) = overflow_precheck(&spec, k, t) {
            return Ok(Some((t, xi.unwrap_or(f64::NAN))));
        }
    }
    Ok(None)
}

pub fn write_simulation_csv<W: Write>(sim: &Simulation, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "l2", "h_half", "h_half_plus", "h_half_minus", "E_value"])?;
    for r in &sim.rows {
        w.write_record([r.t, r.l2, r.h_half, r.h_half_plus, r.h_half_minus, r.e_value].map(fmt_float))?;
    }
    w.flush()?;
    Ok(())
}

/// `t, xi, modulus` for every stored mode of every snapshot.
pub fn write_modes_csv<W: Write>(sim: &Simulation, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "xi", "modulus"])?;
    for (row, s) in sim.rows.iter().zip(&sim.states) {
        for (xi, v) in s.modes() {
            w.write_record([fmt_float(row.t), xi.to_string(), fmt_float(v.norm())])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Path of the per-mode file written next to `out` by `--dump-modes`.
pub fn modes_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("simulation");
    out.with_file_name(format!("{stem}_modes.csv"))
}

pub fn run_simulate(cfg: &RunConfig, out: &Path, dump_modes: bool) -> Result<Simulation> {
    let sim = simulate(cfg)?;
    write_simulation_csv(&sim, BufWriter::new(File::create(out)?))?;
    if dump_modes {
        write_modes_csv(&sim, BufWriter::new(File::create(modes_path(out))?))?;
    }
    Ok(sim)
}

pub fn write_growth_csv<W: Write>(scan: &RateScan, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["xi", "rate_plus", "rate_minus", "predicted_diagonal_rate"])?;
    for r in &scan.rows {
        w.write_record([r.xi, r.rate_plus, r.rate_minus, r.predicted_diagonal].map(fmt_float))?;
    }
    w.flush()?;
    Ok(())
}

pub fn growth(cfg: &RunConfig, xi_max: usize) -> Result<RateScan> {
    smoothing_rate_scan(&cfg.spec()?, xi_max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Remark21,
    Lemma22,
    Lemma23,
    Prop21,
    Lemma21,
    Prop22,
    Lemma31,
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub suite: Suite,
    pub trials: usize,
    pub seed: u64,
    pub ablate: bool,
    /// Order for the randomized suites (max order for remark21).
    pub m: Option<usize>,
    pub jstar: Option<usize>,
    /// Equation (and cutoff for lemma31) to check instead of the built-in suite.
    pub config: Option<RunConfig>,
}

impl VerifyOptions {
    pub fn new(suite: Suite) -> Self {
        Self {
            suite,
            trials: 100,
            seed: 0,
            ablate: false,
            m: None,
            jstar: None,
            config: None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyOutcome {
    pub suite: Suite,
    pub passed: bool,
    pub checks: Vec<CheckReport>,
    pub estimates: Vec<EstimateReport>,
}

impl VerifyOutcome {
    /// JSON with check details limited to the ten worst entries.
    pub fn summary_json(&self) -> Value {
        let checks: Vec<Value> = self
            .checks
            .iter()
            .map(|c| {
                json!({
                    "name": c.name,
                    "passed": c.passed,
                    "max_residual": c.max_residual,
                    "tolerance": c.tolerance,
                    "count": c.details.len(),
                    "worst": c.worst(10),
                    "notes": c.notes,
                })
            })
            .collect();
        let estimates: Vec<Value> = self
            .estimates
            .iter()
            .map(|e| {
                json!({
                    "name": e.name,
                    "passed": e.passed,
                    "sup_norm": e.sup_norm,
                    "growth_fit": e.growth_fit,
                    "cancellation_leftover": e.cancellation_leftover,
                })
            })
            .collect();
        json!({ "suite": self.suite, "passed": self.passed, "checks": checks, "estimates": estimates })
    }
}

/// Equations for the estimate suites: the configured one, or the bundled
/// examples plus `trials` random ones with `m ≤ 4`.
fn estimate_specs(opts: &VerifyOptions) -> Result<Vec<(String, EquationSpec)>> {
    if let Some(cfg) = &opts.config {
        return Ok(vec![("config".into(), cfg.spec()?)]);
    }
    let mut out: Vec<(String, EquationSpec)> =
        named_examples().into_iter().map(|(n, s)| (n.to_string(), s)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for t in 0..opts.trials {
        let m = opts.m.unwrap_or(1 + t % 4);
        out.push((format!("random/m={m}/trial={t}"), EquationSpec::random(m, &mut rng)));
    }
    Ok(out)
}

fn named(mut r: EstimateReport, label: &str) -> EstimateReport {
    r.name = format!("{label}/{}", r.name);
    r
}

pub fn verify(opts: &VerifyOptions) -> Result<VerifyOutcome> {
    let mut checks = Vec::new();
    let mut estimates = Vec::new();
    match opts.suite {
        Suite::Remark21 => checks.push(remark21_check(opts.m.unwrap_or(6), opts.trials, opts.seed)),
        Suite::Lemma22 => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            let specs: Vec<EquationSpec> = match &opts.config {
                Some(cfg) => vec![cfg.spec()?],
                None => match opts.m {
                    Some(m) => vec![EquationSpec::random(m, &mut rng)],
                    None => (1..=6).map(|m| EquationSpec::random(m, &mut rng)).collect(),
                },
            };
            for s in specs {
                checks.push(lemma22_check(&s, opts.trials, opts.seed));
            }
        }
        Suite::Lemma23 => checks.push(lemma23_check(
            opts.m.unwrap_or(5),
            opts.jstar.unwrap_or(3),
            opts.trials,
            opts.seed,
        )?),
        Suite::Prop21 | Suite::Lemma21 => {
            for (label, spec) in estimate_specs(opts)? {
                let t = CoefficientTable::compute(&spec, f64::INFINITY)?;
                if opts.suite == Suite::Prop21 {
                    estimates.push(named(ResidualForm::prop21(&spec, &t, opts.ablate).scan(), &label));
                } else {
                    for side in [Side::Plus, Side::Minus] {
                        estimates.push(named(ResidualForm::lemma21(&spec, &t, side, opts.ablate).scan(), &label));
                    }
                }
            }
        }
        Suite::Prop22 => {
            let specs = estimate_specs(opts)?;
            let single = opts.config.is_some();
            for (label, spec) in specs {
                let tol = spec.default_zero_tolerance();
                let t = CoefficientTable::compute(&spec, tol)?;
                if t.jstar.is_none() {
                    if single {
                        return Err(Error::invalid("prop22 needs an elliptic equation"));
                    }
                    continue;
                }
                for side in [Side::Plus, Side::Minus] {
                    estimates.push(named(ResidualForm::prop22(&spec, &t, side, opts.ablate)?.scan(), &label));
                }
            }
        }
        Suite::Lemma31 => {
            let (spec, k) = match &opts.config {
                Some(cfg) => (cfg.spec()?, cfg.cutoff().unwrap_or(256)),
                None => (EquationSpec::zero(2)?.with_b(2, c(0.0, -1.0)), 256),
            };
            let n = select_n(&spec, k);
            let mut details = Vec::with_capacity(opts.trials);
            for t in 0..opts.trials {
                let f = SpectralState::random_hs(k, 0.0, opts.seed.wrapping_add(t as u64), 0.05)?;
                let e = energy_e(&spec, &f, n);
                let main = e.main_part();
                // violation > 0 when the sandwich fails
                let v = (0.5 * e.e_value - main).max(main - 2.0 * e.e_value);
                details.push((format!("state={t}"), v));
            }
            let max_residual = details.iter().map(|d| d.1).fold(f64::NEG_INFINITY, f64::max);
            checks.push(CheckReport {
                name: "lemma31".into(),
                passed: details.iter().all(|d| d.1 <= 0.0),
                max_residual,
                tolerance: 0.0,
                details,
                notes: vec![format!("N = {n}, K = {k}")],
            });
        }
    }
    let passed = checks.iter().all(|c| c.passed) && estimates.iter().all(|e| e.passed);
    Ok(VerifyOutcome {
        suite: opts.suite,
        passed,
        checks,
        estimates,
    })
}

/// Classification summary for a spec, used by the examples.
pub fn kind_of(spec: &EquationSpec) -> Kind {
    classify(spec, spec.default_zero_tolerance()).kind
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> RunConfig {
        RunConfig::from_json(text).unwrap()
    }

    #[test]
    fn named_examples_classify_as_documented() {
        let want = [
            ("m1_dispersive", Kind::Dispersive),
            ("m1_elliptic", Kind::Elliptic),
            ("m2_elliptic_a3", Kind::Elliptic),
            ("m2_elliptic_b", Kind::Elliptic),
            ("m2_dispersive_mixed", Kind::Dispersive),
            ("m2_parabolic_a2", Kind::Parabolic),
        ];
        for (name, kind) in want {
            assert_eq!(kind_of(&named_example(name).unwrap()), kind, "{name}");
        }
    }

    #[test]
    fn classify_json_shape() {
        let v = classify_report(&cfg(r#"{"m":2,"a":[[0,0],[0,1],[0,0],[0,0]]}"#)).unwrap();
        assert_eq!(v["kind"], "Parabolic");
        assert_eq!(v["jstar"], 1);
        assert_eq!(v["smoothing"], "[0,inf)");
        let v = classify_report(&cfg(r#"{"m":2}"#)).unwrap();
        assert_eq!(v["kind"], "Dispersive");
        assert_eq!(v["lambda"], json!([0.0, 0.0, 0.0]));
    }

    #[test]
    fn table_json_shape() {
        let v = table_report(&cfg(r#"{"m":2,"b":[[0,0],[0,-1],[0,0],[0,0]]}"#)).unwrap();
        assert_eq!(v["gamma"], json!([[0.0, -1.0]]));
        let v = table_report(&cfg(r#"{"m":2,"a":[[1,0],[0,0],[0,0],[0,0]]}"#)).unwrap();
        assert_eq!(v["alpha"], json!([[0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]));
        // m = 4, elliptic at j* = 1 with a nonzero λ⁻ tail
        let v = table_report(&cfg(
            r#"{"m":4,"a":[[0,1],[0,0],[0.3,0],[0,0],[0,0],[0,0],[0,0],[0,0]],
                "b":[[0.5,0.2],[0.1,-0.4],[0,0.3],[0.2,0],[0,0],[0,0],[0,0],[0,0]]}"#,
        ))
        .unwrap();
        assert_eq!(v["jstar"], 1);
        assert_eq!(v["beta"]["plus"].as_array().unwrap().len(), 4);
        assert!(v["beta"]["back_substitution_residual"].as_f64().unwrap() <= 1e-10);
    }

    #[test]
    fn simulate_zero_time_is_initial_norms() {
        let c = cfg(r#"{"m":1,"domain":{"type":"torus","cutoff":8},"initial":{"random_hs":{"seed":1}},"times":[0]}"#);
        let sim = simulate(&c).unwrap();
        let phi = c.initial_state().unwrap();
        assert_eq!(sim.rows.len(), 1);
        assert_eq!(sim.rows[0].l2, phi.l2_norm());
        assert_eq!(sim.rows[0].h_half, phi.sobolev_norm(0.5));
    }

    #[test]
    fn simulate_overflow_aborts() {
        let c = cfg(
            r#"{"m":2,"a":[[0,0],[0,0],[0,1],[0,0]],"domain":{"type":"torus","cutoff":64},
                "initial":{"random_hs":{"seed":1}},"times":[-20,0]}"#,
        );
        let err = simulate(&c).unwrap_err();
        assert_eq!(exit_code(&err), EXIT_OVERFLOW);
        assert_eq!(first_overflow(&c).unwrap().unwrap().0, -20.0);
    }

    #[test]
    fn growth_csv_for_zero_spec() {
        let scan = growth(&cfg(r#"{"m":2}"#), 8).unwrap();
        let mut buf = Vec::new();
        write_growth_csv(&scan, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 9);
        for line in text.lines().skip(1) {
            let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
            assert_eq!(&f[1..], &[0.0, 0.0, 0.0]);
        }
    }

    #[test]
    fn verify_suites() {
        let mut o = VerifyOptions::new(Suite::Remark21);
        o.trials = 20;
        assert!(verify(&o).unwrap().passed);
        o.suite = Suite::Lemma23;
        assert!(verify(&o).unwrap().passed);
        o.jstar = Some(5);
        assert!(matches!(verify(&o), Err(Error::InvalidConfig(_))));
        let mut o = VerifyOptions::new(Suite::Prop21);
        o.config = Some(cfg(r#"{"m":2,"a":[[0,0],[0,0],[0,1],[0,0]],"b":[[1,0],[0,-1],[0,0],[0,0]]}"#));
        assert!(verify(&o).unwrap().passed);
        o.ablate = true;
        let out = verify(&o).unwrap();
        assert!(!out.passed && out.estimates[0].growth_fit >= 0.9);
        let mut o = VerifyOptions::new(Suite::Prop22);
        o.config = Some(cfg(r#"{"m":2}"#));
        assert_eq!(exit_code(&verify(&o).unwrap_err()), EXIT_CONFIG);
        let mut o = VerifyOptions::new(Suite::Lemma31);
        o.trials = 10;
        assert!(verify(&o).unwrap().passed);
    }
}
