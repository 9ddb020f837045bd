//! JSON run configuration.
//!
//! ```json
//! {
//!   "m": 2,
//!   "a": [[0, 0], [0, 0], [0, 1], [0, 0]],
//!   "b": [[1, 0], [0, -1], [0, 0], [0, 0]],
//!   "domain": { "type": "torus", "cutoff": 64 },
//!   "initial": { "random_hs": { "s": 0.0, "seed": 7, "epsilon": 0.05 } },
//!   "times": [0.0, 0.5, 1.0],
//!   "zero_tolerance": 1e-12,
//!   "seed": 1
//! }
//! ```
//!
//! Empty `a` or `b` lists stand for all-zero coefficients.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spec::EquationSpec;
use crate::state::SpectralState;
use crate::C64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    Torus { cutoff: usize },
}

impl Domain {
    pub fn cutoff(&self) -> usize {
        match self {
            Domain::Torus { cutoff } => *cutoff,
        }
    }
}

fn default_epsilon() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    /// `[[xi, re, im], ...]`
    Modes(Vec<[f64; 3]>),
    RandomHs {
        #[serde(default)]
        s: f64,
        #[serde(default)]
        seed: u64,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
    },
    Delta { xi: i64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub m: usize,
    #[serde(default)]
    pub a: Vec<[f64; 2]>,
    #[serde(default)]
    pub b: Vec<[f64; 2]>,
    #[serde(default)]
    pub domain: Option<Domain>,
    #[serde(default)]
    pub initial: Option<Initial>,
    #[serde(default)]
    pub times: Vec<f64>,
    #[serde(default)]
    pub zero_tolerance: Option<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn complex_list(name: &str, v: &[[f64; 2]], m: usize) -> Result<Vec<C64>> {
    if v.is_empty() {
        return Ok(vec![C64::new(0.0, 0.0); 2 * m]);
    }
    if v.len() != 2 * m {
        return Err(Error::invalid(format!(
            "{name} has {} entries, expected 2m = {}",
            v.len(),
            2 * m
        )));
    }
    Ok(v.iter().map(|[re, im]| C64::new(*re, *im)).collect())
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::invalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec()?;
        if self.times.windows(2).any(|w| !(w[0] <= w[1])) {
            return Err(Error::invalid("times must be sorted ascending"));
        }
        if self.times.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("times must be finite"));
        }
        if let Some(tol) = self.zero_tolerance {
            if !(tol >= 0.0) {
                return Err(Error::invalid("zero_tolerance must be non-negative"));
            }
        }
        if let Some(d) = &self.domain {
            if d.cutoff() == 0 {
                return Err(Error::invalid("domain cutoff must be positive"));
            }
        }
        Ok(())
    }

    pub fn spec(&self) -> Result<EquationSpec> {
        let a = complex_list("a", &self.a, self.m)?;
        let b = complex_list("b", &self.b, self.m)?;
        EquationSpec::new(self.m, a, b)
    }

    /// Configured tolerance, or `1e-12 · max(1, |a_j|, |b_j|)`.
    pub fn zero_tolerance(&self, spec: &EquationSpec) -> f64 {
        self.zero_tolerance.unwrap_or_else(|| spec.default_zero_tolerance())
    }

    pub fn cutoff(&self) -> Result<usize> {
        self.domain
            .as_ref()
            .map(Domain::cutoff)
            .ok_or_else(|| Error::invalid("config has no domain"))
    }

    pub fn initial_state(&self) -> Result<SpectralState> {
        let k = self.cutoff()?;
        match self
            .initial
            .as_ref()
            .ok_or_else(|| Error::invalid("config has no initial data"))?
        {
            Initial::Modes(list) => {
                let mut modes = Vec::with_capacity(list.len());
                for [xi, re, im] in list {
                    if xi.fract() != 0.0 {
                        return Err(Error::invalid(format!("mode frequency {xi} is not an integer")));
                    }
                    modes.push((*xi as i64, C64::new(*re, *im)));
                }
                SpectralState::from_modes(k, &modes)
            }
            Initial::RandomHs { s, seed, epsilon } => SpectralState::random_hs(k, *s, *seed, *epsilon),
            Initial::Delta { xi } => SpectralState::delta(k, *xi),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_config() {
        let cfg = RunConfig::from_json(
            r#"{"m":2,"a":[[0,0],[0,0],[0,1],[0,0]],"b":[[1,0],[0,-1],[0,0],[0,0]],
                "domain":{"type":"torus","cutoff":16},
                "initial":{"random_hs":{"s":0.0,"seed":7}},
                "times":[0,0.5],"seed":3}"#,
        )
        .unwrap();
        let spec = cfg.spec().unwrap();
        assert_eq!(spec.b(2), C64::new(0.0, -1.0));
        assert_eq!(cfg.cutoff().unwrap(), 16);
        assert_eq!(cfg.initial_state().unwrap(), SpectralState::random_hs(16, 0.0, 7, 0.05).unwrap());
        assert_eq!(cfg.zero_tolerance(&spec), 1e-12);
    }

    #[test]
    fn empty_lists_are_zero() {
        let cfg = RunConfig::from_json(r#"{"m":3}"#).unwrap();
        assert_eq!(cfg.spec().unwrap(), EquationSpec::zero(3).unwrap());
    }

    #[test]
    fn initial_variants() {
        let cfg = RunConfig::from_json(
            r#"{"m":1,"domain":{"type":"torus","cutoff":4},"initial":{"modes":[[-2,1,0.5],[3,0,1]]}}"#,
        )
        .unwrap();
        let s = cfg.initial_state().unwrap();
        assert_eq!(s.get(-2), C64::new(1.0, 0.5));
        let cfg = RunConfig::from_json(r#"{"m":1,"domain":{"type":"torus","cutoff":4},"initial":{"delta":{"xi":2}}}"#)
            .unwrap();
        assert_eq!(cfg.initial_state().unwrap().l2_norm(), 1.0);
    }

    #[test]
    fn rejects_invalid() {
        for bad in [
            r#"{"m":0}"#,
            r#"{"m":2,"a":[[0,0]]}"#,
            r#"{"m":1,"times":[1,0]}"#,
            r#"{"m":1,"zero_tolerance":-1}"#,
            r#"{"m":1,"domain":{"type":"torus","cutoff":0}}"#,
            r#"{"m":1,"unknown":1}"#,
            r#"{"m":1,"domain":{"type":"line","cutoff":3}}"#,
            r#"not json"#,
        ] {
            assert!(matches!(RunConfig::from_json(bad), Err(Error::InvalidConfig(_))), "{bad}");
        }
        let cfg = RunConfig::from_json(r#"{"m":1,"domain":{"type":"torus","cutoff":4},"initial":{"delta":{"xi":9}}}"#)
            .unwrap();
        assert!(cfg.initial_state().is_err());
        assert!(RunConfig::from_json(r#"{"m":1}"#).unwrap().initial_state().is_err());
    }
}
