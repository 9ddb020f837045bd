use serde::Serialize;

use crate::coefficients::{gamma_sequence, lambda_sequence};
use crate::spec::EquationSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kind {
    Dispersive,
    Parabolic,
    Elliptic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Smoothing {
    None,
    /// Smoothing on `[0, ∞)` when `forward`, on `(−∞, 0]` otherwise.
    Parabolic { forward: bool },
    /// `plus_forward`: P⁺u smooths forward in time and P⁻u backward;
    /// reversed when false.
    Elliptic { plus_forward: bool },
}

impl Smoothing {
    pub fn describe(&self) -> &'static str {
        match self {
            Smoothing::None => "none",
            Smoothing::Parabolic { forward: true } => "[0,inf)",
            Smoothing::Parabolic { forward: false } => "(-inf,0]",
            Smoothing::Elliptic { plus_forward: true } => "P+ forward, P- backward",
            Smoothing::Elliptic { plus_forward: false } => "P- forward, P+ backward",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub kind: Kind,
    pub jstar: Option<usize>,
    pub sign: Option<Sign>,
    pub smoothing: Smoothing,
    pub zero_tolerance: f64,
    /// λ_1..λ_{2m−1}.
    pub lambda: Vec<f64>,
}

impl Classification {
    /// 1-based index of the λ that decided the type.
    pub fn deciding_index(&self) -> Option<usize> {
        match (self.kind, self.jstar) {
            (Kind::Parabolic, Some(j)) => Some(2 * j),
            (Kind::Elliptic, Some(j)) => Some(2 * j - 1),
            _ => None,
        }
    }
}

/// Type of the equation from the first λ_j with `|λ_j| > zero_tolerance`:
/// none → dispersive, even index `2j*` → parabolic, odd `2j*−1` → elliptic.
pub fn classify(spec: &EquationSpec, zero_tolerance: f64) -> Classification {
    let lambda = lambda_sequence(spec, &gamma_sequence(spec));
    classify_lambda(lambda, zero_tolerance)
}

pub(crate) fn classify_lambda(lambda: Vec<f64>, zero_tolerance: f64) -> Classification {
    let first = lambda.iter().position(|l| l.abs() > zero_tolerance);
    let Some(i) = first else {
        return Classification {
            kind: Kind::Dispersive,
            jstar: None,
            sign: None,
            smoothing: Smoothing::None,
            zero_tolerance,
            lambda,
        };
    };
    let idx = i + 1;
    let positive = lambda[i] > 0.0;
    let sign = Some(if positive { Sign::Positive } else { Sign::Negative });
    let (kind, jstar, smoothing) = if idx % 2 == 0 {
        (Kind::Parabolic, idx / 2, Smoothing::Parabolic { forward: positive })
    } else {
        (
            Kind::Elliptic,
            idx.div_ceil(2),
            Smoothing::Elliptic {
                plus_forward: positive,
            },
        )
    };
    Classification {
        kind,
        jstar: Some(jstar),
        sign,
        smoothing,
        zero_tolerance,
        lambda,
    }
}
