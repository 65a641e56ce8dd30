//! Single-point fidelity evaluation shared by every subcommand.

use std::fmt;
use std::str::FromStr;

use hybridtele_core::channel::{ChannelSpec, Topology};
use hybridtele_core::closed_form::{self, FormulaVariant};
use hybridtele_core::engine::{self, Averaging, FidelityResult, InputPoint, Method, QuadratureConfig};
use hybridtele_core::qubit::{make_qubit, Family, QubitSpec};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error(transparent)]
    Core(#[from] hybridtele_core::Error),
    #[error("{family} has no closed-form {what} fidelity")]
    NoClosedForm { family: Family, what: &'static str },
    #[error("{0} needs a fixed input: pass both p and phi")]
    NeedsFixedInput(&'static str),
}

impl EvalError {
    /// Failures of the numerics rather than of the request.
    pub fn is_numerical(&self) -> bool {
        use hybridtele_core::Error::*;
        matches!(self, EvalError::Core(NotNormalized(_) | OutOfRange { .. } | NoSignChange { .. } | UnphysicalCovariance { .. }))
    }
}

/// How a fidelity is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Approach {
    Closed(FormulaVariant),
    Quadrature,
    MonteCarlo { samples: usize, seed: u64 },
}

impl Approach {
    pub fn method_tag(&self) -> &'static str {
        match self {
            Approach::Closed(_) => "closed",
            Approach::Quadrature => "quad",
            Approach::MonteCarlo { .. } => "mc",
        }
    }

    pub fn variant_tag(&self) -> &'static str {
        match self {
            Approach::Closed(v) => v.as_str(),
            _ => "",
        }
    }
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Approach::Closed(v) => write!(f, "closed-{v}"),
            other => f.write_str(other.method_tag()),
        }
    }
}

/// Parses `quad`, `closed-printed` or `closed-corrected`.
impl FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quad" => Ok(Approach::Quadrature),
            "closed-printed" => Ok(Approach::Closed(FormulaVariant::Printed)),
            "closed-corrected" => Ok(Approach::Closed(FormulaVariant::Corrected)),
            _ => Err(format!("unknown method `{s}` (expected quad, closed-printed or closed-corrected)")),
        }
    }
}

/// Channel topology that carries `family`.
pub fn topology_for(family: Family) -> Topology {
    if family.modes() == 2 {
        Topology::Pair
    } else {
        Topology::Single
    }
}

/// Family, amplitude, channel and (optionally) a fixed input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub family: Family,
    pub alpha: f64,
    pub squeezing: f64,
    pub loss: f64,
    /// `(p, φ)`; `None` averages over all inputs.
    pub input: Option<(f64, f64)>,
}

impl Point {
    pub fn averaged(family: Family, alpha: f64, squeezing: f64, loss: f64) -> Self {
        Point { family, alpha, squeezing, loss, input: None }
    }

    pub fn channel(&self) -> Result<ChannelSpec, EvalError> {
        Ok(ChannelSpec::new(self.squeezing, self.loss, topology_for(self.family))?)
    }
}

pub fn evaluate(point: &Point, approach: Approach, quad: &QuadratureConfig) -> Result<FidelityResult, EvalError> {
    let kernel = point.channel()?.kernel();
    let family = point.family;
    let result = match (approach, point.input) {
        (Approach::Closed(variant), None) => {
            let raw = closed_form::avg_fidelity(family, &kernel, point.alpha, variant)
                .ok_or(EvalError::NoClosedForm { family, what: "average" })??;
            FidelityResult::new(raw, Method::ClosedForm(variant), 0.0, kernel.delta(), InputPoint::Averaged)?
        }
        (Approach::Closed(variant), Some((p, phi))) => {
            if family != Family::CoherentQubit {
                return Err(EvalError::NoClosedForm { family, what: "fixed-input" });
            }
            let raw = closed_form::fidelity_coherent_qubit(&kernel, point.alpha, p, phi, variant)?;
            FidelityResult::new(raw, Method::ClosedForm(variant), 0.0, kernel.delta(), InputPoint::Fixed { p, phi })?
        }
        (Approach::Quadrature, None) => {
            let averaging = match family {
                Family::CoherentQubit => Averaging::NumericGrid,
                _ => Averaging::AnalyticMoments,
            };
            engine::fidelity_average(family, point.alpha, &kernel, quad, averaging)?
        }
        (Approach::Quadrature, Some((p, phi))) => {
            let state = make_qubit(&QubitSpec::new(family, point.alpha, p, phi)?)?;
            engine::fidelity_fixed(&state, &kernel, quad)?
        }
        (Approach::MonteCarlo { .. }, None) => return Err(EvalError::NeedsFixedInput("Monte Carlo")),
        (Approach::MonteCarlo { samples, seed }, Some((p, phi))) => {
            let state = make_qubit(&QubitSpec::new(family, point.alpha, p, phi)?)?;
            engine::fidelity_monte_carlo(&state, &kernel, samples, seed)?
        }
    };
    Ok(result.with_family(family, point.alpha))
}

/// JSON shape of a single fidelity query.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub family: String,
    pub alpha: Option<f64>,
    pub r: f64,
    pub loss: f64,
    pub delta: f64,
    pub p: Option<f64>,
    pub phi: Option<f64>,
    pub averaged: bool,
    pub fidelity: f64,
    pub raw_fidelity: f64,
    pub method: String,
    pub variant: Option<String>,
    pub error_estimate: f64,
    pub status: String,
}

impl Record {
    pub fn new(point: &Point, approach: Approach, result: &FidelityResult) -> Self {
        let (p, phi) = match result.inputs {
            InputPoint::Fixed { p, phi } => (Some(p), Some(phi)),
            InputPoint::Averaged => (None, None),
        };
        Record {
            family: point.family.to_string(),
            alpha: point.family.uses_alpha().then_some(point.alpha),
            r: point.squeezing,
            loss: point.loss,
            delta: result.delta,
            p,
            phi,
            averaged: p.is_none(),
            fidelity: result.value,
            raw_fidelity: result.raw_value,
            method: approach.method_tag().to_owned(),
            variant: matches!(approach, Approach::Closed(_)).then(|| approach.variant_tag().to_owned()),
            error_estimate: result.error_estimate,
            status: result.status.as_str().to_owned(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn approach_round_trip() {
        for s in ["quad", "closed-printed", "closed-corrected"] {
            assert_eq!(s.parse::<Approach>().unwrap().to_string(), s);
        }
        assert!("closed".parse::<Approach>().is_err());
    }

    #[test]
    fn vacuum_channel_spq() {
        let point = Point::averaged(Family::Spq, 0.0, 0.0, 0.0);
        let quad = QuadratureConfig::default();
        for approach in [Approach::Quadrature, Approach::Closed(FormulaVariant::Printed)] {
            let r = evaluate(&point, approach, &quad).unwrap();
            assert!((r.value - 0.125).abs() < 1e-14);
        }
    }

    #[test]
    fn unsupported_combinations() {
        let quad = QuadratureConfig::default();
        let point = Point::averaged(Family::CoherentQubit, 0.5, 1.0, 0.0);
        let err = evaluate(&point, Approach::Closed(FormulaVariant::Printed), &quad).unwrap_err();
        assert!(matches!(err, EvalError::NoClosedForm { .. }));
        assert!(!err.is_numerical());
        let mc = Approach::MonteCarlo { samples: 10_000, seed: 1 };
        assert_eq!(evaluate(&point, mc, &quad), Err(EvalError::NeedsFixedInput("Monte Carlo")));
        let fixed = Point { input: Some((0.5, 0.0)), ..Point::averaged(Family::Spq, 0.0, 1.0, 0.0) };
        assert!(evaluate(&fixed, Approach::Closed(FormulaVariant::Corrected), &quad).is_err());
    }

    #[test]
    fn record_echoes_inputs() {
        let quad = QuadratureConfig::default();
        let point = Point { input: Some((0.25, 1.0)), ..Point::averaged(Family::HqA, 0.8, 1.2, 0.1) };
        let result = evaluate(&point, Approach::Quadrature, &quad).unwrap();
        let record = Record::new(&point, Approach::Quadrature, &result);
        assert_eq!((record.p, record.phi, record.averaged), (Some(0.25), Some(1.0), false));
        assert_eq!(record.alpha, Some(0.8));
        assert_eq!(record.variant, None);
        let spq = Record::new(&Point::averaged(Family::Spq, 0.3, 1.0, 0.0), Approach::Quadrature, &result);
        assert_eq!(spq.alpha, None);
    }
}
