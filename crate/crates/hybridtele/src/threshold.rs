//! Threshold and crossover queries on average fidelities.

use std::fmt;
use std::str::FromStr;

use hybridtele_core::engine::QuadratureConfig;
use hybridtele_core::qubit::Family;
use hybridtele_core::{threshold, CLASSICAL_LIMIT};
use serde::Serialize;

use crate::eval::{evaluate, Approach, EvalError, Point};

/// `F_primary` or the difference `F_primary − F_baseline` of average fidelities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metric {
    pub primary: Family,
    pub baseline: Option<Family>,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.baseline {
            Some(b) => write!(f, "{}-{}", self.primary, b),
            None => write!(f, "{}", self.primary),
        }
    }
}

/// Parses `hqA` or `hqA-spq`.
impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let family = |name: &str| name.parse::<Family>().map_err(|_| format!("unknown family `{name}` in metric `{s}`"));
        match s.split_once('-') {
            Some((a, b)) => Ok(Metric { primary: family(a)?, baseline: Some(family(b)?) }),
            None => Ok(Metric { primary: family(s)?, baseline: None }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    #[serde(rename = "r")]
    Squeezing,
    Alpha,
    Loss,
}

impl FromStr for Variable {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "r" => Ok(Variable::Squeezing),
            "alpha" => Ok(Variable::Alpha),
            "loss" => Ok(Variable::Loss),
            _ => Err(format!("unknown variable `{s}` (expected r, alpha or loss)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdQuery {
    pub metric: Metric,
    pub target: f64,
    pub variable: Variable,
    pub lo: f64,
    pub hi: f64,
    pub tol: f64,
    /// Values of the parameters that are not swept.
    pub alpha: f64,
    pub squeezing: f64,
    pub loss: f64,
    pub approach: Approach,
    pub quad: QuadratureConfig,
}

impl ThresholdQuery {
    /// Classical-limit query with default tolerance.
    pub fn new(metric: Metric, variable: Variable, lo: f64, hi: f64) -> Self {
        ThresholdQuery {
            metric,
            target: CLASSICAL_LIMIT,
            variable,
            lo,
            hi,
            tol: 1e-4,
            alpha: 1.0,
            squeezing: 0.0,
            loss: 0.0,
            approach: Approach::Quadrature,
            quad: QuadratureConfig::default(),
        }
    }

    fn fidelity(&self, family: Family, x: f64) -> Result<f64, EvalError> {
        let mut point = Point::averaged(family, self.alpha, self.squeezing, self.loss);
        match self.variable {
            Variable::Squeezing => point.squeezing = x,
            Variable::Alpha => point.alpha = x,
            Variable::Loss => point.loss = x,
        }
        Ok(evaluate(&point, self.approach, &self.quad)?.value)
    }

    /// Metric value at `x` (not shifted by the target).
    pub fn metric_at(&self, x: f64) -> Result<f64, EvalError> {
        let primary = self.fidelity(self.metric.primary, x)?;
        match self.metric.baseline {
            Some(b) => Ok(primary - self.fidelity(b, x)?),
            None => Ok(primary),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdOutcome {
    pub metric: String,
    pub variable: Variable,
    pub method: String,
    pub target: f64,
    pub root: f64,
    pub tolerance: f64,
    pub bracket: [f64; 2],
    pub metric_at_bracket: [f64; 2],
    /// Metric at `root − tol` and `root + tol`.
    pub metric_around_root: [f64; 2],
}

impl ThresholdOutcome {
    /// Whether the metric crosses the target within `root ± tol`.
    pub fn straddles(&self) -> bool {
        let [below, above] = self.metric_around_root;
        (below - self.target) * (above - self.target) <= 0.0
    }
}

pub fn find_threshold(q: &ThresholdQuery) -> Result<ThresholdOutcome, EvalError> {
    // bisect speaks core errors; anything else is parked here and returned as is
    let mut request_error = None;
    let search = threshold::bisect(
        |x| match q.metric_at(x) {
            Ok(m) => Ok(m - q.target),
            Err(EvalError::Core(e)) => Err(e),
            Err(other) => {
                let stop = hybridtele_core::Error::InvalidQuadrature("search aborted");
                request_error = Some(other);
                Err(stop)
            }
        },
        q.lo,
        q.hi,
        q.tol,
    );
    if let Some(e) = request_error {
        return Err(e);
    }
    let root = search?;
    let around = |x: f64| q.metric_at(x.clamp(q.lo.min(q.hi), q.lo.max(q.hi)));
    Ok(ThresholdOutcome {
        metric: q.metric.to_string(),
        variable: q.variable,
        method: q.approach.to_string(),
        target: q.target,
        root,
        tolerance: q.tol,
        bracket: [q.lo, q.hi],
        metric_at_bracket: [q.metric_at(q.lo)?, q.metric_at(q.hi)?],
        metric_around_root: [around(root - q.tol)?, around(root + q.tol)?],
    })
}
