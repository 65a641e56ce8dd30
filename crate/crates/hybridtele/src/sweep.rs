//! Parameter sweeps and the CSV table format.

use std::io::Write;
use std::path::PathBuf;

use hybridtele_core::channel::Topology;
use hybridtele_core::engine::QuadratureConfig;
use hybridtele_core::qubit::Family;
use rayon::prelude::*;
use serde::Deserialize;

use crate::eval::{evaluate, topology_for, Approach, Point};

pub const CSV_COLUMNS: [&str; 10] = ["family", "alpha", "r", "loss", "delta", "fidelity", "method", "variant", "error_estimate", "status"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid sweep configuration: {0}")]
pub struct ConfigError(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TopologyChoice {
    /// Each family on the channel it needs.
    Auto,
    Fixed(Topology),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub alpha_grid: Vec<f64>,
    pub r_grid: Vec<f64>,
    pub loss_grid: Vec<f64>,
    pub topology: TopologyChoice,
    pub methods: Vec<Approach>,
    pub quad: QuadratureConfig,
    pub seed: u64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(String),
    Many(Vec<String>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawQuad {
    order: Option<usize>,
    p_nodes: Option<usize>,
    phi_nodes: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    families: Vec<String>,
    alpha_grid: Vec<f64>,
    r_grid: Vec<f64>,
    #[serde(default = "zero_loss")]
    loss_grid: Vec<f64>,
    #[serde(default)]
    topology: Option<String>,
    #[serde(default)]
    method: Option<OneOrMany>,
    #[serde(default)]
    quad: Option<RawQuad>,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    out: Option<PathBuf>,
}

fn zero_loss() -> Vec<f64> {
    vec![0.0]
}

fn check_grid(name: &str, grid: &[f64], valid: impl Fn(f64) -> bool, range: &str) -> Result<(), ConfigError> {
    if grid.is_empty() {
        return Err(ConfigError(format!("{name} is empty")));
    }
    if let Some(bad) = grid.iter().find(|&&x| !x.is_finite() || !valid(x)) {
        return Err(ConfigError(format!("{name} value {bad} outside {range}")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

/// Parses `"both"` as printed closed form, corrected closed form and quadrature.
fn parse_methods(method: Option<OneOrMany>) -> Result<Vec<Approach>, ConfigError> {
    let names = match method {
        None => vec!["quad".to_owned()],
        Some(OneOrMany::One(s)) => vec![s],
        Some(OneOrMany::Many(v)) => v,
    };
    let mut methods = Vec::new();
    for name in names {
        if name == "both" {
            methods.extend(["closed-printed", "closed-corrected", "quad"].map(|s| s.parse::<Approach>().unwrap()));
        } else {
            methods.push(name.parse().map_err(ConfigError)?);
        }
    }
    if methods.is_empty() {
        return Err(ConfigError("method list is empty".into()));
    }
    let mut seen = Vec::new();
    for m in &methods {
        if seen.contains(m) {
            return Err(ConfigError(format!("method {m} listed twice")));
        }
        seen.push(*m);
    }
    Ok(methods)
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: RawConfig = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawConfig) -> Result<Self, ConfigError> {
        let families = raw
            .families
            .iter()
            .map(|s| s.parse::<Family>().map_err(|_| ConfigError(format!("unknown family `{s}`"))))
            .collect::<Result<Vec<_>, _>>()?;
        let topology = match raw.topology.as_deref() {
            None | Some("auto") => TopologyChoice::Auto,
            Some("pair") => TopologyChoice::Fixed(Topology::Pair),
            Some("single") => TopologyChoice::Fixed(Topology::Single),
            Some(other) => return Err(ConfigError(format!("unknown topology `{other}`"))),
        };
        let defaults = QuadratureConfig::default();
        let quad = match raw.quad {
            None => defaults,
            Some(q) => QuadratureConfig {
                order: q.order.unwrap_or(defaults.order),
                p_nodes: q.p_nodes.unwrap_or(defaults.p_nodes),
                phi_nodes: q.phi_nodes.unwrap_or(defaults.phi_nodes),
            },
        };
        let config = SweepConfig {
            families,
            alpha_grid: raw.alpha_grid,
            r_grid: raw.r_grid,
            loss_grid: raw.loss_grid,
            topology,
            methods: parse_methods(raw.method)?,
            quad,
            seed: raw.seed,
            out: raw.out,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.families.is_empty() {
            return Err(ConfigError("families is empty".into()));
        }
        check_grid("alpha_grid", &self.alpha_grid, |a| a >= 0.0, "[0, inf)")?;
        check_grid("r_grid", &self.r_grid, |r| r >= 0.0, "[0, inf)")?;
        check_grid("loss_grid", &self.loss_grid, |l| (0.0..=1.0).contains(&l), "[0, 1]")?;
        if let TopologyChoice::Fixed(t) = self.topology {
            if let Some(f) = self.families.iter().find(|&&f| topology_for(f) != t) {
                return Err(ConfigError(format!("family {f} does not run on a {t:?} channel")));
            }
        }
        self.quad.validate().map_err(|e| ConfigError(e.to_string()))?;
        Ok(())
    }

    /// Rows the sweep will produce.
    pub fn row_count(&self) -> usize {
        self.families.len() * self.alpha_grid.len() * self.r_grid.len() * self.loss_grid.len() * self.methods.len()
    }
}

/// One CSV row. `fidelity` and `error_estimate` are absent when the point failed.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub family: Family,
    pub alpha: f64,
    pub r: f64,
    pub loss: f64,
    pub delta: f64,
    pub fidelity: Option<f64>,
    pub approach: Approach,
    pub error_estimate: Option<f64>,
    pub status: String,
}

impl SweepRow {
    fn fields(&self) -> [String; 10] {
        [
            self.family.to_string(),
            full_precision(self.alpha),
            full_precision(self.r),
            full_precision(self.loss),
            full_precision(self.delta),
            self.fidelity.map(full_precision).unwrap_or_default(),
            self.approach.method_tag().to_owned(),
            self.approach.variant_tag().to_owned(),
            self.error_estimate.map(full_precision).unwrap_or_default(),
            self.status.clone(),
        ]
    }
}

/// 17 significant digits.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn evaluate_row(point: &Point, approach: Approach, quad: &QuadratureConfig) -> SweepRow {
    let delta = point.channel().map(|c| c.kernel().delta()).unwrap_or(f64::NAN);
    let (fidelity, error_estimate, status) = match evaluate(point, approach, quad) {
        Ok(r) => (Some(r.value), Some(r.error_estimate), r.status.as_str().to_owned()),
        Err(e) => (None, None, format!("error: {e}")),
    };
    SweepRow {
        family: point.family,
        alpha: point.alpha,
        r: point.squeezing,
        loss: point.loss,
        delta,
        fidelity,
        approach,
        error_estimate,
        status,
    }
}

/// Evaluates every grid point in parallel; rows come back in grid order
/// (family, alpha, r, loss, method).
pub fn run_sweep(config: &SweepConfig) -> Vec<SweepRow> {
    let mut jobs = Vec::with_capacity(config.row_count());
    for &family in &config.families {
        for &alpha in &config.alpha_grid {
            for &r in &config.r_grid {
                for &loss in &config.loss_grid {
                    for &approach in &config.methods {
                        jobs.push((Point::averaged(family, alpha, r, loss), approach));
                    }
                }
            }
        }
    }
    jobs.par_iter().map(|(point, approach)| evaluate_row(point, *approach, &config.quad)).collect()
}

/// Writes `# `-prefixed comment lines, the header, then the rows.
pub fn write_csv<W: Write>(mut out: W, comments: &[String], rows: &[SweepRow]) -> csv::Result<()> {
    for line in comments {
        writeln!(out, "# {line}")?;
    }
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(CSV_COLUMNS)?;
    for row in rows {
        writer.write_record(row.fields())?;
    }
    writer.flush()?;
    Ok(())
}
