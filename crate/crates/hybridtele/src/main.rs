use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use hybridtele::eval::{evaluate, Approach, Point, Record};
use hybridtele::figure::reproduce_figure;
use hybridtele::report::validate;
use hybridtele::sweep::{run_sweep, write_csv, SweepConfig};
use hybridtele::threshold::{find_threshold, Metric, ThresholdQuery, Variable};
use hybridtele::CliError;
use hybridtele_core::closed_form::FormulaVariant;
use hybridtele_core::engine::QuadratureConfig;
use hybridtele_core::qubit::Family;
use hybridtele_core::CLASSICAL_LIMIT;

#[derive(Parser)]
#[command(name = "hybridtele", version, about = "Teleportation fidelities of photonic and hybrid qubits over a squeezed-vacuum channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Closed,
    Quad,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Printed,
    Corrected,
}

impl From<VariantArg> for FormulaVariant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Printed => FormulaVariant::Printed,
            VariantArg::Corrected => FormulaVariant::Corrected,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Fidelity at one parameter point, printed as JSON.
    Fidelity {
        #[arg(long)]
        family: Family,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Squeezing parameter.
        #[arg(long)]
        r: f64,
        /// Beam-splitter reflectivity of the symmetric loss.
        #[arg(long, default_value_t = 0.0)]
        loss: f64,
        /// Fixed input weight; omit together with --phi to average over inputs.
        #[arg(long, requires = "phi")]
        p: Option<f64>,
        #[arg(long, requires = "p")]
        phi: Option<f64>,
        #[arg(long, value_enum, default_value = "quad")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "printed")]
        variant: VariantArg,
        #[arg(long)]
        quad_order: Option<usize>,
        #[arg(long, default_value_t = 1_000_000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run a sweep described by a JSON config and write a CSV table.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `out` from the config; stdout if neither is given.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the dataset behind one of the five standard plots.
    Figure {
        #[arg(long)]
        id: u8,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Bisect for the value of one variable where a metric reaches a target.
    Threshold {
        /// A family (`spq`) or a difference of two (`hqA-spq`).
        #[arg(long)]
        metric: Metric,
        #[arg(long, default_value_t = CLASSICAL_LIMIT)]
        target: f64,
        #[arg(long = "var")]
        variable: Variable,
        #[arg(long, allow_hyphen_values = true)]
        lo: f64,
        #[arg(long, allow_hyphen_values = true)]
        hi: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        r: f64,
        #[arg(long, default_value_t = 0.0)]
        loss: f64,
        #[arg(long, value_enum, default_value = "quad")]
        method: MethodArg,
        #[arg(long, value_enum, default_value = "printed")]
        variant: VariantArg,
    },
    /// Write the validation report; always exits 0.
    Validate {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn approach(method: MethodArg, variant: VariantArg, samples: usize, seed: u64) -> Approach {
    match method {
        MethodArg::Closed => Approach::Closed(variant.into()),
        MethodArg::Quad => Approach::Quadrature,
        MethodArg::Mc => Approach::MonteCarlo { samples, seed },
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => io::stdout().write_all(bytes).map_err(|e| CliError::io("<stdout>", e)),
    }
}

fn json_line<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Fidelity { family, alpha, r, loss, p, phi, method, variant, quad_order, samples, seed } => {
            let quad = quad_order.map(QuadratureConfig::with_order).unwrap_or_default();
            let point = Point { family, alpha, squeezing: r, loss, input: p.zip(phi) };
            let approach = approach(method, variant, samples, seed);
            let result = evaluate(&point, approach, &quad)?;
            emit(None, &json_line(&Record::new(&point, approach, &result))?)
        }
        Command::Sweep { config, out } => {
            let text = fs::read_to_string(&config).map_err(|e| CliError::io(&config, e))?;
            let config = SweepConfig::from_json(&text)?;
            let rows = run_sweep(&config);
            let mut bytes = Vec::new();
            write_csv(&mut bytes, &[], &rows)?;
            emit(out.as_deref().or(config.out.as_deref()), &bytes)
        }
        Command::Figure { id, out } => {
            let figure = reproduce_figure(id)?;
            let mut bytes = Vec::new();
            write_csv(&mut bytes, &figure.comments, &figure.rows)?;
            emit(out.as_deref(), &bytes)
        }
        Command::Threshold { metric, target, variable, lo, hi, tol, alpha, r, loss, method, variant } => {
            if matches!(method, MethodArg::Mc) {
                return Err(CliError::Usage("threshold searches support --method closed or quad".into()));
            }
            if tol.is_nan() || tol <= 0.0 {
                return Err(CliError::Usage(format!("--tol must be positive, got {tol}")));
            }
            let mut q = ThresholdQuery::new(metric, variable, lo, hi);
            q.target = target;
            q.tol = tol;
            q.alpha = alpha;
            q.squeezing = r;
            q.loss = loss;
            q.approach = approach(method, variant, 0, 0);
            emit(None, &json_line(&find_threshold(&q)?)?)
        }
        Command::Validate { out } => {
            let checks = validate();
            let failed = checks.iter().filter(|c| !c.pass).count();
            emit(out.as_deref(), &json_line(&checks)?)?;
            eprintln!("{} checks, {} failed", checks.len(), failed);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
