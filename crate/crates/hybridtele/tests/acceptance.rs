//! End-to-end acceptance run: one PASS/FAIL line per criterion, nonzero exit
//! if any criterion fails.

use std::f64::consts::TAU;
use std::path::Path;
use std::process::{Command, ExitCode};

use hybridtele::eval::{evaluate, Approach, Point};
use hybridtele::figure::reproduce_figure;
use hybridtele::report::Check;
use hybridtele::threshold::{find_threshold, Metric, ThresholdQuery, Variable};
use hybridtele_core::channel::{delta_for, NoiseKernel};
use hybridtele_core::closed_form::{self, FormulaVariant};
use hybridtele_core::engine::{self, Averaging, QuadratureConfig};
use hybridtele_core::qubit::{make_qubit, Family, QubitSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const IDEAL_DELTA: f64 = 1e-8;
const IDEAL_TOL: f64 = 1e-6;
const AGREEMENT_TOL: f64 = 1e-8;
const PRINTED_DEVIATION_MIN: f64 = 1e-2;
const FACTORIZATION_CLOSED_TOL: f64 = 1e-10;
const FACTORIZATION_QUAD_TOL: f64 = 1e-8;
const CAT_LIMIT_ALPHA: f64 = 1e-4;
const CAT_LIMIT_TOL: f64 = 1e-4;
const SPQ_THRESHOLD_WINDOW: (f64, f64) = (1.0, 1.3);
const HYBRID_THRESHOLD_WINDOW: (f64, f64) = (0.9, 1.4);
const CROSSOVER_WINDOW: (f64, f64) = (0.8, 1.2);
const SINGLE_MODE_WINDOW: (f64, f64) = (0.6, 0.9);
const VACUUM_TOL: f64 = 1e-8;
const CUTOFF_AGREEMENT: f64 = 0.005;
const MC_SETS: usize = 20;
const MC_SAMPLES: usize = 1_000_000;
const MC_SIGMAS: f64 = 3.0;
const MC_MAX_STDERR: f64 = 2e-3;

const R_GRID: [f64; 12] = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4];
const HYBRID_ALPHAS: [f64; 4] = [0.3, 0.6, 1.0, 1.5];

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict { pass, detail: detail.into() }
}

fn quad() -> QuadratureConfig {
    QuadratureConfig::default()
}

fn kernel(delta: f64) -> NoiseKernel {
    NoiseKernel::from_delta(delta).unwrap()
}

fn oracle(family: Family, alpha: f64, k: &NoiseKernel) -> f64 {
    let averaging = if family == Family::CoherentQubit { Averaging::NumericGrid } else { Averaging::AnalyticMoments };
    engine::fidelity_average(family, alpha, k, &quad(), averaging).unwrap().raw_value
}

fn closed(family: Family, alpha: f64, k: &NoiseKernel, variant: FormulaVariant) -> f64 {
    closed_form::avg_fidelity(family, k, alpha, variant).unwrap().unwrap()
}

/// Largest `|closed − oracle|` over `r ∈ R_GRID` at R = 0, and where it occurs.
fn max_agreement(family: Family, alphas: &[f64], variant: FormulaVariant) -> (f64, String) {
    let mut worst = (0.0, String::new());
    for &alpha in alphas {
        for &r in &R_GRID {
            let k = kernel(delta_for(r, 0.0));
            let dev = (closed(family, alpha, &k, variant) - oracle(family, alpha, &k)).abs();
            if dev >= worst.0 {
                worst = (dev, format!("alpha={alpha} r={r}"));
            }
        }
    }
    worst
}

fn delta_grid() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.1).collect()
}

fn root(metric: &str, variable: Variable, lo: f64, hi: f64, setup: impl FnOnce(&mut ThresholdQuery)) -> Result<f64, String> {
    let mut q = ThresholdQuery::new(metric.parse::<Metric>().unwrap(), variable, lo, hi);
    setup(&mut q);
    let out = find_threshold(&q).map_err(|e| e.to_string())?;
    if !out.straddles() {
        return Err(format!("root {} not bracketed", out.root));
    }
    Ok(out.root)
}

fn inside(x: &Result<f64, String>, window: (f64, f64)) -> bool {
    matches!(x, Ok(v) if *v > window.0 && *v < window.1)
}

fn show(x: &Result<f64, String>) -> String {
    match x {
        Ok(v) => format!("{v:.4}"),
        Err(e) => format!("error ({e})"),
    }
}

fn item<'a>(report: &'a [Check], id: &str) -> Option<&'a Check> {
    report.iter().find(|c| c.check_id == id)
}

fn ideal_channel() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let k = kernel(IDEAL_DELTA);
    let mut worst = (0.0, String::new());
    for family in Family::ALL {
        let alphas: &[f64] = if family.uses_alpha() { &[0.5, 1.0, 2.0] } else { &[0.0] };
        for &alpha in alphas {
            for _ in 0..5 {
                let (p, phi) = (rng.random::<f64>(), TAU * rng.random::<f64>());
                let state = make_qubit(&QubitSpec::new(family, alpha, p, phi).unwrap()).unwrap();
                let dev = (engine::fidelity_fixed(&state, &k, &quad()).unwrap().raw_value - 1.0).abs();
                if dev >= worst.0 {
                    worst = (dev, format!("{family} alpha={alpha}"));
                }
            }
        }
    }
    verdict(worst.0 <= IDEAL_TOL, format!("max |F - 1| = {:.2e} at {} (tol {IDEAL_TOL:e})", worst.0, worst.1))
}

fn photon_agreement() -> Verdict {
    let (dev, at) = max_agreement(Family::Spq, &[0.0], FormulaVariant::Printed);
    verdict(dev <= AGREEMENT_TOL, format!("max dev {dev:.2e} at {at} (tol {AGREEMENT_TOL:e})"))
}

fn literal_type_b_agreement(report: &[Check], ideal_passed: bool) -> Verdict {
    let (dev, at) = max_agreement(Family::HqB, &HYBRID_ALPHAS, FormulaVariant::Printed);
    if dev <= AGREEMENT_TOL {
        return verdict(true, format!("max dev {dev:.2e} at {at}"));
    }
    // fallback: ideal channel holds, the report localizes the diverging group,
    // and the figures carry quadrature rows for every type-B point
    let localized = item(report, "closed.hqB.printed_localization")
        .and_then(|c| c.computed.get("first_diverging_group"))
        .and_then(Value::as_str)
        .map(str::to_owned);
    let mut quad_rows = 0;
    let mut quad_complete = true;
    for id in [2, 5] {
        for row in reproduce_figure(id).unwrap().rows.iter().filter(|r| r.family == Family::HqB && r.approach == Approach::Quadrature) {
            quad_rows += 1;
            quad_complete &= row.fidelity.is_some_and(f64::is_finite);
        }
    }
    let pass = ideal_passed && localized.is_some() && quad_rows > 0 && quad_complete;
    verdict(
        pass,
        format!(
            "max dev {dev:.2e} at {at} (tol {AGREEMENT_TOL:e}); \
             accepted via documented discrepancy: report localizes {}, {quad_rows} quadrature rows in figures 2 and 5",
            localized.as_deref().unwrap_or("nothing"),
        ),
    )
}

fn corrected_type_a(report: &[Check]) -> Verdict {
    let (dev, at) = max_agreement(Family::HqA, &HYBRID_ALPHAS, FormulaVariant::Corrected);
    let k = kernel(delta_for(1.0, 0.0));
    let printed_dev = (closed(Family::HqA, 1.0, &k, FormulaVariant::Printed) - oracle(Family::HqA, 1.0, &k)).abs();
    let in_report = item(report, "closed.hqA.corrected").is_some_and(|c| c.pass)
        && item(report, "closed.hqA.printed_deviation").is_some_and(|c| c.pass);
    verdict(
        dev <= AGREEMENT_TOL && printed_dev > PRINTED_DEVIATION_MIN && in_report,
        format!(
            "corrected type A max dev {dev:.2e} at {at}; printed deviates by {printed_dev:.4} at alpha=1 r=1; both in report: {in_report}"
        ),
    )
}

fn factorization() -> Verdict {
    let (mut closed_dev, mut quad_dev) = (0.0f64, 0.0f64);
    for d in delta_grid() {
        let k = kernel(d);
        let expected = closed_form::avg_fidelity_singlerail(&k) * 2.0 / (2.0 + d);
        for variant in [FormulaVariant::Printed, FormulaVariant::Corrected] {
            closed_dev = closed_dev.max((closed(Family::HqA, 0.0, &k, variant) - expected).abs());
        }
        quad_dev = quad_dev.max((oracle(Family::HqA, 0.0, &k) - expected).abs());
    }
    verdict(
        closed_dev <= FACTORIZATION_CLOSED_TOL && quad_dev <= FACTORIZATION_QUAD_TOL,
        format!("closed max dev {closed_dev:.2e} (tol {FACTORIZATION_CLOSED_TOL:e}), quadrature max dev {quad_dev:.2e} (tol {FACTORIZATION_QUAD_TOL:e})"),
    )
}

fn cat_limit() -> Verdict {
    let mut worst = (0.0, 0.0);
    for d in delta_grid() {
        let k = kernel(d);
        let dev = (oracle(Family::HqB, CAT_LIMIT_ALPHA, &k) - closed_form::avg_fidelity_spq(&k)).abs();
        if dev >= worst.0 {
            worst = (dev, d);
        }
    }
    verdict(
        worst.0 <= CAT_LIMIT_TOL,
        format!("|F_hqB(alpha=1e-4) - F_spq| max {:.4} at delta={:.1} (tol {CAT_LIMIT_TOL:e})", worst.0, worst.1),
    )
}

fn classical_threshold() -> Verdict {
    let spq = root("spq", Variable::Squeezing, 0.5, 2.5, |q| q.approach = Approach::Closed(FormulaVariant::Printed));
    let hqa = root("hqA", Variable::Squeezing, 0.5, 2.5, |_| {});
    let hqb = root("hqB", Variable::Squeezing, 0.5, 2.5, |_| {});
    let pass = inside(&spq, SPQ_THRESHOLD_WINDOW) && inside(&hqa, HYBRID_THRESHOLD_WINDOW) && inside(&hqb, HYBRID_THRESHOLD_WINDOW);
    verdict(
        pass,
        format!(
            "r*: spq {} in {SPQ_THRESHOLD_WINDOW:?}; hqA {} and hqB {} in {HYBRID_THRESHOLD_WINDOW:?}",
            show(&spq),
            show(&hqa),
            show(&hqb)
        ),
    )
}

fn crossovers() -> Verdict {
    let at_r = |lo: f64, hi: f64, metric: &str| {
        root(metric, Variable::Alpha, lo, hi, |q| {
            q.target = 0.0;
            q.squeezing = 1.5;
        })
    };
    let hqa = at_r(0.5, 1.5, "hqA-spq");
    let hqb = at_r(0.1, 1.5, "hqB-spq");
    let single = at_r(0.4, 1.1, "singlerail-coherent");
    let pass = inside(&hqa, CROSSOVER_WINDOW) && inside(&hqb, CROSSOVER_WINDOW) && inside(&single, SINGLE_MODE_WINDOW);
    verdict(
        pass,
        format!(
            "alpha* at r=1.5: hqA {} and hqB {} in {CROSSOVER_WINDOW:?}; single-mode {} in {SINGLE_MODE_WINDOW:?}",
            show(&hqa),
            show(&hqb),
            show(&single)
        ),
    )
}

fn loss_behavior(report: &[Check]) -> Verdict {
    let cases = [(Family::Spq, 0.0), (Family::SingleRail, 0.0), (Family::HqA, 1.0), (Family::HqB, 1.0), (Family::CoherentQubit, 1.0)];
    let mut rise = 0.0f64;
    let mut vacuum_dev = 0.0f64;
    for &(family, alpha) in &cases {
        for r in [1.5, 2.0] {
            let mut previous = f64::INFINITY;
            for i in 0..=20 {
                let point = Point::averaged(family, alpha, r, i as f64 * 0.05);
                let f = evaluate(&point, Approach::Quadrature, &quad()).unwrap().raw_value;
                rise = rise.max(f - previous);
                previous = f;
            }
            vacuum_dev = vacuum_dev.max((previous - oracle(family, alpha, &NoiseKernel::VACUUM)).abs());
        }
    }
    let mut cutoffs = Vec::new();
    let mut cutoff_dev = 0.0f64;
    for &(family, alpha) in &cases[..4] {
        let cutoff = |approach| {
            root(family.as_str(), Variable::Loss, 0.0, 1.0, |q| {
                q.alpha = alpha;
                q.squeezing = 2.0;
                q.approach = approach;
            })
        };
        match (cutoff(Approach::Closed(FormulaVariant::Corrected)), cutoff(Approach::Quadrature)) {
            (Ok(c), Ok(q)) => {
                cutoff_dev = cutoff_dev.max((c - q).abs());
                cutoffs.push(format!("{family} {q:.4}"));
            }
            (c, q) => {
                cutoff_dev = f64::INFINITY;
                cutoffs.push(format!("{family} {} / {}", show(&c), show(&q)));
            }
        }
    }
    let annotated = item(report, "claim.loss_cutoff.reference").is_some_and(|c| c.expected.as_f64() == Some(0.35));
    verdict(
        rise <= 0.0 && vacuum_dev <= VACUUM_TOL && cutoff_dev <= CUTOFF_AGREEMENT && annotated,
        format!(
            "largest rise in R {rise:.1e}; R=1 vs vacuum {vacuum_dev:.1e}; R* at r=2: {} (closed vs quad {cutoff_dev:.1e}); reference 0.35 in report: {annotated}",
            cutoffs.join(", ")
        ),
    )
}

fn monte_carlo() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst_sigma = (0.0f64, String::new());
    let mut worst_stderr = 0.0f64;
    for i in 0..MC_SETS {
        let family = Family::ALL[i % Family::ALL.len()];
        let alpha = 0.2 + 0.8 * rng.random::<f64>();
        let d = 0.1 + 1.9 * rng.random::<f64>();
        let (p, phi) = (rng.random::<f64>(), TAU * rng.random::<f64>());
        let state = make_qubit(&QubitSpec::new(family, alpha, p, phi).unwrap()).unwrap();
        let k = kernel(d);
        let exact = engine::fidelity_fixed(&state, &k, &quad()).unwrap().raw_value;
        let mc = engine::fidelity_monte_carlo(&state, &k, MC_SAMPLES, 1000 + i as u64).unwrap();
        let sigmas = (mc.raw_value - exact).abs() / mc.error_estimate;
        if sigmas >= worst_sigma.0 {
            worst_sigma = (sigmas, format!("{family} alpha={alpha:.3} delta={d:.3}"));
        }
        worst_stderr = worst_stderr.max(mc.error_estimate);
    }
    verdict(
        worst_sigma.0 <= MC_SIGMAS && worst_stderr <= MC_MAX_STDERR,
        format!(
            "{MC_SETS} sets x {MC_SAMPLES} samples: worst {:.2} sigma at {}; largest stderr {worst_stderr:.2e} (limit {MC_MAX_STDERR:e})",
            worst_sigma.0, worst_sigma.1
        ),
    )
}

fn run_cli(args: &[&str]) -> bool {
    Command::new(env!("CARGO_BIN_EXE_hybridtele")).args(args).status().is_ok_and(|s| s.success())
}

fn determinism(dir: &Path) -> Verdict {
    let config = dir.join("sweep.json");
    std::fs::write(
        &config,
        r#"{"families": ["spq", "hqA", "hqB", "coherent"], "alpha_grid": [0.5, 1.0], "r_grid": [0.5, 1.0, 1.5],
            "loss_grid": [0.0, 0.2], "method": "quad"}"#,
    )
    .unwrap();
    let mut same = Vec::new();
    for (name, args) in [("validate", vec!["validate", "--out"]), ("sweep", vec!["sweep", "--config", config.to_str().unwrap(), "--out"])] {
        let outputs: Vec<_> = (0..2)
            .map(|run| {
                let out = dir.join(format!("{name}{run}"));
                let mut full = args.clone();
                full.push(out.to_str().unwrap());
                run_cli(&full).then(|| std::fs::read(&out).unwrap())
            })
            .collect();
        same.push((name, outputs[0].is_some() && outputs[0] == outputs[1]));
    }
    let detail = same.iter().map(|(n, s)| format!("{n} identical: {s}")).collect::<Vec<_>>().join(", ");
    verdict(same.iter().all(|(_, s)| *s), detail)
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    assert!(run_cli(&["validate", "--out", report_path.to_str().unwrap()]), "validate failed to run");
    let report: Vec<Check> = serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();

    let ideal = ideal_channel();
    let ideal_passed = ideal.pass;
    let results = [
        ("ideal-channel identity", ideal),
        ("dual-rail closed form vs quadrature", photon_agreement()),
        ("literal type-B closed form vs quadrature", literal_type_b_agreement(&report, ideal_passed)),
        ("corrected type-A closed form, printed deviation", corrected_type_a(&report)),
        ("zero-amplitude factorization", factorization()),
        ("cat-limit bridge", cat_limit()),
        ("classical-limit thresholds", classical_threshold()),
        ("crossover amplitudes", crossovers()),
        ("loss behavior", loss_behavior(&report)),
        ("Monte Carlo vs quadrature", monte_carlo()),
        ("determinism", determinism(dir.path())),
    ];

    let mut failed = 0;
    for (i, (name, v)) in results.iter().enumerate() {
        println!("criterion {:>2} {} {name}: {}", i + 1, if v.pass { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.pass);
    }
    println!("{} of {} criteria pass", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
