//! Validation report: invariants, printed-vs-corrected comparisons against the
//! quadrature oracle, and checks of the threshold and crossover claims.
//!
//! Every item is computed; nothing aborts the run. A failing evaluation shows
//! up as a failing item whose `computed` field carries the error text.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use hybridtele_core::channel::{self, delta_for, ChannelSpec, NoiseKernel};
use hybridtele_core::closed_form::{self, FormulaVariant};
use hybridtele_core::engine::{self, Averaging, QuadratureConfig};
use hybridtele_core::qubit::{self, chi_in, make_qubit, ElementaryKet, Family, QubitSpec};
use hybridtele_core::special::{self, PhasePoint};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::eval::{evaluate, Approach, EvalError, Point};
use crate::figure::reproduce_figure;
use crate::sweep::{run_sweep, SweepConfig, SweepRow, TopologyChoice};
use crate::threshold::{find_threshold, Metric, ThresholdQuery, Variable};

/// Agreement tolerance between closed forms and the oracle.
pub const AGREEMENT_TOL: f64 = 1e-8;
/// Squeezing grid for closed-form agreement, `0.2, 0.4, …, 2.4`.
pub const AGREEMENT_R: [f64; 12] = [0.2, 0.4, 0.6, 0.8, 1.0, 1.2, 1.4, 1.6, 1.8, 2.0, 2.2, 2.4];
/// Amplitudes for closed-form agreement.
pub const AGREEMENT_ALPHA: [f64; 4] = [0.3, 0.6, 1.0, 1.5];
/// Cutoff value the loss analysis is compared with.
pub const REFERENCE_LOSS_CUTOFF: f64 = 0.35;

/// Reflectivity grid `0, 0.05, …, 1`.
pub fn loss_steps() -> Vec<f64> {
    (0..=20).map(|i| i as f64 * 0.05).collect()
}

/// Noise grid `0.1, 0.2, …, 2`.
pub fn delta_steps() -> Vec<f64> {
    (1..=20).map(|i| i as f64 * 0.1).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub check_id: String,
    pub description: String,
    pub expected: Value,
    pub computed: Value,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

struct Outcome {
    expected: Value,
    computed: Value,
    tolerance: Option<f64>,
    pass: bool,
}

impl Outcome {
    fn close(expected: f64, computed: f64, tol: f64) -> Self {
        Outcome { expected: json!(expected), computed: json!(computed), tolerance: Some(tol), pass: (expected - computed).abs() <= tol }
    }

    fn bounded(worst: Worst, tol: f64) -> Self {
        Outcome {
            expected: json!(format!("max deviation <= {tol:e}")),
            computed: json!({ "max_deviation": worst.dev, "at": worst.at }),
            tolerance: Some(tol),
            pass: worst.dev <= tol,
        }
    }

    fn flag(expected: Value, computed: Value, pass: bool) -> Self {
        Outcome { expected, computed, tolerance: None, pass }
    }
}

/// Largest deviation seen and where it occurred.
struct Worst {
    dev: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst { dev: 0.0, at: String::new() }
    }

    fn record(&mut self, dev: f64, at: impl FnOnce() -> String) {
        let dev = if dev.is_nan() { f64::INFINITY } else { dev };
        if dev > self.dev || self.at.is_empty() {
            self.dev = dev;
            self.at = at();
        }
    }
}

fn check(id: &str, description: &str, body: impl FnOnce() -> Result<Outcome, EvalError>) -> Check {
    let outcome = body().unwrap_or_else(|e| Outcome::flag(Value::Null, json!({ "error": e.to_string() }), false));
    Check {
        check_id: id.to_owned(),
        description: description.to_owned(),
        expected: outcome.expected,
        computed: outcome.computed,
        tolerance: outcome.tolerance,
        pass: outcome.pass,
    }
}

fn averaging(family: Family) -> Averaging {
    match family {
        Family::CoherentQubit => Averaging::NumericGrid,
        _ => Averaging::AnalyticMoments,
    }
}

fn kernel(delta: f64) -> Result<NoiseKernel, EvalError> {
    Ok(NoiseKernel::from_delta(delta)?)
}

/// Quadrature average, before clamping.
fn oracle(family: Family, alpha: f64, k: &NoiseKernel) -> Result<f64, EvalError> {
    Ok(engine::fidelity_average(family, alpha, k, &QuadratureConfig::default(), averaging(family))?.raw_value)
}

fn closed(family: Family, alpha: f64, k: &NoiseKernel, variant: FormulaVariant) -> Result<f64, EvalError> {
    Ok(closed_form::avg_fidelity(family, k, alpha, variant).ok_or(EvalError::NoClosedForm { family, what: "average" })??)
}

fn fixed_state(family: Family, alpha: f64, p: f64, phi: f64) -> Result<qubit::TermDecomposition, EvalError> {
    Ok(make_qubit(&QubitSpec::new(family, alpha, p, phi)?)?)
}

fn alphas_for(family: Family, alphas: &[f64]) -> Vec<f64> {
    if family.uses_alpha() {
        alphas.to_vec()
    } else {
        vec![0.0]
    }
}

/// `(p, φ)` pairs from a fixed seed.
fn random_inputs(seed: u64, count: usize) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| (rng.random::<f64>(), TAU * rng.random::<f64>())).collect()
}

/// Worst closed-vs-oracle deviation over the agreement grid.
fn agreement(family: Family, variant: FormulaVariant) -> Result<Worst, EvalError> {
    let mut worst = Worst::new();
    for &alpha in &alphas_for(family, &AGREEMENT_ALPHA) {
        for &r in &AGREEMENT_R {
            let k = kernel(delta_for(r, 0.0))?;
            let dev = (closed(family, alpha, &k, variant)? - oracle(family, alpha, &k)?).abs();
            worst.record(dev, || format!("alpha={alpha} r={r}"));
        }
    }
    Ok(worst)
}

/// Runs every section and concatenates the items in a fixed order.
pub fn validate() -> Vec<Check> {
    let sections: [fn() -> Vec<Check>; 9] = [
        special_checks,
        channel_checks,
        qubit_checks,
        engine_checks,
        closed_form_checks,
        loss_checks,
        claim_checks,
        figure_checks,
        sweep_checks,
    ];
    sections.par_iter().map(|section| section()).collect::<Vec<_>>().concat()
}

fn special_checks() -> Vec<Check> {
    let points = [PhasePoint::new(0.0, 0.0), PhasePoint::new(0.3, -0.4), PhasePoint::new(-0.6, 0.8), PhasePoint::new(1.0, 0.0)];
    vec![
        check("special.unitarity", "sum over m <= 30 of |<m|D(z)|n>|^2 is 1 for n <= 3, |z| <= 1", || {
            let mut worst = Worst::new();
            for n in 0..=3 {
                for z in points {
                    let total: f64 = (0..=30).map(|m| special::disp_elem_fock(m, n, z).norm_sqr()).sum();
                    worst.record((total - 1.0).abs(), || format!("n={n} z={}", z.value()));
                }
            }
            Ok(Outcome::bounded(worst, 1e-10))
        }),
        check("special.conjugation", "<m|D(-z)|n> = conj(<n|D(z)|m>) for m, n <= 3", || {
            let mut worst = Worst::new();
            for m in 0..=3 {
                for n in 0..=3 {
                    for z in points {
                        let dev = (special::disp_elem_fock(m, n, -z) - special::disp_elem_fock(n, m, z).conj()).norm();
                        worst.record(dev, || format!("m={m} n={n} z={}", z.value()));
                    }
                }
            }
            Ok(Outcome::bounded(worst, 1e-12))
        }),
        check("special.coherent_overlap", "<beta|D(0)|gamma> equals the coherent-state overlap", || {
            let (b, g) = (Complex64::new(0.4, -0.2), Complex64::new(-0.3, 0.7));
            let direct = special::disp_elem_coherent(b, g, PhasePoint::ORIGIN);
            let overlap = (-0.5 * b.norm_sqr() - 0.5 * g.norm_sqr() + b.conj() * g).exp();
            let mut worst = Worst::new();
            worst.record((direct - overlap).norm(), || "beta=0.4-0.2i gamma=-0.3+0.7i".to_owned());
            Ok(Outcome::bounded(worst, 1e-12))
        }),
    ]
}

fn channel_checks() -> Vec<Check> {
    vec![
        check("channel.delta_closed_form", "noise strength of the (r, R) channel matches its closed form", || {
            let mut worst = Worst::new();
            for i in 0..=12 {
                let r = 0.25 * i as f64;
                for &loss in &loss_steps() {
                    let dev = (ChannelSpec::pair(r, loss)?.kernel().delta() - delta_for(r, loss)).abs();
                    worst.record(dev, || format!("r={r} R={loss}"));
                }
            }
            Ok(Outcome::bounded(worst, 1e-12))
        }),
        check("channel.delta_monotone", "delta increases with R and decreases with r on a 20x20 grid", || {
            let grid: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
            let mut violations = 0usize;
            for i in 0..20 {
                for j in 1..20 {
                    let (r, loss) = (3.0 * grid[i], grid[j]);
                    violations += usize::from(delta_for(r, loss) < delta_for(r, grid[j - 1]) - 1e-15);
                    violations += usize::from(delta_for(3.0 * grid[j], grid[i]) > delta_for(3.0 * grid[j - 1], grid[i]) + 1e-15);
                }
            }
            Ok(Outcome::flag(json!({ "violations": 0 }), json!({ "violations": violations }), violations == 0))
        }),
        check("channel.loss_identity", "symmetric loss with R = 0 leaves the covariance unchanged", || {
            let mut worst = Worst::new();
            for &r in &[0.0, 0.7, 2.0] {
                let cov = channel::tmsv_covariance(r)?;
                let lossless = channel::apply_symmetric_loss(&cov, 0.0)?;
                let dev = (lossless.eta() - cov.eta()).abs().max((lossless.c() - cov.c()).abs());
                worst.record(dev, || format!("r={r}"));
            }
            Ok(Outcome::bounded(worst, 1e-15))
        }),
        check("channel.vacuum_limits", "delta is 2 at r = 0 and at R = 1", || {
            let dev = (delta_for(0.0, 0.0) - 2.0).abs().max((delta_for(1.7, 1.0) - 2.0).abs());
            Ok(Outcome::close(2.0, 2.0 + dev, 1e-15))
        }),
    ]
}

fn qubit_checks() -> Vec<Check> {
    let inputs = random_inputs(11, 4);
    vec![
        check("qubit.normalized", "every constructed qubit has unit norm", || {
            let mut worst = Worst::new();
            for family in Family::ALL {
                for &alpha in &alphas_for(family, &[0.1, 0.5, 1.0, 2.0]) {
                    for &(p, phi) in &inputs {
                        let dev = (fixed_state(family, alpha, p, phi)?.self_overlap() - 1.0).abs();
                        worst.record(dev, || format!("{family} alpha={alpha} p={p:.4} phi={phi:.4}"));
                    }
                }
            }
            Ok(Outcome::bounded(worst, 1e-12))
        }),
        check("qubit.chi_bounds", "chi(0) = 1, |chi| <= 1 and chi(-z) = conj(chi(z)) on 1000 random points", || {
            let mut rng = ChaCha8Rng::seed_from_u64(12);
            let mut origin = Worst::new();
            let mut excess = Worst::new();
            let mut hermitian = Worst::new();
            for family in Family::ALL {
                for &alpha in &alphas_for(family, &[0.5, 1.5]) {
                    let (p, phi) = inputs[0];
                    let state = fixed_state(family, alpha, p, phi)?;
                    let two = family.modes() == 2;
                    let at = |z1: PhasePoint, z2: PhasePoint| chi_in(&state, z1, two.then_some(z2));
                    origin.record((at(PhasePoint::ORIGIN, PhasePoint::ORIGIN)? - 1.0).norm(), || format!("{family} alpha={alpha}"));
                    for _ in 0..1000 {
                        let mut draw = || PhasePoint::new(4.0 * rng.random::<f64>() - 2.0, 4.0 * rng.random::<f64>() - 2.0);
                        let (z1, z2) = (draw(), draw());
                        let value = at(z1, z2)?;
                        excess.record((value.norm() - 1.0).max(0.0), || format!("{family} alpha={alpha}"));
                        hermitian.record((at(-z1, -z2)? - value.conj()).norm(), || format!("{family} alpha={alpha}"));
                    }
                }
            }
            let pass = origin.dev <= 1e-12 && excess.dev <= 1e-12 && hermitian.dev <= 1e-12;
            Ok(Outcome {
                expected: json!({ "chi_origin_error": 0.0, "norm_excess": 0.0, "hermiticity_error": 0.0 }),
                computed: json!({ "chi_origin_error": origin.dev, "norm_excess": excess.dev, "hermiticity_error": hermitian.dev }),
                tolerance: Some(1e-12),
                pass,
            })
        }),
        check(
            "qubit.hqB_small_amplitude_chi",
            "type-B characteristic function at alpha = 1e-4 against the dual-rail single-photon qubit, pointwise",
            || {
                let mut worst = Worst::new();
                let points = [PhasePoint::new(0.2, 0.1), PhasePoint::new(-0.5, 0.4), PhasePoint::new(0.9, -0.7)];
                for &(p, phi) in &inputs {
                    let hqb = fixed_state(Family::HqB, 1e-4, p, phi)?;
                    let spq = fixed_state(Family::Spq, 0.0, p, phi)?;
                    for z1 in points {
                        for z2 in points {
                            let dev = (chi_in(&hqb, z1, Some(z2))? - chi_in(&spq, z1, Some(z2))?).norm();
                            worst.record(dev, || format!("p={p:.4} phi={phi:.4} z1={} z2={}", z1.value(), z2.value()));
                        }
                    }
                }
                Ok(Outcome::bounded(worst, 1e-6))
            },
        ),
        check(
            "qubit.cat_norm_convention",
            "the literal cat normalization N = 2(1 +/- exp(-2 alpha^2)) equals the squared norm of |alpha> +/- |-alpha>; states use its square root",
            || {
                let mut worst = Worst::new();
                for &alpha in &[0.3, 1.0, 2.0] {
                    let (a, b) = (ElementaryKet::Coherent(Complex64::new(alpha, 0.0)), ElementaryKet::Coherent(Complex64::new(-alpha, 0.0)));
                    for sign in [1.0, -1.0] {
                        let squared_norm = 2.0 + 2.0 * sign * qubit::overlap(&a, &b).re;
                        let literal = 2.0 * (1.0 + sign * (-2.0 * alpha * alpha).exp());
                        worst.record((squared_norm - literal).abs(), || format!("alpha={alpha} sign={sign}"));
                    }
                }
                Ok(Outcome::bounded(worst, 1e-14))
            },
        ),
    ]
}

fn engine_checks() -> Vec<Check> {
    vec![
        check("engine.mode_integral_vacuum", "vacuum mode integral on the vacuum channel", || {
            let vac = (&ElementaryKet::Fock(0), &ElementaryKet::Fock(0));
            let v = engine::mode_overlap_integral(vac, vac, &NoiseKernel::VACUUM, &QuadratureConfig::default())?;
            Ok(Outcome::close(0.5, v.re, 1e-14))
        }),
        check("engine.mode_integral_photon", "one-photon mode integral on the vacuum channel", || {
            let one = (&ElementaryKet::Fock(1), &ElementaryKet::Fock(1));
            let v = engine::mode_overlap_integral(one, one, &NoiseKernel::VACUUM, &QuadratureConfig::default())?;
            Ok(Outcome::close(0.25, v.re, 1e-14))
        }),
        check("engine.spq_vacuum_channel", "dual-rail single-photon qubit with p = 1 on the vacuum channel", || {
            let f = engine::fidelity_fixed(&fixed_state(Family::Spq, 0.0, 1.0, 0.0)?, &NoiseKernel::VACUUM, &QuadratureConfig::default())?;
            Ok(Outcome::close(0.125, f.raw_value, 1e-14))
        }),
        check("engine.ideal_channel", "fidelity at delta = 1e-8 for every family, alpha in {0.5, 1, 2}, 5 random inputs", || {
            let k = kernel(1e-8)?;
            let mut worst = Worst::new();
            for family in Family::ALL {
                for &alpha in &alphas_for(family, &[0.5, 1.0, 2.0]) {
                    for &(p, phi) in &random_inputs(1, 5) {
                        let f = engine::fidelity_fixed(&fixed_state(family, alpha, p, phi)?, &k, &QuadratureConfig::default())?;
                        worst.record((f.raw_value - 1.0).abs(), || format!("{family} alpha={alpha} p={p:.4} phi={phi:.4}"));
                    }
                }
            }
            Ok(Outcome::bounded(worst, 1e-6))
        }),
        check("engine.averaging_paths", "analytic moments and the (p, phi) grid give the same average", || {
            let mut worst = Worst::new();
            for &(family, alpha) in
                &[(Family::Spq, 0.0), (Family::SingleRail, 0.0), (Family::HqA, 0.7), (Family::HqB, 1.2), (Family::HqB, 0.4)]
            {
                for &d in &[0.05, 0.6, 1.5] {
                    let k = kernel(d)?;
                    let quad = QuadratureConfig::default();
                    let a = engine::fidelity_average(family, alpha, &k, &quad, Averaging::AnalyticMoments)?.raw_value;
                    let g = engine::fidelity_average(family, alpha, &k, &quad, Averaging::NumericGrid)?.raw_value;
                    worst.record((a - g).abs(), || format!("{family} alpha={alpha} delta={d}"));
                }
            }
            Ok(Outcome::bounded(worst, 1e-7))
        }),
        check("engine.convergence", "order 60 against order 30 for alpha <= 3, delta >= 0.01", || convergence(30, 1e-8)),
        check("engine.convergence_reference", "order 60 against order 120 for alpha <= 3, delta >= 0.01", || convergence(120, 1e-12)),
        check("engine.monte_carlo", "Monte Carlo (2e5 samples) within 3 standard errors of quadrature on 5 random sets", || {
            let mut rng = ChaCha8Rng::seed_from_u64(21);
            let mut worst = Worst::new();
            for i in 0..5 {
                let family = Family::ALL[i];
                let alpha = 0.2 + 0.8 * rng.random::<f64>();
                let d = 0.1 + 1.9 * rng.random::<f64>();
                let (p, phi) = (rng.random::<f64>(), TAU * rng.random::<f64>());
                let state = fixed_state(family, alpha, p, phi)?;
                let k = kernel(d)?;
                let q = engine::fidelity_fixed(&state, &k, &QuadratureConfig::default())?.raw_value;
                let mc = engine::fidelity_monte_carlo(&state, &k, 200_000, 100 + i as u64)?;
                let sigmas = (mc.raw_value - q).abs() / mc.error_estimate;
                worst.record(sigmas, || format!("{family} alpha={alpha:.4} delta={d:.4} stderr={:.2e}", mc.error_estimate));
            }
            Ok(Outcome::bounded(worst, 3.0))
        }),
        check("engine.monotone_in_delta", "average fidelity is non-increasing in delta (step 0.05) for alpha in {0.5, 1, 2}", || {
            let mut worst = Worst::new();
            for family in Family::ALL {
                for &alpha in &alphas_for(family, &[0.5, 1.0, 2.0]) {
                    let mut previous = f64::INFINITY;
                    for i in 0..=40 {
                        let d = 0.05 * i as f64;
                        let f = oracle(family, alpha, &kernel(d)?)?;
                        worst.record((f - previous).max(0.0), || format!("{family} alpha={alpha} delta={d}"));
                        previous = f;
                    }
                }
            }
            Ok(Outcome::bounded(worst, 1e-12))
        }),
        check("engine.physical_range", "raw fidelity within [-1e-9, 1 + 1e-9] on 100 random points", || {
            let mut rng = ChaCha8Rng::seed_from_u64(31);
            let mut worst = Worst::new();
            for i in 0..100 {
                let family = Family::ALL[i % Family::ALL.len()];
                let alpha = 0.05 + 1.95 * rng.random::<f64>();
                let d = 2.0 * rng.random::<f64>();
                let (p, phi) = (rng.random::<f64>(), TAU * rng.random::<f64>());
                let f = engine::fidelity_fixed(&fixed_state(family, alpha, p, phi)?, &kernel(d)?, &QuadratureConfig::default())?.raw_value;
                worst.record((-f).max(f - 1.0).max(0.0), || format!("{family} alpha={alpha:.4} delta={d:.4}"));
            }
            Ok(Outcome::bounded(worst, 1e-9))
        }),
        check("engine.hqA_zero_amplitude", "type-A quadrature at alpha = 0 equals single-rail times 2/(2 + delta), delta = 0.1..2", || {
            let mut worst = Worst::new();
            for &d in &delta_steps() {
                let k = kernel(d)?;
                let expected = closed_form::avg_fidelity_singlerail(&k) * 2.0 / (2.0 + d);
                worst.record((oracle(Family::HqA, 0.0, &k)? - expected).abs(), || format!("delta={d}"));
            }
            Ok(Outcome::bounded(worst, 1e-8))
        }),
        check(
            "engine.hqB_small_amplitude_vs_spq",
            "type-B quadrature at alpha = 1e-4 against the dual-rail single-photon closed form, delta = 0.1..2",
            || {
                let mut worst = Worst::new();
                for &d in &delta_steps() {
                    let k = kernel(d)?;
                    worst.record((oracle(Family::HqB, 1e-4, &k)? - closed_form::avg_fidelity_spq(&k)).abs(), || format!("delta={d}"));
                }
                Ok(Outcome::bounded(worst, 1e-4))
            },
        ),
        check(
            "engine.hqB_small_amplitude_limit",
            "type-B quadrature at alpha = 1e-4 on the vacuum channel against the |00>, |11> qubit value 7/48",
            || Ok(Outcome::close(7.0 / 48.0, oracle(Family::HqB, 1e-4, &NoiseKernel::VACUUM)?, 1e-6)),
        ),
    ]
}

fn convergence(reference_order: usize, tol: f64) -> Result<Outcome, EvalError> {
    let mut worst = Worst::new();
    for family in Family::ALL {
        for &alpha in &alphas_for(family, &[0.5, 1.0, 2.0, 3.0]) {
            for &d in &[0.01, 0.3, 1.0, 2.0] {
                let state = fixed_state(family, alpha, 0.37, 2.1)?;
                let k = kernel(d)?;
                let f60 = engine::fidelity_fixed_at_order(&state, &k, 60)?;
                let other = engine::fidelity_fixed_at_order(&state, &k, reference_order)?;
                worst.record((f60 - other).abs(), || format!("{family} alpha={alpha} delta={d}"));
            }
        }
    }
    Ok(Outcome::bounded(worst, tol))
}

fn closed_form_checks() -> Vec<Check> {
    use FormulaVariant::{Corrected, Printed};
    let grid = "r = 0.2..2.4, R = 0, alpha in {0.3, 0.6, 1, 1.5}";
    let mut checks: Vec<Check> = [
        ("closed.spq", Family::Spq, Printed, "dual-rail single-photon closed form against quadrature"),
        ("closed.singlerail", Family::SingleRail, Printed, "single-rail closed form against quadrature"),
        ("closed.hqA.corrected", Family::HqA, Corrected, "type-A closed form with f = 8 alpha^2/(2 + delta) against quadrature"),
        ("closed.hqA.printed", Family::HqA, Printed, "type-A closed form with f = 8 alpha^2/(2 + delta)^4 against quadrature"),
        ("closed.hqB.printed", Family::HqB, Printed, "type-B closed form with literal N against quadrature"),
        (
            "closed.hqB.corrected",
            Family::HqB,
            Corrected,
            "type-B closed form with the odd group scaled by (4 + delta^2)/(2 + delta)^2 against quadrature",
        ),
    ]
    .iter()
    .map(|&(id, family, variant, what)| {
        check(id, &format!("{what}, {grid}"), || Ok(Outcome::bounded(agreement(family, variant)?, AGREEMENT_TOL)))
    })
    .collect();

    let k_r1 = || kernel(delta_for(1.0, 0.0));
    checks.push(check(
        "closed.hqA.printed_deviation",
        "printed type-A form deviates from quadrature by more than 1e-2 at alpha = 1, r = 1",
        || {
            let k = k_r1()?;
            let printed = closed_form::avg_fidelity_hqa(&k, 1.0, Printed)?;
            let reference = oracle(Family::HqA, 1.0, &k)?;
            Ok(Outcome::flag(
                json!({ "deviation_above": 1e-2 }),
                json!({ "printed": printed, "quadrature": reference, "deviation": (printed - reference).abs() }),
                (printed - reference).abs() > 1e-2,
            ))
        },
    ));
    checks.push(check("closed.hqA.printed_at_r1", "printed type-A form at alpha = 1, r = 1 against quadrature", || {
        let k = k_r1()?;
        Ok(Outcome::close(oracle(Family::HqA, 1.0, &k)?, closed_form::avg_fidelity_hqa(&k, 1.0, Printed)?, AGREEMENT_TOL))
    }));
    let ideal = |cases: &[(Family, FormulaVariant)]| -> Result<Outcome, EvalError> {
        let mut worst = Worst::new();
        for &(family, variant) in cases {
            for &alpha in &alphas_for(family, &[0.3, 1.0, 2.0]) {
                let f = closed(family, alpha, &NoiseKernel::IDEAL, variant)?;
                worst.record((f - 1.0).abs(), || format!("{family} {variant} alpha={alpha}"));
            }
        }
        Ok(Outcome::bounded(worst, 1e-12))
    };
    checks.push(check(
        "closed.ideal_identity",
        "average closed forms equal 1 at delta = 0: both photonic forms, both type-B variants (literal N included) and corrected type A",
        || {
            ideal(&[
                (Family::Spq, Printed),
                (Family::SingleRail, Printed),
                (Family::HqB, Printed),
                (Family::HqB, Corrected),
                (Family::HqA, Corrected),
            ])
        },
    ));
    checks.push(check("closed.hqA.printed_ideal", "printed type-A form equals 1 at delta = 0", || ideal(&[(Family::HqA, Printed)])));
    checks.push(check(
        "closed.hqA_zero_amplitude",
        "type-A closed form at alpha = 0 equals single-rail times 2/(2 + delta), delta = 0.1..2",
        || {
            let mut worst = Worst::new();
            for &d in &delta_steps() {
                let k = kernel(d)?;
                let expected = closed_form::avg_fidelity_singlerail(&k) * 2.0 / (2.0 + d);
                worst.record((closed_form::avg_fidelity_hqa(&k, 0.0, Corrected)? - expected).abs(), || format!("delta={d}"));
            }
            Ok(Outcome::bounded(worst, 1e-10))
        },
    ));
    checks.push(check("closed.loss_substitution", "closed forms at delta(r, R) match quadrature on the lossy channel", || {
        let mut worst = Worst::new();
        for &(r, loss) in &[(1.5, 0.1), (2.0, 0.3), (0.8, 0.6)] {
            for &(family, alpha) in &[(Family::Spq, 0.0), (Family::SingleRail, 0.0), (Family::HqA, 1.0), (Family::HqB, 1.0)] {
                let point = Point::averaged(family, alpha, r, loss);
                let k = point.channel()?.kernel();
                let c = closed(family, alpha, &kernel(delta_for(r, loss))?, Corrected)?;
                worst.record((c - oracle(family, alpha, &k)?).abs(), || format!("{family} r={r} R={loss}"));
            }
        }
        Ok(Outcome::bounded(worst, AGREEMENT_TOL))
    }));
    checks.extend(hqb_group_checks());
    checks.extend(coherent_checks());
    checks
}

/// Printed type-B groups against the oracle split by logical branch.
fn hqb_group_checks() -> Vec<Check> {
    let mut worst = [Worst::new(), Worst::new(), Worst::new()];
    let mut ratio = Worst::new();
    let body = |worst: &mut [Worst; 3], ratio: &mut Worst| -> Result<(), EvalError> {
        for &alpha in &AGREEMENT_ALPHA {
            let enc = qubit::encoding(Family::HqB, alpha)?;
            for &r in &AGREEMENT_R {
                let k = kernel(delta_for(r, 0.0))?;
                let split = engine::branch_contributions(&enc, &k, QuadratureConfig::default().order)?;
                let g = closed_form::hqb_groups(&k, alpha, FormulaVariant::Printed)?;
                let at = || format!("alpha={alpha} r={r}");
                worst[0].record((g.prefactor * g.even - split.zero).abs(), at);
                worst[1].record((g.prefactor * g.odd - split.one).abs(), at);
                worst[2].record((g.prefactor * g.cross - split.mixed).abs(), at);
                let d = k.delta();
                let factor = (4.0 + d * d) / ((2.0 + d) * (2.0 + d));
                ratio.record((split.one / (g.prefactor * g.odd) - factor).abs(), at);
            }
        }
        Ok(())
    };
    let failure = body(&mut worst, &mut ratio).err();
    let names = [
        ("closed.hqB.group_even", "even-cat group (1/N+^2 terms)"),
        ("closed.hqB.group_odd", "odd-cat group (1/N-^2 terms)"),
        ("closed.hqB.group_cross", "cross group (1/(N+ N-) terms)"),
    ];
    let mut checks = Vec::new();
    let mut first_diverging = None;
    for (i, ((id, name), w)) in names.iter().zip(worst).enumerate() {
        if w.dev > AGREEMENT_TOL && first_diverging.is_none() {
            first_diverging = Some(i);
        }
        let err = failure.clone();
        checks.push(check(
            id,
            &format!("printed type-B {name} against the matching branch contribution of quadrature"),
            move || match err {
                Some(e) => Err(e),
                None => Ok(Outcome::bounded(w, AGREEMENT_TOL)),
            },
        ));
    }
    checks.push(check(
        "closed.hqB.printed_localization",
        "first group of the printed type-B form that disagrees with quadrature, and the factor that reconciles it",
        || {
            if let Some(e) = failure {
                return Err(e);
            }
            let computed = match first_diverging {
                Some(i) => json!({
                    "first_diverging_group": names[i].1,
                    "reconciling_factor": "(4 + delta^2)/(2 + delta)^2",
                    "max_factor_mismatch": ratio.dev,
                }),
                None => json!({ "first_diverging_group": Value::Null }),
            };
            Ok(Outcome::flag(json!({ "first_diverging_group": Value::Null }), computed, first_diverging.is_none()))
        },
    ));
    checks
}

fn coherent_checks() -> Vec<Check> {
    use FormulaVariant::{Corrected, Printed};
    let inputs = random_inputs(41, 4);
    let against_oracle = move |transform: fn(f64) -> f64, variant: FormulaVariant| -> Result<Worst, EvalError> {
        let mut worst = Worst::new();
        for &alpha in &[0.5, 1.0, 1.5] {
            for &r in &[0.4, 1.2, 2.0] {
                let k = kernel(delta_for(r, 0.0))?;
                for &(p, phi) in &inputs {
                    let state = fixed_state(Family::CoherentQubit, alpha, p, phi)?;
                    let q = engine::fidelity_fixed(&state, &k, &QuadratureConfig::default())?.raw_value;
                    let c = transform(closed_form::fidelity_coherent_qubit(&k, alpha, p, phi, variant)?);
                    worst.record((c - q).abs(), || format!("alpha={alpha} r={r} p={p:.4} phi={phi:.4}"));
                }
            }
        }
        Ok(worst)
    };
    vec![
        check("closed.coherent.printed_ideal", "printed coherent-state qubit expression at p = 1, delta = 0, alpha = 1", || {
            Ok(Outcome::close(1.0, closed_form::fidelity_coherent_qubit(&NoiseKernel::IDEAL, 1.0, 1.0, 0.0, Printed)?, 1e-12))
        }),
        check("closed.coherent.printed", "printed coherent-state qubit expression against fixed-input quadrature", || {
            Ok(Outcome::bounded(against_oracle(|f| f, Printed)?, AGREEMENT_TOL))
        }),
        check(
            "closed.coherent.corrected",
            "coherent-state qubit expression without 1/pi and with exp(-2 alpha^2) in the linear cross term against fixed-input quadrature",
            || Ok(Outcome::bounded(against_oracle(|f| f, Corrected)?, AGREEMENT_TOL)),
        ),
        check(
            "closed.coherent.cross_exponent",
            "removing 1/pi alone does not reconcile the printed expression; the linear cross term needs exp(-2 alpha^2)",
            || {
                let pi_only = against_oracle(|f| f * std::f64::consts::PI, Printed)?;
                let both = against_oracle(|f| f, Corrected)?;
                Ok(Outcome::flag(
                    json!({ "pi_removed_only": "deviates", "pi_removed_and_exponent_doubled": "agrees" }),
                    json!({ "pi_removed_only": pi_only.dev, "pi_removed_and_exponent_doubled": both.dev }),
                    pi_only.dev > AGREEMENT_TOL && both.dev <= AGREEMENT_TOL,
                ))
            },
        ),
        check(
            "closed.coherent.average_reference",
            "input-averaged coherent-state qubit fidelity at delta = 2 exp(-2), alpha = 0.5",
            || {
                let k = kernel(2.0 * (-2.0f64).exp())?;
                Ok(Outcome::close(0.847536978295676, oracle(Family::CoherentQubit, 0.5, &k)?, 1e-9))
            },
        ),
    ]
}

/// Families and amplitudes used for the loss analysis.
const LOSS_CASES: [(Family, f64); 5] =
    [(Family::Spq, 0.0), (Family::SingleRail, 0.0), (Family::HqA, 1.0), (Family::HqB, 1.0), (Family::CoherentQubit, 1.0)];

fn loss_checks() -> Vec<Check> {
    vec![
        check("loss.monotone", "every family's average fidelity is non-increasing in R (step 0.05) at r in {1.5, 2}", || {
            let mut worst = Worst::new();
            for &(family, alpha) in &LOSS_CASES {
                for &r in &[1.5, 2.0] {
                    let mut previous = f64::INFINITY;
                    for &loss in &loss_steps() {
                        let f = evaluate(&Point::averaged(family, alpha, r, loss), Approach::Quadrature, &QuadratureConfig::default())?
                            .raw_value;
                        worst.record((f - previous).max(0.0), || format!("{family} r={r} R={loss}"));
                        previous = f;
                    }
                }
            }
            Ok(Outcome::bounded(worst, 1e-12))
        }),
        check("loss.full_reflection", "average fidelity at R = 1 equals the vacuum-channel value", || {
            let mut worst = Worst::new();
            for &(family, alpha) in &LOSS_CASES {
                for &r in &[1.5, 2.0] {
                    let f =
                        evaluate(&Point::averaged(family, alpha, r, 1.0), Approach::Quadrature, &QuadratureConfig::default())?.raw_value;
                    worst.record((f - oracle(family, alpha, &NoiseKernel::VACUUM)?).abs(), || format!("{family} r={r}"));
                }
            }
            Ok(Outcome::bounded(worst, 1e-8))
        }),
    ]
}

fn threshold_query(metric: &str, variable: Variable, lo: f64, hi: f64, approach: Approach) -> ThresholdQuery {
    let mut q = ThresholdQuery::new(metric.parse::<Metric>().expect("static metric"), variable, lo, hi);
    q.approach = approach;
    q
}

fn window_check(id: &str, description: &str, q: ThresholdQuery, window: (f64, f64)) -> Check {
    check(id, description, || {
        let out = find_threshold(&q)?;
        let inside = out.root > window.0 && out.root < window.1;
        Ok(Outcome::flag(
            json!({ "open_interval": [window.0, window.1] }),
            json!({ "root": out.root, "bracketed": out.straddles(), "metric_around_root": out.metric_around_root }),
            inside && out.straddles(),
        ))
    })
}

fn claim_checks() -> Vec<Check> {
    use FormulaVariant::{Corrected, Printed};
    let closed_printed = Approach::Closed(Printed);
    let closed_corrected = Approach::Closed(Corrected);
    let mut checks = vec![window_check(
        "claim.threshold.spq",
        "classical-limit squeezing r* of the dual-rail single-photon closed form, R = 0",
        threshold_query("spq", Variable::Squeezing, 0.5, 2.5, closed_printed),
        (1.0, 1.3),
    )];
    for (id, metric, approach, what) in [
        ("claim.threshold.hqA", "hqA", closed_corrected, "type A, corrected closed form"),
        ("claim.threshold.hqA_quadrature", "hqA", Approach::Quadrature, "type A, quadrature"),
        ("claim.threshold.hqB", "hqB", closed_corrected, "type B, corrected closed form"),
        ("claim.threshold.hqB_printed", "hqB", closed_printed, "type B, printed closed form"),
    ] {
        let q = threshold_query(metric, Variable::Squeezing, 0.5, 2.5, approach);
        checks.push(window_check(id, &format!("classical-limit squeezing r* at alpha = 1, {what}"), q, (0.9, 1.4)));
    }
    for (id, metric, lo, approach, what) in [
        ("claim.crossover.hqA", "hqA-spq", 0.5, Approach::Quadrature, "type A minus dual-rail, quadrature"),
        ("claim.crossover.hqB", "hqB-spq", 0.1, Approach::Quadrature, "type B minus dual-rail, quadrature"),
        ("claim.crossover.hqB_printed", "hqB-spq", 0.5, closed_printed, "type B minus dual-rail, printed closed form"),
    ] {
        let mut q = threshold_query(metric, Variable::Alpha, lo, 1.5, approach);
        q.target = 0.0;
        q.squeezing = 1.5;
        checks.push(window_check(id, &format!("crossover amplitude at r = 1.5, R = 0: {what}"), q, (0.8, 1.2)));
    }
    let mut single = threshold_query("singlerail-coherent", Variable::Alpha, 0.4, 1.1, Approach::Quadrature);
    single.target = 0.0;
    single.squeezing = 1.5;
    checks.push(window_check(
        "claim.crossover.single_mode",
        "crossover amplitude of single-rail against the averaged coherent-state qubit at r = 1.5, quadrature",
        single,
        (0.6, 0.9),
    ));
    checks.extend(loss_cutoff_checks());
    checks
}

fn loss_cutoff(family: Family, alpha: f64, r: f64, approach: Approach) -> Result<f64, EvalError> {
    let mut q = ThresholdQuery::new(Metric { primary: family, baseline: None }, Variable::Loss, 0.0, 1.0);
    q.alpha = alpha;
    q.squeezing = r;
    q.approach = approach;
    Ok(find_threshold(&q)?.root)
}

fn loss_cutoff_checks() -> Vec<Check> {
    let cases = [(Family::Spq, 0.0), (Family::SingleRail, 0.0), (Family::HqA, 1.0), (Family::HqB, 1.0)];
    let mut checks = Vec::new();
    for &(family, alpha) in &cases {
        for &r in &[1.5, 2.0] {
            let id = format!("claim.loss_cutoff.{family}.r{r}");
            let description =
                format!("cutoff R* where F = 2/3 at r = {r} ({family}, alpha = {alpha}): corrected closed form against quadrature");
            checks.push(check(&id, &description, || {
                let c = loss_cutoff(family, alpha, r, Approach::Closed(FormulaVariant::Corrected))?;
                let q = loss_cutoff(family, alpha, r, Approach::Quadrature)?;
                Ok(Outcome { expected: json!(q), computed: json!(c), tolerance: Some(0.005), pass: (c - q).abs() <= 0.005 })
            }));
        }
    }
    checks.push(check(
        "claim.loss_cutoff.reference",
        "computed cutoffs R* at r = 2 (quadrature) beside the reference value R ~ 0.35; passes if a dual-rail or hybrid cutoff lies within 0.05 of it",
        || {
            let mut computed = serde_json::Map::new();
            let mut nearest = f64::INFINITY;
            for &(family, alpha) in &cases {
                let root = loss_cutoff(family, alpha, 2.0, Approach::Quadrature)?;
                computed.insert(family.to_string(), json!(root));
                if family != Family::SingleRail {
                    nearest = nearest.min((root - REFERENCE_LOSS_CUTOFF).abs());
                }
            }
            computed.insert("closest_distance".to_owned(), json!(nearest));
            Ok(Outcome { expected: json!(REFERENCE_LOSS_CUTOFF), computed: Value::Object(computed), tolerance: Some(0.05), pass: nearest <= 0.05 })
        },
    ));
    checks
}

fn fidelity_of(rows: &[SweepRow], keep: impl Fn(&SweepRow) -> bool) -> Vec<(String, f64)> {
    rows.iter().filter(|row| keep(row)).filter_map(|row| row.fidelity.map(|f| (curve_name(row), f))).collect()
}

fn curve_name(row: &SweepRow) -> String {
    format!("{} alpha={} {} r={}", row.family, row.alpha, row.approach, row.r)
}

fn figure_checks() -> Vec<Check> {
    let oracle_consistent = |row: &SweepRow| row.approach != Approach::Closed(FormulaVariant::Printed) || !row.family.uses_alpha();
    vec![
        check(
            "figure.1.high_squeezing",
            "figure 1 quadrature and oracle-consistent closed-form curves within 0.02 of 1 at r = 3 for alpha <= 1",
            || {
                let fig = reproduce_figure(1).expect("valid id");
                let mut worst = Worst::new();
                for (name, f) in fidelity_of(&fig.rows, |row| row.r == 3.0 && row.alpha <= 1.0 && oracle_consistent(row)) {
                    worst.record(1.0 - f, || name);
                }
                Ok(Outcome::bounded(worst, 0.02))
            },
        ),
        check("figure.4.lossless_consistency", "figure 4 at R = 0 equals the lossless figure 1 values at r = 1.5 and 2", || {
            let lossless = reproduce_figure(1).expect("valid id").rows;
            let lossy = reproduce_figure(4).expect("valid id").rows;
            let mut worst = Worst::new();
            for row in lossy.iter().filter(|row| row.loss == 0.0) {
                let twin = lossless
                    .iter()
                    .find(|o| o.family == row.family && o.alpha == row.alpha && o.approach == row.approach && (o.r - row.r).abs() < 1e-12);
                let dev = match (twin.and_then(|o| o.fidelity), row.fidelity) {
                    (Some(a), Some(b)) => (a - b).abs(),
                    _ => f64::INFINITY,
                };
                worst.record(dev, || curve_name(row));
            }
            Ok(Outcome::bounded(worst, 1e-12))
        }),
        check("figure.loss_monotone", "every curve of figures 4 and 5 is non-increasing in R", || {
            let mut worst = Worst::new();
            for id in [4, 5] {
                let mut last = BTreeMap::new();
                for row in reproduce_figure(id).expect("valid id").rows {
                    let curve = curve_name(&row);
                    let f = row.fidelity.unwrap_or(f64::NAN);
                    if let Some(previous) = last.insert(curve.clone(), f) {
                        let rise = if f > previous || f.is_nan() { f - previous } else { 0.0 };
                        worst.record(rise, || format!("figure {id}: {curve} R={}", row.loss));
                    }
                }
            }
            Ok(Outcome::bounded(worst, 1e-12))
        }),
    ]
}

fn sweep_checks() -> Vec<Check> {
    let config = SweepConfig {
        families: vec![Family::Spq, Family::HqA],
        alpha_grid: vec![1.0],
        r_grid: AGREEMENT_R.to_vec(),
        loss_grid: vec![0.0],
        topology: TopologyChoice::Auto,
        methods: vec![Approach::Quadrature],
        quad: QuadratureConfig::default(),
        seed: 0,
        out: None,
    };
    let rows = run_sweep(&config);
    let expected_rows = config.row_count();
    vec![
        check("sweep.completeness", "sweep row count equals the product of grid sizes and families", || {
            Ok(Outcome::flag(json!(expected_rows), json!(rows.len()), rows.len() == expected_rows))
        }),
        check("sweep.single_crossing", "dual-rail and type-A (alpha = 1) curves cross at most once over r = 0.2..2.4", || {
            let spq: Vec<f64> = rows.iter().filter(|row| row.family == Family::Spq).filter_map(|row| row.fidelity).collect();
            let hqa: Vec<f64> = rows.iter().filter(|row| row.family == Family::HqA).filter_map(|row| row.fidelity).collect();
            let signs: Vec<bool> = spq.iter().zip(&hqa).map(|(s, h)| h > s).collect();
            let crossings = signs.windows(2).filter(|w| w[0] != w[1]).count();
            Ok(Outcome::flag(json!("at most 1"), json!(crossings), crossings <= 1 && spq.len() == hqa.len()))
        }),
    ]
}
