//! Numerical teleportation fidelities.
//!
//! With a Gaussian kernel acting independently on each teleported mode, the
//! fidelity `∫ Π d²zᵢ/π χ(Z) K(Z) χ(−Z)` of a state
//! `Σ_k c_k |k₁⟩⊗|k₂⟩` separates into
//!
//! ```text
//! F = Σ_{k,l,m,n} c_k c_l* c_m c_n* Π_modes ∫ d²z/π K(z) ⟨l|D(z)|k⟩ ⟨n|D(−z)|m⟩
//! ```
//!
//! so only 2-D integrals are ever evaluated. Each is done by tensor
//! Gauss–Hermite quadrature in the scaled variable `z = (x + iy)/√(1 + Δ/2)`,
//! which absorbs the Gaussian envelope carried by the matrix elements and the
//! kernel. Averages over inputs take `p` uniform on `[0, 1]` and `φ` uniform
//! on `[0, 2π)`.
//!
//! [`fidelity_monte_carlo`] integrates the full (unfactorized) integrand by
//! importance sampling and serves as an independent check.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
// unused whenever another crate in the graph links std
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::NoiseKernel;
use crate::closed_form::FormulaVariant;
use crate::quadrature::{GaussHermite, GaussLegendre};
use crate::qubit::{self, Branch, ElementaryKet, Family, LogicalEncoding, Term, TermDecomposition};
use crate::special::PhasePoint;
use crate::{Error, Result};

/// Error estimates above this mark a result [`Status::Unconverged`].
pub const CONVERGENCE_THRESHOLD: f64 = 1e-6;

/// Smallest Monte Carlo sample count accepted.
pub const MIN_MC_SAMPLES: usize = 10_000;

/// Absolute slack allowed outside `[0, 1]` on top of ten error estimates.
pub const RANGE_FLOOR: f64 = 1e-9;

const NORMALIZATION_TOL: f64 = 1e-10;

/// Node counts for the phase-space and input-averaging rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureConfig {
    /// Gauss–Hermite points per real axis.
    pub order: usize,
    /// Gauss–Legendre points in `p`.
    pub p_nodes: usize,
    /// Uniform points in `φ`.
    pub phi_nodes: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig { order: 60, p_nodes: 32, phi_nodes: 64 }
    }
}

impl QuadratureConfig {
    pub fn with_order(order: usize) -> Self {
        QuadratureConfig { order, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 4 {
            return Err(Error::InvalidQuadrature("order must be at least 4 (the error estimate uses order/2)"));
        }
        if self.p_nodes < 2 || self.phi_nodes < 2 {
            return Err(Error::InvalidQuadrature("averaging node counts must be at least 2"));
        }
        Ok(())
    }

    fn coarse_order(&self) -> usize {
        self.order / 2
    }
}

/// How a fidelity was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    ClosedForm(FormulaVariant),
    Quadrature,
    MonteCarlo,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::ClosedForm(_) => "closed",
            Method::Quadrature => "quad",
            Method::MonteCarlo => "mc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// The error estimate exceeded [`CONVERGENCE_THRESHOLD`].
    Unconverged,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Unconverged => "unconverged",
        }
    }
}

/// Which input(s) a fidelity refers to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputPoint {
    Fixed { p: f64, phi: f64 },
    Averaged,
}

/// Input-averaging strategy for [`fidelity_average`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Averaging {
    /// Exact `(p, φ)` moments of the coefficient monomials.
    AnalyticMoments,
    /// Gauss–Legendre in `p` times the uniform periodic rule in `φ`.
    NumericGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FidelityResult {
    /// Reported fidelity, clamped to `[0, 1]`.
    pub value: f64,
    /// Value before clamping.
    pub raw_value: f64,
    pub method: Method,
    /// Quadrature: `|F(order) − F(order/2)|`. Monte Carlo: standard error.
    pub error_estimate: f64,
    pub status: Status,
    pub family: Option<Family>,
    pub alpha: Option<f64>,
    pub delta: f64,
    pub inputs: InputPoint,
}

impl FidelityResult {
    /// Applies the reporting-range policy: values more than
    /// `max(10·error, RANGE_FLOOR)` outside `[0, 1]` are errors, the rest are clamped.
    pub fn new(raw: f64, method: Method, error_estimate: f64, delta: f64, inputs: InputPoint) -> Result<Self> {
        let tolerance = (10.0 * error_estimate).max(RANGE_FLOOR);
        if !raw.is_finite() || raw < -tolerance || raw > 1.0 + tolerance {
            return Err(Error::OutOfRange { value: raw, tolerance });
        }
        let status = if method != Method::MonteCarlo && error_estimate > CONVERGENCE_THRESHOLD { Status::Unconverged } else { Status::Ok };
        Ok(FidelityResult {
            value: raw.clamp(0.0, 1.0),
            raw_value: raw,
            method,
            error_estimate,
            status,
            family: None,
            alpha: None,
            delta,
            inputs,
        })
    }

    pub fn with_family(mut self, family: Family, alpha: f64) -> Self {
        self.family = Some(family);
        self.alpha = family.uses_alpha().then_some(alpha);
        self
    }
}

/// Scaled tensor Gauss–Hermite grid over the complex plane with the kernel
/// and the `1/π` measure folded into the weights.
struct PhaseGrid {
    points: Vec<PhasePoint>,
    weights: Vec<f64>,
}

impl PhaseGrid {
    fn new(order: usize, kernel: &NoiseKernel) -> Result<Self> {
        let rule = GaussHermite::new(order)?;
        let scale_sqr = 1.0 + 0.5 * kernel.delta();
        let scale = scale_sqr.sqrt();
        // wᵢ e^{xᵢ²}: the Gaussian the rule assumes is already in the integrand
        let unweighted: Vec<f64> = rule.nodes().iter().zip(rule.weights()).map(|(&x, &w)| w * (x * x).exp()).collect();
        let mut points = Vec::with_capacity(order * order);
        let mut weights = Vec::with_capacity(order * order);
        for (&x, &wx) in rule.nodes().iter().zip(&unweighted) {
            for (&y, &wy) in rule.nodes().iter().zip(&unweighted) {
                let z = PhasePoint::new(x / scale, y / scale);
                points.push(z);
                weights.push(wx * wy * kernel.factor(z.norm_sqr()) / (PI * scale_sqr));
            }
        }
        Ok(PhaseGrid { points, weights })
    }

    fn element_table(&self, bra: &ElementaryKet, ket: &ElementaryKet, negate: bool) -> Vec<Complex64> {
        self.points.iter().map(|&z| qubit::displacement_element(bra, ket, if negate { -z } else { z })).collect()
    }

    fn integrate(&self, left: &[Complex64], right: &[Complex64]) -> Complex64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for ((w, a), b) in self.weights.iter().zip(left).zip(right) {
            sum += a * b * *w;
        }
        sum
    }
}

/// `∫ d²z/π exp(−(Δ/2)|z|²) ⟨bra_l|D(z)|ket_l⟩ ⟨bra_r|D(−z)|ket_r⟩`.
pub fn mode_overlap_integral(
    left: (&ElementaryKet, &ElementaryKet),
    right: (&ElementaryKet, &ElementaryKet),
    kernel: &NoiseKernel,
    quad: &QuadratureConfig,
) -> Result<Complex64> {
    let grid = PhaseGrid::new(quad.order, kernel)?;
    let a = grid.element_table(left.0, left.1, false);
    let b = grid.element_table(right.0, right.1, true);
    Ok(grid.integrate(&a, &b))
}

/// Products of mode integrals for every term 4-tuple `(k, l, m, n)`.
struct FidelityTensor {
    terms: usize,
    values: Vec<Complex64>,
}

impl FidelityTensor {
    fn build(terms: &[Term], modes: usize, kernel: &NoiseKernel, order: usize) -> Result<Self> {
        let grid = PhaseGrid::new(order, kernel)?;
        let t = terms.len();
        let mut values = alloc::vec![Complex64::new(1.0, 0.0); t * t * t * t];
        for mode in 0..modes {
            // forward[l*t + k] = ⟨l|D(z)|k⟩, backward[n*t + m] = ⟨n|D(−z)|m⟩
            let mut forward = Vec::with_capacity(t * t);
            let mut backward = Vec::with_capacity(t * t);
            for bra in terms {
                for ket in terms {
                    forward.push(grid.element_table(bra.ket(mode), ket.ket(mode), false));
                    backward.push(grid.element_table(bra.ket(mode), ket.ket(mode), true));
                }
            }
            for k in 0..t {
                for l in 0..t {
                    for m in 0..t {
                        for n in 0..t {
                            let integral = grid.integrate(&forward[l * t + k], &backward[n * t + m]);
                            values[((k * t + l) * t + m) * t + n] *= integral;
                        }
                    }
                }
            }
        }
        Ok(FidelityTensor { terms: t, values })
    }

    fn at(&self, k: usize, l: usize, m: usize, n: usize) -> Complex64 {
        let t = self.terms;
        self.values[((k * t + l) * t + m) * t + n]
    }

    fn contract(&self, coeffs: &[Complex64]) -> Complex64 {
        let t = self.terms;
        let mut sum = Complex64::new(0.0, 0.0);
        for k in 0..t {
            for l in 0..t {
                let kl = coeffs[k] * coeffs[l].conj();
                for m in 0..t {
                    for n in 0..t {
                        sum += kl * coeffs[m] * coeffs[n].conj() * self.at(k, l, m, n);
                    }
                }
            }
        }
        sum
    }
}

fn check_normalized(state: &TermDecomposition) -> Result<()> {
    let norm = state.self_overlap();
    if (norm - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(norm));
    }
    Ok(())
}

/// Raw quadrature value of the fixed-input fidelity at one Gauss–Hermite order.
pub fn fidelity_fixed_at_order(state: &TermDecomposition, kernel: &NoiseKernel, order: usize) -> Result<f64> {
    let coeffs: Vec<Complex64> = state.terms().iter().map(|t| t.coeff).collect();
    let tensor = FidelityTensor::build(state.terms(), state.modes(), kernel, order)?;
    Ok(tensor.contract(&coeffs).re)
}

/// Fidelity of teleporting one pure input state.
pub fn fidelity_fixed(state: &TermDecomposition, kernel: &NoiseKernel, quad: &QuadratureConfig) -> Result<FidelityResult> {
    quad.validate()?;
    check_normalized(state)?;
    let fine = fidelity_fixed_at_order(state, kernel, quad.order)?;
    let coarse = fidelity_fixed_at_order(state, kernel, quad.coarse_order())?;
    let inputs = match state.origin() {
        Some(spec) => InputPoint::Fixed { p: spec.p, phi: spec.phi },
        None => InputPoint::Averaged,
    };
    let result = FidelityResult::new(fine, Method::Quadrature, (fine - coarse).abs(), kernel.delta(), inputs)?;
    Ok(match state.origin() {
        Some(spec) => result.with_family(spec.family, spec.alpha),
        None => result,
    })
}

/// Average-fidelity contributions grouped by which logical branches the
/// four coefficients come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchContributions {
    /// All four from `|0_L⟩` (weight `E[p²] = 1/3`).
    pub zero: f64,
    /// All four from `|1_L⟩` (weight `E[(1−p)²] = 1/3`).
    pub one: f64,
    /// Two from each (weight `E[p(1−p)] = 1/6`, phases balanced).
    pub mixed: f64,
}

impl BranchContributions {
    pub fn total(&self) -> f64 {
        self.zero + self.one + self.mixed
    }
}

/// `E[w_a w_b* w_c w_d*]` for `w₀ = √p`, `w₁ = √(1−p) e^{iφ}`, `p ~ U[0,1]`, `φ ~ U[0,2π)`.
fn branch_moment(branches: [Branch; 4]) -> f64 {
    let ones = |b: Branch| i32::from(b == Branch::One);
    let winding = ones(branches[0]) - ones(branches[1]) + ones(branches[2]) - ones(branches[3]);
    if winding != 0 {
        return 0.0;
    }
    // p^{j/2} (1−p)^{(4−j)/2} with j even; E = Beta(j/2 + 1, (4−j)/2 + 1)
    let zeros = branches.iter().filter(|&&b| b == Branch::Zero).count();
    match zeros {
        4 | 0 => 1.0 / 3.0,
        2 => 1.0 / 6.0,
        _ => unreachable!("balanced winding implies an even count"),
    }
}

fn contributions_from(tensor: &FidelityTensor, terms: &[Term]) -> BranchContributions {
    let t = terms.len();
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for k in 0..t {
        for l in 0..t {
            for m in 0..t {
                for n in 0..t {
                    let branches = [terms[k].branch, terms[l].branch, terms[m].branch, terms[n].branch];
                    let moment = branch_moment(branches);
                    if moment == 0.0 {
                        continue;
                    }
                    let coeff = terms[k].coeff * terms[l].coeff.conj() * terms[m].coeff * terms[n].coeff.conj();
                    let slot = match branches.iter().filter(|&&b| b == Branch::Zero).count() {
                        4 => 0,
                        0 => 1,
                        _ => 2,
                    };
                    out[slot] += coeff * tensor.at(k, l, m, n) * moment;
                }
            }
        }
    }
    BranchContributions { zero: out[0].re, one: out[1].re, mixed: out[2].re }
}

fn require_moments(encoding: &LogicalEncoding) -> Result<()> {
    if encoding.logical_overlap() > 1e-12 {
        return Err(Error::MomentsUnsupported(encoding.family()));
    }
    Ok(())
}

/// Branch-grouped average fidelity at one Gauss–Hermite order.
pub fn branch_contributions(encoding: &LogicalEncoding, kernel: &NoiseKernel, order: usize) -> Result<BranchContributions> {
    require_moments(encoding)?;
    let tensor = FidelityTensor::build(encoding.terms(), encoding.modes(), kernel, order)?;
    Ok(contributions_from(&tensor, encoding.terms()))
}

fn grid_average(tensor: &FidelityTensor, encoding: &LogicalEncoding, quad: &QuadratureConfig) -> Result<f64> {
    let p_rule = GaussLegendre::on_interval(quad.p_nodes, 0.0, 1.0)?;
    let phi_weight = 1.0 / quad.phi_nodes as f64;
    let mut sum = 0.0;
    for (&p, &wp) in p_rule.nodes().iter().zip(p_rule.weights()) {
        for j in 0..quad.phi_nodes {
            let phi = 2.0 * PI * j as f64 * phi_weight;
            let coeffs = encoding.coefficients(p, phi)?;
            sum += wp * phi_weight * tensor.contract(&coeffs).re;
        }
    }
    Ok(sum)
}

fn average_at_order(
    encoding: &LogicalEncoding,
    kernel: &NoiseKernel,
    quad: &QuadratureConfig,
    order: usize,
    averaging: Averaging,
) -> Result<f64> {
    let tensor = FidelityTensor::build(encoding.terms(), encoding.modes(), kernel, order)?;
    match averaging {
        Averaging::AnalyticMoments => Ok(contributions_from(&tensor, encoding.terms()).total()),
        Averaging::NumericGrid => grid_average(&tensor, encoding, quad),
    }
}

/// Average fidelity over all inputs of an encoding.
pub fn average_encoding(
    encoding: &LogicalEncoding,
    kernel: &NoiseKernel,
    quad: &QuadratureConfig,
    averaging: Averaging,
) -> Result<FidelityResult> {
    quad.validate()?;
    if averaging == Averaging::AnalyticMoments {
        require_moments(encoding)?;
    }
    let fine = average_at_order(encoding, kernel, quad, quad.order, averaging)?;
    let coarse = average_at_order(encoding, kernel, quad, quad.coarse_order(), averaging)?;
    Ok(FidelityResult::new(fine, Method::Quadrature, (fine - coarse).abs(), kernel.delta(), InputPoint::Averaged)?
        .with_family(encoding.family(), encoding.alpha()))
}

/// Average fidelity `(1/2π) ∫dp ∫dφ F(p, φ)` for a family at amplitude `alpha`.
pub fn fidelity_average(
    family: Family,
    alpha: f64,
    kernel: &NoiseKernel,
    quad: &QuadratureConfig,
    averaging: Averaging,
) -> Result<FidelityResult> {
    let encoding = qubit::encoding(family, alpha)?;
    average_encoding(&encoding, kernel, quad, averaging)
}

/// Importance-sampled estimate of the full fidelity integral.
///
/// Each `zᵢ` is drawn from the density `∝ exp(−(1 + Δ/2)|zᵢ|²)` and the
/// integrand `χ(Z) χ(−Z) Π K(zᵢ)` is evaluated directly through
/// [`qubit::chi_in`], with no use of the factorized mode integrals.
pub fn fidelity_monte_carlo(state: &TermDecomposition, kernel: &NoiseKernel, samples: usize, seed: u64) -> Result<FidelityResult> {
    if samples < MIN_MC_SAMPLES {
        return Err(Error::TooFewSamples { min: MIN_MC_SAMPLES, got: samples });
    }
    check_normalized(state)?;
    let scale_sqr = 1.0 + 0.5 * kernel.delta();
    let normal = Normal::new(0.0, (0.5 / scale_sqr).sqrt()).expect("positive variance");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let two_mode = state.modes() == 2;

    let mut mean = 0.0;
    let mut m2 = 0.0;
    for i in 0..samples {
        let z1 = PhasePoint::new(normal.sample(&mut rng), normal.sample(&mut rng));
        let z2 = two_mode.then(|| PhasePoint::new(normal.sample(&mut rng), normal.sample(&mut rng)));
        let forward = qubit::chi_in(state, z1, z2)?;
        let backward = qubit::chi_in(state, -z1, z2.map(|z| -z))?;
        let mut ratio = (forward * backward).re;
        for z in core::iter::once(z1).chain(z2) {
            let r2 = z.norm_sqr();
            ratio *= kernel.factor(r2) * (scale_sqr * r2).exp() / scale_sqr;
        }
        let delta = ratio - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (ratio - mean);
    }
    let variance = m2 / (samples - 1) as f64;
    let stderr = (variance / samples as f64).sqrt();
    let inputs = match state.origin() {
        Some(spec) => InputPoint::Fixed { p: spec.p, phi: spec.phi },
        None => InputPoint::Averaged,
    };
    let result = FidelityResult::new(mean, Method::MonteCarlo, stderr, kernel.delta(), inputs)?;
    Ok(match state.origin() {
        Some(spec) => result.with_family(spec.family, spec.alpha),
        None => result,
    })
}
