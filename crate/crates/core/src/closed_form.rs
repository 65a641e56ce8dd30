//! Closed-form average fidelities.
//!
//! Two of the expressions exist in a `Printed` form, kept verbatim, and a
//! `Corrected` form that agrees with the quadrature in [`crate::engine`].
//! Neither is substituted for the other silently: callers pick a
//! [`FormulaVariant`] and the method tag of every result records it.

use core::fmt;
use core::str::FromStr;

// unused whenever another crate in the graph links std
#[allow(unused_imports)]
use num_traits::Float;

use crate::channel::NoiseKernel;
use crate::qubit::Family;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FormulaVariant {
    Printed,
    Corrected,
}

impl FormulaVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            FormulaVariant::Printed => "printed",
            FormulaVariant::Corrected => "corrected",
        }
    }
}

impl fmt::Display for FormulaVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for FormulaVariant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "printed" => Ok(FormulaVariant::Printed),
            "corrected" => Ok(FormulaVariant::Corrected),
            _ => Err(UnknownVariant),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UnknownVariant;

impl fmt::Display for UnknownVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("expected `printed` or `corrected`")
    }
}

impl core::error::Error for UnknownVariant {}

/// What the corrected variant changes for `family`, and the check that forces it.
/// `None` when the printed expression needs no correction.
pub fn correction_note(family: Family) -> Option<&'static str> {
    match family {
        Family::Spq | Family::SingleRail => None,
        Family::HqA => Some("exponent f = 8α²/(2+Δ) instead of 8α²/(2+Δ)⁴; forced by F(Δ=0) = 1"),
        Family::HqB => Some("odd-cat group scaled by (4+Δ²)/(2+Δ)², the single-photon mode factor; forced by the quadrature oracle"),
        Family::CoherentQubit => {
            Some("1/π prefactor dropped and e^{-α²} cross term replaced by e^{-2α²}; forced by F(p=1, Δ=0) = 1 and the quadrature oracle")
        }
    }
}

/// Dual-rail single-photon qubit: `4[(1−2β)² + 4β²]/(2+Δ)²`.
pub fn avg_fidelity_spq(kernel: &NoiseKernel) -> f64 {
    let beta = kernel.beta();
    let s = 2.0 + kernel.delta();
    4.0 * ((1.0 - 2.0 * beta).powi(2) + 4.0 * beta * beta) / (s * s)
}

/// Single-mode single-photon qubit `√p|0⟩ + √(1−p)e^{iφ}|1⟩`.
pub fn avg_fidelity_singlerail(kernel: &NoiseKernel) -> f64 {
    let d = kernel.delta();
    let s = 2.0 + d;
    2.0 / (3.0 * s) * (2.0 + (4.0 + d * d) / (s * s))
}

/// Hybrid qubit with a photonic rail and coherent states `|±α⟩`.
pub fn avg_fidelity_hqa(kernel: &NoiseKernel, alpha: f64, variant: FormulaVariant) -> Result<f64> {
    check_amplitude(alpha)?;
    let d = kernel.delta();
    let s = 2.0 + d;
    let f = match variant {
        FormulaVariant::Printed => 8.0 * alpha * alpha / s.powi(4),
        FormulaVariant::Corrected => 8.0 * alpha * alpha / s,
    };
    let bracket = d * (-f).exp() + 2.0 * (f - 4.0 * alpha * alpha).exp();
    Ok(4.0 / (3.0 * s.powi(4)) * (s * s + (4.0 + d * d) + s * bracket))
}

/// The three groups of the hybrid type-B average, before the `8/(3(2+Δ)²)` prefactor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HqbGroups {
    /// Terms carrying `1/N₊²`.
    pub even: f64,
    /// Terms carrying `1/N₋²`.
    pub odd: f64,
    /// Terms carrying `1/(N₊N₋)`.
    pub cross: f64,
    pub prefactor: f64,
}

impl HqbGroups {
    pub fn total(&self) -> f64 {
        self.prefactor * (self.even + self.odd + self.cross)
    }
}

/// Group decomposition of the hybrid type-B average with `N± = 2(1 ± e^{−2α²})`.
///
/// With `u = e^{−2α²}` and `k = 2α²(2−Δ)/(2+Δ)` the exponentials
/// `e^{−8α²/(2+Δ)}` and `e^{−4Δα²/(2+Δ)}` are `u e^{∓k}`, which lets every
/// group be written without cancellation as `α → 0`.
pub fn hqb_groups(kernel: &NoiseKernel, alpha: f64, variant: FormulaVariant) -> Result<HqbGroups> {
    check_amplitude(alpha)?;
    if alpha == 0.0 {
        return Err(Error::InvalidAmplitude(alpha));
    }
    let d = kernel.delta();
    let s = 2.0 + d;
    let a2 = alpha * alpha;
    let u = (-2.0 * a2).exp();
    let one_minus_u = -(-2.0 * a2).exp_m1();
    let k = 2.0 * a2 * (2.0 - d) / s;
    let x = 1.0 + u * u + 2.0 * u * k.cosh();

    let even = (x + 4.0 * u) / (4.0 * (1.0 + u).powi(2));
    let half_sinh = (0.5 * k).sinh();
    let mut odd = 0.25 + u * half_sinh * half_sinh / (one_minus_u * one_minus_u);
    if variant == FormulaVariant::Corrected {
        odd *= (4.0 + d * d) / (s * s);
    }
    let cross = 0.25 + u * k.sinh() * (2.0 - d) / (s * 2.0 * (1.0 + u) * one_minus_u);
    Ok(HqbGroups { even, odd, cross, prefactor: 8.0 / (3.0 * s * s) })
}

/// Hybrid qubit with a photonic rail and even/odd cat states.
pub fn avg_fidelity_hqb(kernel: &NoiseKernel, alpha: f64, variant: FormulaVariant) -> Result<f64> {
    Ok(hqb_groups(kernel, alpha, variant)?.total())
}

/// Fidelity for the coherent-state qubit `(√p|α⟩ + √(1−p)e^{iφ}|−α⟩)/√N`
/// with `N = 1 + 2√(p(1−p)) e^{−2α²} cos φ`.
///
/// The printed variant carries a `1/π` prefactor and an `e^{−α²}` cross
/// term. The corrected variant is the exact fixed-input fidelity. Neither is
/// an input average; see [`crate::engine::fidelity_average`] for that.
pub fn fidelity_coherent_qubit(kernel: &NoiseKernel, alpha: f64, p: f64, phi: f64, variant: FormulaVariant) -> Result<f64> {
    check_amplitude(alpha)?;
    if alpha == 0.0 {
        return Err(Error::InvalidAmplitude(alpha));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidWeight(p));
    }
    if !phi.is_finite() {
        return Err(Error::InvalidPhase(phi));
    }
    let d = kernel.delta();
    let s = 2.0 + d;
    let a2 = alpha * alpha;
    let q = p * (1.0 - p);
    let n = 1.0 + 2.0 * q.sqrt() * (-2.0 * a2).exp() * phi.cos();
    let (pi, cross_exp) = match variant {
        FormulaVariant::Printed => (core::f64::consts::PI, -a2),
        FormulaVariant::Corrected => (1.0, -2.0 * a2),
    };
    let bracket = p * p
        + (1.0 - p) * (1.0 - p)
        + 4.0 * q.sqrt() * cross_exp.exp() * phi.cos()
        + 2.0 * q * ((-8.0 * a2 / s).exp() + (-4.0 * a2).exp() * (2.0 * phi).cos() + (-4.0 * d * a2 / s).exp());
    Ok(2.0 / (pi * n * n * s) * bracket)
}

/// Closed-form average for the families that have one.
pub fn avg_fidelity(family: Family, kernel: &NoiseKernel, alpha: f64, variant: FormulaVariant) -> Option<Result<f64>> {
    match family {
        Family::Spq => Some(Ok(avg_fidelity_spq(kernel))),
        Family::SingleRail => Some(Ok(avg_fidelity_singlerail(kernel))),
        Family::HqA => Some(avg_fidelity_hqa(kernel, alpha, variant)),
        Family::HqB => Some(avg_fidelity_hqb(kernel, alpha, variant)),
        Family::CoherentQubit => None,
    }
}

fn check_amplitude(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAmplitude(alpha))
    }
}
