//! Input qubits as short sums of product kets, and their characteristic
//! functions `χ(z₁, z₂) = Tr[ρ D(z₁) ⊗ D(z₂)]`.
//!
//! Five encodings are supported:
//!
//! | family       | `|0_L⟩`          | `|1_L⟩`           |
//! |--------------|------------------|-------------------|
//! | `spq`        | `|0,1⟩`          | `|1,0⟩`           |
//! | `hqA`        | `|0,α⟩`          | `|1,−α⟩`          |
//! | `hqB`        | `|0⟩⊗cat₊(α)`    | `|1⟩⊗cat₋(α)`     |
//! | `singlerail` | `|0⟩`            | `|1⟩`             |
//! | `coherent`   | `|α⟩`            | `|−α⟩`            |
//!
//! and a qubit is `√p|0_L⟩ + √(1−p) e^{iφ}|1_L⟩`, normalized.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_complex::Complex64;
// unused whenever another crate in the graph links std
#[allow(unused_imports)]
use num_traits::Float;

use crate::special::{self, cat_norm_sqr, Parity, PhasePoint};
use crate::{Error, Result};

/// Qubit encoding family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// Dual-rail single photon.
    Spq,
    /// Single photon entangled with coherent states `|±α⟩`.
    HqA,
    /// Single photon entangled with even/odd cat states.
    HqB,
    /// Single-mode vacuum/one-photon superposition.
    SingleRail,
    /// Superposition of `|α⟩` and `|−α⟩`.
    CoherentQubit,
}

impl Family {
    pub const ALL: [Family; 5] = [Family::Spq, Family::HqA, Family::HqB, Family::SingleRail, Family::CoherentQubit];

    /// Number of optical modes carrying the qubit.
    pub fn modes(self) -> usize {
        match self {
            Family::Spq | Family::HqA | Family::HqB => 2,
            Family::SingleRail | Family::CoherentQubit => 1,
        }
    }

    /// Whether the coherent amplitude `α` enters the encoding.
    pub fn uses_alpha(self) -> bool {
        matches!(self, Family::HqA | Family::HqB | Family::CoherentQubit)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Family::Spq => "spq",
            Family::HqA => "hqA",
            Family::HqB => "hqB",
            Family::SingleRail => "singlerail",
            Family::CoherentQubit => "coherent",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Error returned when a family name is not recognized.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownFamily;

impl fmt::Display for UnknownFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("unknown qubit family (expected spq, hqA, hqB, singlerail or coherent)")
    }
}

impl core::error::Error for UnknownFamily {}

impl FromStr for Family {
    type Err = UnknownFamily;

    fn from_str(s: &str) -> core::result::Result<Self, Self::Err> {
        match s {
            "spq" => Ok(Family::Spq),
            "hqA" | "hqa" => Ok(Family::HqA),
            "hqB" | "hqb" => Ok(Family::HqB),
            "singlerail" | "single-rail" => Ok(Family::SingleRail),
            "coherent" | "coherent-qubit" => Ok(Family::CoherentQubit),
            _ => Err(UnknownFamily),
        }
    }
}

/// A concrete input qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    pub family: Family,
    /// Real coherent amplitude, ignored by `spq` and `singlerail`.
    pub alpha: f64,
    /// Weight of `|0_L⟩`.
    pub p: f64,
    /// Relative phase of `|1_L⟩`.
    pub phi: f64,
}

impl QubitSpec {
    pub fn new(family: Family, alpha: f64, p: f64, phi: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidWeight(p));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidPhase(phi));
        }
        Ok(QubitSpec { family, alpha, p, phi })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && alpha >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAmplitude(alpha))
    }
}

/// A single-mode ket appearing in a product term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ElementaryKet {
    Fock(u8),
    Coherent(Complex64),
    /// Normalized cat `(|α⟩ ± |−α⟩)/√(2(1 ± e^{−2α²}))` with real `α`.
    Cat {
        alpha: f64,
        parity: Parity,
    },
}

impl ElementaryKet {
    /// Coherent-state expansion of a cat; other kets map to themselves.
    fn coherent_expansion(&self) -> Option<[(f64, ElementaryKet); 2]> {
        match *self {
            ElementaryKet::Cat { alpha, parity } => {
                let n = cat_norm_sqr(alpha, parity).sqrt();
                let a = Complex64::new(alpha, 0.0);
                Some([(1.0 / n, ElementaryKet::Coherent(a)), (parity.sign() / n, ElementaryKet::Coherent(-a))])
            }
            _ => None,
        }
    }
}

/// `⟨bra|D(z)|ket⟩` for any pair of elementary kets.
pub fn displacement_element(bra: &ElementaryKet, ket: &ElementaryKet, z: PhasePoint) -> Complex64 {
    use ElementaryKet::*;
    match (bra, ket) {
        (Fock(m), Fock(n)) => special::disp_elem_fock(*m as usize, *n as usize, z),
        (Coherent(b), Coherent(g)) => special::disp_elem_coherent(*b, *g, z),
        (Fock(m), Coherent(g)) => special::disp_elem_fock_coherent(*m as usize, *g, z),
        (Coherent(b), Fock(n)) => special::disp_elem_coherent_fock(*b, *n as usize, z),
        (Cat { alpha: a, parity: pb }, Cat { alpha: b, parity: pk }) if a == b => special::disp_elem_cat(*a, *pb, *pk, z),
        _ => {
            if let Some(parts) = bra.coherent_expansion() {
                parts.iter().map(|(w, b)| displacement_element(b, ket, z) * *w).sum()
            } else {
                let parts = ket.coherent_expansion().expect("one side is a cat");
                parts.iter().map(|(w, k)| displacement_element(bra, k, z) * *w).sum()
            }
        }
    }
}

/// `⟨a|b⟩`.
pub fn overlap(a: &ElementaryKet, b: &ElementaryKet) -> Complex64 {
    displacement_element(a, b, PhasePoint::ORIGIN)
}

/// Logical branch a term belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    Zero,
    One,
}

/// One product term `coeff · |mode1⟩ ⊗ |mode2⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Term {
    pub coeff: Complex64,
    pub mode1: ElementaryKet,
    pub mode2: Option<ElementaryKet>,
    pub branch: Branch,
}

impl Term {
    /// Ket of mode `index` (0 or 1).
    pub fn ket(&self, index: usize) -> &ElementaryKet {
        match index {
            0 => &self.mode1,
            _ => self.mode2.as_ref().expect("two-mode term"),
        }
    }

    fn modes(&self) -> usize {
        if self.mode2.is_some() {
            2
        } else {
            1
        }
    }

    fn product_overlap(&self, other: &Term) -> Complex64 {
        let mut v = overlap(&self.mode1, &other.mode1);
        if let (Some(a), Some(b)) = (&self.mode2, &other.mode2) {
            v *= overlap(a, b);
        }
        v
    }
}

/// A pure state written as a weighted sum of product kets.
#[derive(Debug, Clone, PartialEq)]
pub struct TermDecomposition {
    terms: Vec<Term>,
    modes: usize,
    normalization: f64,
    origin: Option<QubitSpec>,
}

impl TermDecomposition {
    /// Wraps terms as given; all terms must have the same mode count.
    pub fn from_terms(terms: Vec<Term>) -> Self {
        let modes = terms.first().map_or(1, Term::modes);
        assert!(terms.iter().all(|t| t.modes() == modes), "terms disagree on mode count");
        TermDecomposition { terms, modes, normalization: 1.0, origin: None }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    /// The scalar `N` the raw superposition was divided by.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    /// The qubit this decomposition was built from, if any.
    pub fn origin(&self) -> Option<&QubitSpec> {
        self.origin.as_ref()
    }

    /// `⟨ψ|ψ⟩` from pairwise elementary overlaps.
    pub fn self_overlap(&self) -> f64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for a in &self.terms {
            for b in &self.terms {
                sum += a.coeff.conj() * b.coeff * a.product_overlap(b);
            }
        }
        sum.re
    }

    /// Rescales to unit norm.
    pub fn normalized(mut self) -> Result<Self> {
        let norm_sqr = self.self_overlap();
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let n = norm_sqr.sqrt();
        for t in &mut self.terms {
            t.coeff /= n;
        }
        self.normalization *= n;
        Ok(self)
    }

    /// Replaces every cat ket by its two coherent components.
    pub fn expand_cats(&self) -> TermDecomposition {
        let mut out = Vec::new();
        for t in &self.terms {
            let first: Vec<(f64, ElementaryKet)> = match t.mode1.coherent_expansion() {
                Some(parts) => parts.to_vec(),
                None => alloc::vec![(1.0, t.mode1)],
            };
            let second: Vec<(f64, Option<ElementaryKet>)> = match t.mode2.as_ref().and_then(ElementaryKet::coherent_expansion) {
                Some(parts) => parts.iter().map(|&(w, k)| (w, Some(k))).collect(),
                None => alloc::vec![(1.0, t.mode2)],
            };
            for &(w1, k1) in &first {
                for &(w2, k2) in &second {
                    out.push(Term { coeff: t.coeff * (w1 * w2), mode1: k1, mode2: k2, branch: t.branch });
                }
            }
        }
        TermDecomposition { terms: out, ..self.clone() }
    }

    /// Characteristic function; `z2` must be present iff the state has two modes.
    pub fn chi(&self, z1: PhasePoint, z2: Option<PhasePoint>) -> Result<Complex64> {
        chi_in(self, z1, z2)
    }
}

/// `Σ_{k,l} c_k c_l* Π_modes ⟨l|D(z)|k⟩`.
pub fn chi_in(state: &TermDecomposition, z1: PhasePoint, z2: Option<PhasePoint>) -> Result<Complex64> {
    let got = 1 + usize::from(z2.is_some());
    if got != state.modes {
        return Err(Error::ModeMismatch { expected: state.modes, got });
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for k in &state.terms {
        for l in &state.terms {
            let mut v = k.coeff * l.coeff.conj() * displacement_element(&l.mode1, &k.mode1, z1);
            if let (Some(z2), Some(bra), Some(ket)) = (z2, &l.mode2, &k.mode2) {
                v *= displacement_element(bra, ket, z2);
            }
            sum += v;
        }
    }
    Ok(sum)
}

/// The two logical states of an encoding, before `(p, φ)` are chosen.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalEncoding {
    family: Family,
    alpha: f64,
    terms: Vec<Term>,
}

impl LogicalEncoding {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Terms of both logical states, tagged by branch, each state unit-norm.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn modes(&self) -> usize {
        self.family.modes()
    }

    /// `|⟨0_L|1_L⟩|`; zero when `p` and `φ` do not affect the normalization.
    pub fn logical_overlap(&self) -> f64 {
        let mut sum = Complex64::new(0.0, 0.0);
        for a in self.terms.iter().filter(|t| t.branch == Branch::Zero) {
            for b in self.terms.iter().filter(|t| t.branch == Branch::One) {
                sum += a.coeff.conj() * b.coeff * a.product_overlap(b);
            }
        }
        sum.norm()
    }

    /// Branch weights `(√p, √(1−p) e^{iφ})`.
    pub fn branch_weights(p: f64, phi: f64) -> [Complex64; 2] {
        [Complex64::new(p.sqrt(), 0.0), Complex64::from_polar((1.0 - p).sqrt(), phi)]
    }

    /// Coefficients of [`terms`](Self::terms) for the qubit `(p, φ)`, normalized.
    pub fn coefficients(&self, p: f64, phi: f64) -> Result<Vec<Complex64>> {
        let w = Self::branch_weights(p, phi);
        let raw: Vec<Complex64> = self.terms.iter().map(|t| t.coeff * if t.branch == Branch::Zero { w[0] } else { w[1] }).collect();
        let mut norm_sqr = Complex64::new(0.0, 0.0);
        for (a, ca) in self.terms.iter().zip(&raw) {
            for (b, cb) in self.terms.iter().zip(&raw) {
                norm_sqr += ca.conj() * cb * a.product_overlap(b);
            }
        }
        let norm_sqr = norm_sqr.re;
        if !(norm_sqr.is_finite() && norm_sqr > 0.0) {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let n = norm_sqr.sqrt();
        Ok(raw.into_iter().map(|c| c / n).collect())
    }

    /// `√p|0_L⟩ + √(1−p) e^{iφ}|1_L⟩`, normalized; zero-weight terms dropped.
    pub fn superpose(&self, p: f64, phi: f64) -> Result<TermDecomposition> {
        let spec = QubitSpec::new(self.family, self.alpha, p, phi)?;
        let w = Self::branch_weights(p, phi);
        let terms: Vec<Term> = self
            .terms
            .iter()
            .filter(|t| if t.branch == Branch::Zero { p > 0.0 } else { p < 1.0 })
            .map(|t| Term { coeff: t.coeff * if t.branch == Branch::Zero { w[0] } else { w[1] }, ..*t })
            .collect();
        let mut state = TermDecomposition::from_terms(terms).normalized()?;
        state.origin = Some(spec);
        Ok(state)
    }
}

/// Logical basis of a family at amplitude `alpha`.
pub fn encoding(family: Family, alpha: f64) -> Result<LogicalEncoding> {
    check_alpha(alpha)?;
    let one = Complex64::new(1.0, 0.0);
    let a = Complex64::new(alpha, 0.0);
    let term = |mode1, mode2, branch| Term { coeff: one, mode1, mode2, branch };
    use ElementaryKet::{Cat, Coherent, Fock};
    let terms = match family {
        Family::Spq => alloc::vec![term(Fock(0), Some(Fock(1)), Branch::Zero), term(Fock(1), Some(Fock(0)), Branch::One),],
        Family::HqA => alloc::vec![term(Fock(0), Some(Coherent(a)), Branch::Zero), term(Fock(1), Some(Coherent(-a)), Branch::One),],
        Family::HqB => {
            if alpha == 0.0 {
                return Err(Error::OddCatAtZero);
            }
            alloc::vec![
                term(Fock(0), Some(Cat { alpha, parity: Parity::Even }), Branch::Zero),
                term(Fock(1), Some(Cat { alpha, parity: Parity::Odd }), Branch::One),
            ]
        }
        Family::SingleRail => alloc::vec![term(Fock(0), None, Branch::Zero), term(Fock(1), None, Branch::One)],
        Family::CoherentQubit => alloc::vec![term(Coherent(a), None, Branch::Zero), term(Coherent(-a), None, Branch::One)],
    };
    Ok(LogicalEncoding { family, alpha, terms })
}

/// Builds the normalized input state for `spec`.
pub fn make_qubit(spec: &QubitSpec) -> Result<TermDecomposition> {
    let spec = QubitSpec::new(spec.family, spec.alpha, spec.p, spec.phi)?;
    encoding(spec.family, spec.alpha)?.superpose(spec.p, spec.phi)
}

/// Coherent components of the unit-norm cat `(|α⟩ ± |−α⟩)/√(2(1 ± e^{−2α²}))`.
pub fn cat_state_terms(alpha: f64, parity: Parity) -> Result<[(Complex64, ElementaryKet); 2]> {
    check_alpha(alpha)?;
    if parity == Parity::Odd && alpha == 0.0 {
        return Err(Error::OddCatAtZero);
    }
    let cat = ElementaryKet::Cat { alpha, parity };
    let parts = cat.coherent_expansion().expect("cat");
    Ok(parts.map(|(w, k)| (Complex64::new(w, 0.0), k)))
}
