//! Matrix elements of the displacement operator `D(z) = exp(z a† − z* a)`
//! in the Fock, coherent and cat-state bases.
//!
//! Every characteristic function in the crate is assembled from these.

use core::ops::Neg;

use num_complex::Complex64;
// unused whenever another crate in the graph links std
#[allow(unused_imports)]
use num_traits::Float;

/// Largest Fock index with a tabulated factorial.
pub const MAX_TABULATED: usize = 8;

const FACTORIALS: [u64; MAX_TABULATED + 1] = [1, 1, 2, 6, 24, 120, 720, 5040, 40320];

/// A phase-space displacement argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint(Complex64);

impl PhasePoint {
    pub const ORIGIN: PhasePoint = PhasePoint(Complex64::new(0.0, 0.0));

    pub fn new(re: f64, im: f64) -> Self {
        debug_assert!(re.is_finite() && im.is_finite(), "phase point must be finite");
        PhasePoint(Complex64::new(re, im))
    }

    #[inline]
    pub fn value(self) -> Complex64 {
        self.0
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.0.norm_sqr()
    }
}

impl From<Complex64> for PhasePoint {
    fn from(z: Complex64) -> Self {
        PhasePoint(z)
    }
}

impl Neg for PhasePoint {
    type Output = PhasePoint;

    fn neg(self) -> PhasePoint {
        PhasePoint(-self.0)
    }
}

/// Parity of a cat state `(|α⟩ ± |−α⟩)/norm`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    /// `+1` for even, `−1` for odd.
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Associated Laguerre polynomial `L_n^{(k)}(x)` by upward three-term recurrence.
pub fn laguerre_assoc(n: usize, k: usize, x: f64) -> f64 {
    let k = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let j = j as f64;
        let next = ((2.0 * j + 1.0 + k - x) * cur - (j + k) * prev) / (j + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

fn factorial(n: usize) -> f64 {
    match FACTORIALS.get(n) {
        Some(&f) => f as f64,
        None => ((MAX_TABULATED + 1)..=n).fold(FACTORIALS[MAX_TABULATED] as f64, |acc, k| acc * k as f64),
    }
}

/// `⟨m|D(z)|n⟩` between Fock states.
pub fn disp_elem_fock(m: usize, n: usize, z: PhasePoint) -> Complex64 {
    let z = z.value();
    let t = z.norm_sqr();
    let envelope = (-0.5 * t).exp();
    if m >= n {
        let scale = (factorial(n) / factorial(m)).sqrt() * envelope * laguerre_assoc(n, m - n, t);
        z.powu((m - n) as u32) * scale
    } else {
        let scale = (factorial(m) / factorial(n)).sqrt() * envelope * laguerre_assoc(m, n - m, t);
        (-z.conj()).powu((n - m) as u32) * scale
    }
}

/// `⟨β|D(z)|γ⟩` between coherent states.
pub fn disp_elem_coherent(beta: Complex64, gamma: Complex64, z: PhasePoint) -> Complex64 {
    let z = z.value();
    let shifted = gamma + z;
    let exponent = (z * gamma.conj() - z.conj() * gamma) * 0.5 - 0.5 * beta.norm_sqr() - 0.5 * shifted.norm_sqr() + beta.conj() * shifted;
    exponent.exp()
}

/// `⟨n|D(z)|γ⟩` between a Fock bra and a coherent ket.
pub fn disp_elem_fock_coherent(n: usize, gamma: Complex64, z: PhasePoint) -> Complex64 {
    let z = z.value();
    let shifted = gamma + z;
    let phase = (z * gamma.conj() - z.conj() * gamma) * 0.5;
    let overlap = shifted.powu(n as u32) * ((-0.5 * shifted.norm_sqr()).exp() / factorial(n).sqrt());
    phase.exp() * overlap
}

/// `⟨β|D(z)|n⟩` between a coherent bra and a Fock ket.
pub fn disp_elem_coherent_fock(beta: Complex64, n: usize, z: PhasePoint) -> Complex64 {
    disp_elem_fock_coherent(n, beta, -z).conj()
}

/// Squared norm `2(1 ± e^{−2α²})` of the unnormalized cat `|α⟩ ± |−α⟩`, real `α`.
pub fn cat_norm_sqr(alpha: f64, parity: Parity) -> f64 {
    match parity {
        Parity::Even => 2.0 * (1.0 + (-2.0 * alpha * alpha).exp()),
        Parity::Odd => -2.0 * (-2.0 * alpha * alpha).exp_m1(),
    }
}

/// `⟨cat_bra|D(z)|cat_ket⟩` for normalized cats of the same real amplitude.
///
/// Expanding into four coherent elements cancels catastrophically for the odd
/// cat when `α → 0`; the grouping below keeps full relative precision there.
pub fn disp_elem_cat(alpha: f64, bra: Parity, ket: Parity, z: PhasePoint) -> Complex64 {
    let (x, y) = (z.value().re, z.value().im);
    let envelope = (-0.5 * z.norm_sqr()).exp();
    let u = (-2.0 * alpha * alpha).exp();
    let norms = (cat_norm_sqr(alpha, bra) * cat_norm_sqr(alpha, ket)).sqrt();
    let bracket = match (bra, ket) {
        (Parity::Even, Parity::Even) => Complex64::new(2.0 * (2.0 * alpha * y).cos() + 2.0 * u * (2.0 * alpha * x).cosh(), 0.0),
        (Parity::Odd, Parity::Odd) => {
            // 2cos(2αy) − 2u·cosh(2αx), with the O(1) parts cancelled analytically
            let sy = (alpha * y).sin();
            let sx = (alpha * x).sinh();
            let re = -4.0 * sy * sy - 4.0 * u * sx * sx - 2.0 * (-2.0 * alpha * alpha).exp_m1();
            Complex64::new(re, 0.0)
        }
        (Parity::Even, Parity::Odd) => Complex64::new(-2.0 * u * (2.0 * alpha * x).sinh(), 2.0 * (2.0 * alpha * y).sin()),
        (Parity::Odd, Parity::Even) => Complex64::new(2.0 * u * (2.0 * alpha * x).sinh(), 2.0 * (2.0 * alpha * y).sin()),
    };
    bracket * (envelope / norms)
}
