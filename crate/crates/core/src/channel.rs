//! Two-mode squeezed vacuum resources, symmetric photon loss, and the
//! per-mode Gaussian noise kernel they induce on teleported states.
//!
//! Covariances use vacuum-variance-1/2 units. For the symmetric TMSV family
//! only two numbers matter: the diagonal `eta` and the correlation `c`.

// unused whenever another crate in the graph links std
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// How many TMSVs (and hence teleported modes) the protocol uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    /// One TMSV teleporting a single-mode input.
    Single,
    /// A pair of independent TMSVs teleporting a two-mode input.
    Pair,
}

impl Topology {
    pub fn modes(self) -> usize {
        match self {
            Topology::Single => 1,
            Topology::Pair => 2,
        }
    }
}

/// Squeezing, loss, and topology of the teleportation channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    squeezing: f64,
    reflectivity: f64,
    topology: Topology,
}

impl ChannelSpec {
    pub fn new(squeezing: f64, reflectivity: f64, topology: Topology) -> Result<Self> {
        check_squeezing(squeezing)?;
        check_reflectivity(reflectivity)?;
        Ok(ChannelSpec { squeezing, reflectivity, topology })
    }

    pub fn single(squeezing: f64, reflectivity: f64) -> Result<Self> {
        Self::new(squeezing, reflectivity, Topology::Single)
    }

    pub fn pair(squeezing: f64, reflectivity: f64) -> Result<Self> {
        Self::new(squeezing, reflectivity, Topology::Pair)
    }

    pub fn squeezing(&self) -> f64 {
        self.squeezing
    }

    pub fn reflectivity(&self) -> f64 {
        self.reflectivity
    }

    pub fn topology(&self) -> Topology {
        self.topology
    }

    /// Covariance of each (identical) TMSV after loss.
    pub fn covariance(&self) -> CovarianceMatrix {
        let cov = tmsv_covariance(self.squeezing).expect("validated on construction");
        apply_symmetric_loss(&cov, self.reflectivity).expect("validated on construction")
    }

    pub fn kernel(&self) -> NoiseKernel {
        noise_kernel(&self.covariance())
    }
}

fn check_squeezing(r: f64) -> Result<()> {
    if r.is_finite() && r >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidSqueezing(r))
    }
}

fn check_reflectivity(reflectivity: f64) -> Result<()> {
    if (0.0..=1.0).contains(&reflectivity) {
        Ok(())
    } else {
        Err(Error::InvalidReflectivity(reflectivity))
    }
}

/// Variance matrix of one symmetric TMSV,
///
/// ```text
/// [ eta   0    c    0  ]
/// [ 0    eta   0   -c  ]
/// [ c     0   eta   0  ]
/// [ 0    -c    0   eta ]
/// ```
///
/// `gap = eta − c` is carried separately: at large squeezing both entries
/// overflow while their difference `e^{−2r}/2` stays representable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceMatrix {
    eta: f64,
    c: f64,
    gap: f64,
}

impl CovarianceMatrix {
    /// Builds a covariance from its entries, rejecting unphysical ones.
    pub fn from_entries(eta: f64, c: f64) -> Result<Self> {
        let physical = eta.is_finite() && c.is_finite() && eta >= 0.5 && c * c <= eta * eta - 0.25 + 1e-12 * eta * eta;
        if !physical {
            return Err(Error::UnphysicalCovariance { eta, c });
        }
        Ok(CovarianceMatrix { eta, c, gap: eta - c })
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `eta − c`, evaluated without cancellation.
    pub fn gap(&self) -> f64 {
        self.gap
    }

    /// Dense 4×4 variance matrix in `(x₁, p₁, x₂, p₂)` ordering.
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let (e, c) = (self.eta, self.c);
        [[e, 0.0, c, 0.0], [0.0, e, 0.0, -c], [c, 0.0, e, 0.0], [0.0, -c, 0.0, e]]
    }
}

/// TMSV covariance with `eta = cosh(2r)/2`, `c = sinh(2r)/2`.
pub fn tmsv_covariance(squeezing: f64) -> Result<CovarianceMatrix> {
    check_squeezing(squeezing)?;
    let two_r = 2.0 * squeezing;
    Ok(CovarianceMatrix { eta: 0.5 * two_r.cosh(), c: 0.5 * two_r.sinh(), gap: 0.5 * (-two_r).exp() })
}

/// Sends both modes of the TMSV through beam splitters of reflectivity `R`
/// with vacuum in the other port, then traces out the reflected modes.
///
/// For a TMSV input this yields `eta' = (1 + 2(1−R) sinh² r)/2` and
/// `c' = (1−R) cosh r sinh r`; written in terms of the entries it is
/// `eta' = 1/2 + (1−R)(eta − 1/2)`, `c' = (1−R) c`.
pub fn apply_symmetric_loss(cov: &CovarianceMatrix, reflectivity: f64) -> Result<CovarianceMatrix> {
    check_reflectivity(reflectivity)?;
    let t = 1.0 - reflectivity;
    if t == 1.0 {
        return Ok(*cov);
    }
    let (eta, c) = if t == 0.0 { (0.5, 0.0) } else { (0.5 + t * (cov.eta - 0.5), t * cov.c) };
    let gap = 0.5 * reflectivity + t * cov.gap;
    Ok(CovarianceMatrix { eta, c, gap })
}

/// Per-mode noise strength of the teleportation channel.
///
/// The channel multiplies the input characteristic function by
/// `exp(−(Δ/2)|z|²)` for every teleported mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseKernel {
    delta: f64,
}

impl NoiseKernel {
    /// Kernel with an explicit `Δ ∈ [0, 2]`.
    pub fn from_delta(delta: f64) -> Result<Self> {
        if (0.0..=2.0).contains(&delta) {
            Ok(NoiseKernel { delta })
        } else {
            Err(Error::InvalidNoise(delta))
        }
    }

    /// The noiseless limit `Δ = 0`.
    pub const IDEAL: NoiseKernel = NoiseKernel { delta: 0.0 };

    /// Vacuum resource (`r = 0` or complete loss).
    pub const VACUUM: NoiseKernel = NoiseKernel { delta: 2.0 };

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// `β = 1/(2 + Δ)`.
    pub fn beta(&self) -> f64 {
        1.0 / (2.0 + self.delta)
    }

    /// Kernel factor at squared radius `|z|²`.
    #[inline]
    pub fn factor(&self, norm_sqr: f64) -> f64 {
        (-0.5 * self.delta * norm_sqr).exp()
    }
}

/// `Δ = 4(eta − c)`.
pub fn noise_kernel(cov: &CovarianceMatrix) -> NoiseKernel {
    NoiseKernel { delta: (4.0 * cov.gap).clamp(0.0, 2.0) }
}

/// Closed form `Δ = 2R + 2(1−R)e^{−2r}` of the lossy kernel.
pub fn delta_for(squeezing: f64, reflectivity: f64) -> f64 {
    2.0 * reflectivity + 2.0 * (1.0 - reflectivity) * (-2.0 * squeezing).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn tmsv_examples() {
        let vac = tmsv_covariance(0.0).unwrap();
        assert_eq!((vac.eta(), vac.c()), (0.5, 0.0));
        let cov = tmsv_covariance(1.0).unwrap();
        assert_abs_diff_eq!(cov.eta(), 2.0f64.cosh() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cov.c(), 2.0f64.sinh() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(cov.eta(), 1.8810, epsilon = 1e-4);
        assert_abs_diff_eq!(cov.c(), 1.8134, epsilon = 1e-4);
        let cov = tmsv_covariance(0.7).unwrap();
        assert_abs_diff_eq!(cov.eta() - cov.c(), 0.12330, epsilon = 1e-5);
        assert_abs_diff_eq!(cov.gap(), (-1.4f64).exp() / 2.0, epsilon = 1e-16);
    }

    #[test]
    fn negative_squeezing_rejected() {
        assert_eq!(tmsv_covariance(-0.1), Err(Error::InvalidSqueezing(-0.1)));
        assert!(tmsv_covariance(f64::NAN).is_err());
    }

    #[test]
    fn loss_examples() {
        let cov = tmsv_covariance(1.3).unwrap();
        assert_eq!(apply_symmetric_loss(&cov, 0.0).unwrap(), cov);
        let gone = apply_symmetric_loss(&cov, 1.0).unwrap();
        assert_eq!((gone.eta(), gone.c()), (0.5, 0.0));
        assert_abs_diff_eq!(noise_kernel(&gone).delta(), 2.0, epsilon = 1e-15);

        let lossy = apply_symmetric_loss(&tmsv_covariance(1.0).unwrap(), 0.5).unwrap();
        assert_abs_diff_eq!(lossy.eta(), 1.19055, epsilon = 1e-5);
        assert_abs_diff_eq!(lossy.c(), 0.90672, epsilon = 1e-5);
        assert_abs_diff_eq!(noise_kernel(&lossy).delta(), 1.13534, epsilon = 1e-5);
        assert_abs_diff_eq!(noise_kernel(&lossy).delta(), delta_for(1.0, 0.5), epsilon = 1e-12);
    }

    #[test]
    fn loss_matches_textbook_primed_entries() {
        for &r in &[0.0, 0.4, 1.0, 2.2] {
            for &refl in &[0.0, 0.1, 0.35, 0.8, 1.0] {
                let lossy = apply_symmetric_loss(&tmsv_covariance(r).unwrap(), refl).unwrap();
                let sh = f64::sinh(r);
                let eta = (1.0 + 2.0 * (1.0 - refl) * sh * sh) / 2.0;
                let c = (1.0 - refl) * f64::cosh(r) * sh;
                assert_abs_diff_eq!(lossy.eta(), eta, epsilon = 1e-12 * eta);
                assert_abs_diff_eq!(lossy.c(), c, epsilon = 1e-12 * eta);
                assert_abs_diff_eq!(4.0 * (lossy.eta() - lossy.c()), delta_for(r, refl), epsilon = 1e-12 * eta);
                assert!(CovarianceMatrix::from_entries(lossy.eta(), lossy.c()).is_ok());
            }
        }
    }

    #[test]
    fn reflectivity_out_of_range_rejected() {
        let cov = tmsv_covariance(1.0).unwrap();
        assert_eq!(apply_symmetric_loss(&cov, 1.5), Err(Error::InvalidReflectivity(1.5)));
        assert!(apply_symmetric_loss(&cov, -0.01).is_err());
        assert!(ChannelSpec::pair(1.0, 2.0).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert_abs_diff_eq!(ChannelSpec::pair(0.0, 0.0).unwrap().kernel().delta(), 2.0, epsilon = 1e-15);
        let k = ChannelSpec::pair(1.0, 0.0).unwrap().kernel();
        assert_abs_diff_eq!(k.delta(), 2.0 * (-2.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(k.delta(), 0.27067, epsilon = 1e-5);
        assert!(ChannelSpec::pair(20.0, 0.0).unwrap().kernel().delta() < 1e-16);
        // cosh/sinh overflow here; the gap does not
        assert_eq!(ChannelSpec::pair(1e6, 0.0).unwrap().kernel().delta(), 0.0);
    }

    #[test]
    fn kernel_monotone_on_grid() {
        let rs: std::vec::Vec<f64> = (0..20).map(|i| i as f64 * 0.15).collect();
        let refls: std::vec::Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
        for &r in &rs {
            for w in refls.windows(2) {
                let a = ChannelSpec::pair(r, w[0]).unwrap().kernel().delta();
                let b = ChannelSpec::pair(r, w[1]).unwrap().kernel().delta();
                assert!(b >= a, "delta not increasing in R at r = {r}");
            }
        }
        for &refl in &refls {
            for w in rs.windows(2) {
                let a = ChannelSpec::pair(w[0], refl).unwrap().kernel().delta();
                let b = ChannelSpec::pair(w[1], refl).unwrap().kernel().delta();
                assert!(b <= a, "delta not decreasing in r at R = {refl}");
            }
        }
    }

    #[test]
    fn from_delta_bounds() {
        assert!(NoiseKernel::from_delta(-1e-3).is_err());
        assert!(NoiseKernel::from_delta(2.5).is_err());
        assert_eq!(NoiseKernel::from_delta(2.0).unwrap(), NoiseKernel::VACUUM);
        assert_abs_diff_eq!(NoiseKernel::VACUUM.beta(), 0.25);
    }

    #[test]
    fn covariance_physicality_enforced() {
        assert!(CovarianceMatrix::from_entries(0.4, 0.0).is_err());
        assert!(CovarianceMatrix::from_entries(1.0, 0.95).is_err());
        assert!(CovarianceMatrix::from_entries(1.0, 0.8).is_ok());
    }
}
