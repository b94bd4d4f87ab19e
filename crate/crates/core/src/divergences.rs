//! Closed-form statistical distances between the output distributions of two
//! channel inputs.
//!
//! Both outputs are Gaussians with the same covariance, so every divergence
//! here reduces to a function of one scalar: the squared Mahalanobis distance
//! `‖x − x′‖²_M` with `M = AᵀΣ⁻¹A`. All divergences are returned in nats;
//! rate formulas in [`crate::bounds`] convert to bits at a single declared
//! boundary.

use nalgebra::DVector;
use thiserror::Error;

use crate::channel::SpectralCache;
use crate::scalar::Real;
use crate::special::{ln_normal_cdf, normal_quantile};

#[derive(Debug, Error)]
pub enum DivergenceError {
    #[error("dimension mismatch: vectors have lengths {0} and {1}, channel n = {2}")]
    DimensionMismatch(usize, usize, usize),
    #[error("alpha must lie in (0, inf) \\ {{1}}, got {0}")]
    InvalidAlpha(f64),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
}

/// Geometry of an input pair: the displacement and its squared Euclidean and
/// Mahalanobis lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGeometry<T: Real> {
    /// `x − x′`.
    pub delta: DVector<T>,
    /// `‖x − x′‖²_M`.
    pub mah_sq: T,
    /// `‖x − x′‖²`.
    pub euc_sq: T,
}

/// Compute the [`PairGeometry`] of two inputs through the cached `M`.
pub fn pair_geometry<T: Real>(
    x: &DVector<T>,
    x2: &DVector<T>,
    cache: &SpectralCache<T>,
) -> Result<PairGeometry<T>, DivergenceError> {
    let n = cache.m.nrows();
    if x.len() != n || x2.len() != n {
        return Err(DivergenceError::DimensionMismatch(x.len(), x2.len(), n));
    }
    let delta = x - x2;
    let mah_sq = (&cache.m * &delta).dot(&delta).max(T::zero());
    let euc_sq = delta.norm_squared();
    Ok(PairGeometry {
        delta,
        mah_sq,
        euc_sq,
    })
}

/// Fidelity (Bhattacharyya coefficient) of the two output Gaussians:
/// `F = exp(−‖x − x′‖²_M / 8)`, in `(0, 1]`.
///
/// Underflows to `0.0` for astronomically separated inputs; use
/// [`log_fidelity`] when the log-domain value is needed.
pub fn fidelity<T: Real>(geom: &PairGeometry<T>) -> T {
    log_fidelity(geom).exp()
}

/// `ln F = −‖x − x′‖²_M / 8`.
pub fn log_fidelity<T: Real>(geom: &PairGeometry<T>) -> T {
    -geom.mah_sq / T::lit(8.0)
}

/// Rényi divergence of order `alpha` between the two output Gaussians,
/// in nats: `D_α = (α/2)·‖x − x′‖²_M`.
pub fn renyi<T: Real>(geom: &PairGeometry<T>, alpha: T) -> Result<T, DivergenceError> {
    if !(alpha > T::zero()) || alpha == T::one() || !alpha.is_finite() {
        return Err(DivergenceError::InvalidAlpha(alpha.as_f64()));
    }
    Ok(alpha * geom.mah_sq * T::lit(0.5))
}

/// Fuchs–van-de-Graaf sandwich on the total variation distance:
/// `1 − F ≤ TV ≤ √(1 − F²)`.
pub fn tv_sandwich<T: Real>(f: T) -> Result<(T, T), DivergenceError> {
    if !(f > T::zero()) || f > T::one() {
        return Err(DivergenceError::OutOfRange(format!(
            "fidelity must lie in (0, 1], got {}",
            f.as_f64()
        )));
    }
    let lower = T::one() - f;
    let upper = ((T::one() - f) * (T::one() + f)).sqrt();
    Ok((lower, upper))
}

/// Exact hypothesis-testing relative entropy `D_h^ε` (nats) between the two
/// output Gaussians.
///
/// With common covariance the log-likelihood ratio is a linear statistic with
/// variance `‖x − x′‖²_M` under both hypotheses, so the Neyman–Pearson
/// optimum over all decision regions is achieved by a half-space and equals
/// `−ln Φ(Φ⁻¹(1 − ε) − s)` with `s = ‖x − x′‖_M`.
pub fn dh_exact<T: Real>(geom: &PairGeometry<T>, eps: T) -> Result<T, DivergenceError> {
    if !(eps > T::zero()) || !(eps < T::one()) {
        return Err(DivergenceError::OutOfRange(format!(
            "eps must lie in (0, 1), got {}",
            eps.as_f64()
        )));
    }
    let s = geom.mah_sq.sqrt();
    Ok(-ln_normal_cdf(normal_quantile(T::one() - eps) - s))
}
