//! The distance-decoding identification test: accept message `i` iff
//! `‖y − A·uᵢ‖² ≤ T` with `T = Tr Σ + 4·ν_M·n·√E₁` (the `E₁ > 1` variant
//! replaces `√E₁` by `E₁`).

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::bounds::{self, BoundsError};
use crate::channel::SpectralCache;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum DecoderError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Exponent regime the threshold was derived in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExponentRegime {
    /// `E₁ ≤ 1`: threshold margin `4·ν_M·n·√E₁`.
    Sqrt,
    /// `E₁ > 1`: threshold margin `4·ν_M·n·E₁`.
    Linear,
}

/// A fixed decision threshold paired with the exponent it was derived from.
///
/// Thresholds are absolute squared distances; the statistic is never
/// normalized by `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecoderSpec<T: Real> {
    pub threshold: T,
    pub e1: T,
    pub regime: ExponentRegime,
}

impl<T: Real> DecoderSpec<T> {
    /// Build the spec for a channel at type-I exponent `e1` (nats).
    pub fn for_channel(n: usize, e1: T, cache: &SpectralCache<T>) -> Result<Self, BoundsError> {
        let threshold = bounds::decoder_threshold(n, e1, cache)?;
        let regime = if e1 <= T::one() {
            ExponentRegime::Sqrt
        } else {
            ExponentRegime::Linear
        };
        Ok(DecoderSpec {
            threshold,
            e1,
            regime,
        })
    }
}

/// Squared residual `‖y − A·u‖²`.
pub fn squared_residual<T: Real>(
    y: &DVector<T>,
    u: &DVector<T>,
    a: &DMatrix<T>,
) -> Result<T, DecoderError> {
    if y.len() != a.nrows() || u.len() != a.ncols() {
        return Err(DecoderError::DimensionMismatch(format!(
            "y has length {}, u has length {}, A is {}x{}",
            y.len(),
            u.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok((y - a * u).norm_squared())
}

/// The identification test: true iff `‖y − A·u‖² ≤ threshold`.
/// Ties at exact equality accept.
pub fn identify<T: Real>(
    y: &DVector<T>,
    u: &DVector<T>,
    a: &DMatrix<T>,
    spec: &DecoderSpec<T>,
) -> Result<bool, DecoderError> {
    Ok(squared_residual(y, u, a)? <= spec.threshold)
}

/// The transformed displacement `d = A·(u_j − u_i)` whose squared norm drives
/// the type-II error bound.
pub fn pairwise_margin<T: Real>(
    u_i: &DVector<T>,
    u_j: &DVector<T>,
    a: &DMatrix<T>,
) -> Result<DVector<T>, DecoderError> {
    if u_i.len() != a.ncols() || u_j.len() != a.ncols() {
        return Err(DecoderError::DimensionMismatch(format!(
            "codewords have lengths {} and {}, A is {}x{}",
            u_i.len(),
            u_j.len(),
            a.nrows(),
            a.ncols()
        )));
    }
    Ok(a * (u_j - u_i))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{preset, spectral_cache, validate_channel, Preset};
    use crate::rng::{stream_rng, STREAM_CHANNEL};
    use rand_distr::StandardNormal;
    use rand::Rng;

    fn spec(threshold: f64) -> DecoderSpec<f64> {
        DecoderSpec {
            threshold,
            e1: 1.0,
            regime: ExponentRegime::Sqrt,
        }
    }

    #[test]
    fn exact_output_always_accepted() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 2.0]);
        let u = DVector::from_vec(vec![1.0, -1.0]);
        let y = &a * &u;
        assert!(identify(&y, &u, &a, &spec(0.0)).unwrap());
    }

    #[test]
    fn boundary_ties_accept_and_strict_excess_rejects() {
        let a = DMatrix::identity(1, 1);
        let u = DVector::from_vec(vec![0.0]);
        let y = DVector::from_vec(vec![2.0]);
        // residual = 4 exactly
        assert!(identify(&y, &u, &a, &spec(4.0)).unwrap());
        assert!(!identify(&y, &u, &a, &spec(4.0 * (1.0 - 1e-15))).unwrap());
        let y_eps = DVector::from_vec(vec![2.0 + 4.0 * f64::EPSILON]);
        assert!(!identify(&y_eps, &u, &a, &spec(4.0)).unwrap());
    }

    #[test]
    fn threshold_monotonicity() {
        let a = DMatrix::identity(3, 3);
        let u = DVector::zeros(3);
        let y = DVector::from_vec(vec![1.0, 2.0, -0.5]);
        let r = squared_residual(&y, &u, &a).unwrap();
        assert!(identify(&y, &u, &a, &spec(r)).unwrap());
        assert!(identify(&y, &u, &a, &spec(r * 2.0)).unwrap());
        assert!(!identify(&y, &u, &a, &spec(r * 0.5)).unwrap());
    }

    #[test]
    fn pairwise_margin_values() {
        let a = DMatrix::identity(2, 2);
        let u = DVector::from_vec(vec![1.0, 1.0]);
        assert_eq!(pairwise_margin(&u, &u, &a).unwrap(), DVector::zeros(2));

        let uj = DVector::from_vec(vec![2.0, 3.0]);
        let d = pairwise_margin(&u, &uj, &a).unwrap();
        assert_eq!(d, DVector::from_vec(vec![1.0, 2.0]));

        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        let ui = DVector::zeros(2);
        let uj = DVector::from_vec(vec![1.0, 1.0]);
        let d = pairwise_margin(&ui, &uj, &a).unwrap();
        assert_eq!(d, DVector::from_vec(vec![1.0, 2.0]));
        assert_eq!(d.norm_squared(), 5.0);
    }

    #[test]
    fn dimension_mismatch_detected() {
        let a = DMatrix::identity(2, 2);
        let u = DVector::zeros(3);
        let y = DVector::zeros(2);
        assert!(identify(&y, &u, &a, &spec(1.0)).is_err());
    }

    #[test]
    fn spec_regime_tracks_exponent() {
        let ch = preset(Preset::Awgn {
            n: 8,
            sigma2: 1.0,
            p: 1.0,
        })
        .unwrap();
        let cache = spectral_cache(&ch).unwrap();
        let s = DecoderSpec::for_channel(8, 0.25, &cache).unwrap();
        assert_eq!(s.regime, ExponentRegime::Sqrt);
        assert!(s.threshold > cache.sigma_trace);
        let s = DecoderSpec::for_channel(8, 4.0, &cache).unwrap();
        assert_eq!(s.regime, ExponentRegime::Linear);
    }

    #[test]
    fn residual_invariant_under_orthogonal_basis_change() {
        // The basis change by U from the spectral cache preserves the decoding
        // statistic.
        let sigma = DMatrix::from_row_slice(2, 2, &[2.0, 0.8, 0.8, 1.0]);
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.2, 1.4]);
        let ch = validate_channel(2, a.clone(), sigma, 1.0).unwrap();
        let cache = spectral_cache(&ch).unwrap();
        let u_basis = &cache.sigma_eigvecs;

        let mut rng = stream_rng(5, STREAM_CHANNEL, 0);
        for _ in 0..50 {
            let y = DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let u = DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let direct = squared_residual(&y, &u, &a).unwrap();
            let rotated = (u_basis.transpose() * (&y - &a * &u)).norm_squared();
            assert!((direct - rotated).abs() <= 1e-9 * direct.max(1e-30));
        }
    }
}
