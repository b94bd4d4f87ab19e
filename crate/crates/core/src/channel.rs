//! The linear Gaussian channel `Y = Ax + Z`, `Z ~ N(0, Σ)`, with a per-block
//! power budget `‖x‖² ≤ nP`, plus the spectral quantities every other module
//! consumes.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::scalar::Real;

/// Relative Frobenius asymmetry tolerated in Σ before rejecting it.
pub const TOL_SYM: f64 = 1e-10;
/// Positive-definiteness floor, relative to the largest eigenvalue of Σ.
pub const TOL_PD: f64 = 1e-12;
/// Rank floor for A, relative to its largest singular value.
pub const TOL_RANK: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("covariance not symmetric: relative asymmetry {asymmetry:.3e} > {tol:.1e}")]
    NonSymmetricCovariance { asymmetry: f64, tol: f64 },
    #[error("covariance not positive definite: min eigenvalue {min_eig:.3e} (max {max_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64, max_eig: f64 },
    #[error("transform singular: min singular value {min_sv:.3e} (max {max_sv:.3e})")]
    SingularTransform { min_sv: f64, max_sv: f64 },
    #[error("power budget must be positive, got {0}")]
    NonPositivePower(f64),
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
}

/// A validated channel: block length `n`, invertible transform `A`, strictly
/// positive definite noise covariance `Σ` (stored symmetrized), and power
/// budget `P`.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel<T: Real> {
    n: usize,
    a: DMatrix<T>,
    sigma: DMatrix<T>,
    p: T,
}

impl<T: Real> ChannelModel<T> {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn a(&self) -> &DMatrix<T> {
        &self.a
    }

    pub fn sigma(&self) -> &DMatrix<T> {
        &self.sigma
    }

    pub fn p(&self) -> T {
        self.p
    }

    /// Radius `√(nP)` of the admissible input ball.
    pub fn power_radius(&self) -> T {
        (T::of_usize(self.n) * self.p).sqrt()
    }
}

/// Spectral data derived from a channel: `M = AᵀΣ⁻¹A` with its extreme
/// eigenvalues, the eigensystem of Σ, traces, and the Cholesky factor used
/// for noise sampling.
///
/// Construction is a pure function of the channel: identical inputs give
/// bit-identical caches.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCache<T: Real> {
    /// `M = AᵀΣ⁻¹A`, symmetrized.
    pub m: DMatrix<T>,
    /// Largest eigenvalue of `M`.
    pub m_eig_max: T,
    /// Smallest eigenvalue of `M`.
    pub m_eig_min: T,
    /// Eigenvalues of Σ, ascending.
    pub sigma_eigs: Vec<T>,
    /// Largest eigenvalue of Σ.
    pub sigma_eig_max: T,
    /// `Tr Σ`.
    pub sigma_trace: T,
    /// `Tr Σ²`.
    pub sigma_trace_sq: T,
    /// Lower-triangular Cholesky factor of Σ (noise sampler).
    pub sigma_chol: DMatrix<T>,
    /// Orthogonal matrix of Σ's eigenvectors (columns match `sigma_eigs`).
    pub sigma_eigvecs: DMatrix<T>,
}

fn frobenius<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().map(|&v| v * v).fold(T::zero(), |a, b| a + b).sqrt()
}

/// Validate `(n, A, Σ, P)` into a [`ChannelModel`].
///
/// Σ is symmetrized before the definiteness check and stored symmetrized.
pub fn validate_channel<T: Real>(
    n: usize,
    a: DMatrix<T>,
    sigma: DMatrix<T>,
    p: T,
) -> Result<ChannelModel<T>, ChannelError> {
    if n == 0 {
        return Err(ChannelError::DimensionMismatch(
            "block length n must be at least 1".into(),
        ));
    }
    if a.nrows() != n || a.ncols() != n {
        return Err(ChannelError::DimensionMismatch(format!(
            "A is {}x{}, expected {n}x{n}",
            a.nrows(),
            a.ncols()
        )));
    }
    if sigma.nrows() != n || sigma.ncols() != n {
        return Err(ChannelError::DimensionMismatch(format!(
            "Sigma is {}x{}, expected {n}x{n}",
            sigma.nrows(),
            sigma.ncols()
        )));
    }
    if !(p > T::zero()) || !p.is_finite() {
        return Err(ChannelError::NonPositivePower(p.as_f64()));
    }

    let scale = frobenius(&sigma);
    let asymmetry = frobenius(&(&sigma - sigma.transpose()));
    if scale > T::zero() && asymmetry > T::lit(TOL_SYM) * scale {
        return Err(ChannelError::NonSymmetricCovariance {
            asymmetry: (asymmetry / scale).as_f64(),
            tol: TOL_SYM,
        });
    }
    let sigma_sym = (&sigma + sigma.transpose()) * T::lit(0.5);

    let eigs = sigma_sym.clone().symmetric_eigen().eigenvalues;
    let max_eig = eigs.iter().copied().fold(T::lit(f64::NEG_INFINITY), T::max);
    let min_eig = eigs.iter().copied().fold(T::lit(f64::INFINITY), T::min);
    if !(max_eig > T::zero()) || min_eig <= T::lit(TOL_PD) * max_eig {
        return Err(ChannelError::NotPositiveDefinite {
            min_eig: min_eig.as_f64(),
            max_eig: max_eig.as_f64(),
        });
    }

    let svs = a.clone().singular_values();
    let max_sv = svs.iter().copied().fold(T::zero(), T::max);
    let min_sv = svs.iter().copied().fold(T::lit(f64::INFINITY), T::min);
    if min_sv <= T::lit(TOL_RANK) * max_sv {
        return Err(ChannelError::SingularTransform {
            min_sv: min_sv.as_f64(),
            max_sv: max_sv.as_f64(),
        });
    }

    Ok(ChannelModel {
        n,
        a,
        sigma: sigma_sym,
        p,
    })
}

/// Compute the [`SpectralCache`] of a validated channel.
pub fn spectral_cache<T: Real>(ch: &ChannelModel<T>) -> Result<SpectralCache<T>, ChannelError> {
    let n = ch.n;

    // Eigensystem of Σ, sorted ascending (stable in the original index).
    let eig = ch.sigma.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        eig.eigenvalues[i]
            .partial_cmp(&eig.eigenvalues[j])
            .expect("non-NaN eigenvalues")
    });
    let sigma_eigs: Vec<T> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut sigma_eigvecs = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        sigma_eigvecs.set_column(dst, &eig.eigenvectors.column(src));
    }
    if sigma_eigs[0] <= T::zero() || !sigma_eigs.iter().all(|v| v.is_finite()) {
        return Err(ChannelError::NumericalFailure(
            "eigendecomposition of Sigma produced a non-positive eigenvalue".into(),
        ));
    }

    let sigma_eig_max = sigma_eigs[n - 1];
    let sigma_trace = sigma_eigs.iter().fold(T::zero(), |acc, &v| acc + v);
    let sigma_trace_sq = sigma_eigs.iter().fold(T::zero(), |acc, &v| acc + v * v);

    // M = AᵀΣ⁻¹A through the eigensystem: W = UᵀA, M = Wᵀ diag(1/ν) W.
    let w = sigma_eigvecs.transpose() * &ch.a;
    let mut scaled = w.clone();
    for (r, &nu) in sigma_eigs.iter().enumerate() {
        let mut row = scaled.row_mut(r);
        row /= nu;
    }
    let m_raw = w.transpose() * scaled;
    let m = (&m_raw + m_raw.transpose()) * T::lit(0.5);

    let m_eigs = m.clone().symmetric_eigen().eigenvalues;
    let m_eig_max = m_eigs.iter().copied().fold(T::lit(f64::NEG_INFINITY), T::max);
    let m_eig_min = m_eigs.iter().copied().fold(T::lit(f64::INFINITY), T::min);
    if !(m_eig_min > T::zero()) {
        return Err(ChannelError::NumericalFailure(
            "M = A^T Sigma^-1 A is not numerically positive definite".into(),
        ));
    }

    let sigma_chol = Cholesky::new(ch.sigma.clone())
        .ok_or_else(|| {
            ChannelError::NumericalFailure("Cholesky factorization of Sigma failed".into())
        })?
        .l();

    Ok(SpectralCache {
        m,
        m_eig_max,
        m_eig_min,
        sigma_eigs,
        sigma_eig_max,
        sigma_trace,
        sigma_trace_sq,
        sigma_chol,
        sigma_eigvecs,
    })
}

/// Channel presets covering the classical special cases of the linear
/// Gaussian model.
#[derive(Debug, Clone, PartialEq)]
pub enum Preset<T: Real> {
    /// `A = I`, `Σ = σ²I`.
    Awgn { n: usize, sigma2: T, p: T },
    /// `A = gI`, `Σ = σ²I`.
    ScalarFading { n: usize, gain: T, sigma2: T, p: T },
    /// `A = diag(g₁, …, gₙ)`, `Σ = σ²I`; `n` is the number of gains.
    DiagFading { gains: Vec<T>, sigma2: T, p: T },
    /// `A` lower-triangular Toeplitz with first column equal to `taps`
    /// (zero-padded), `Σ = σ²I`; models inter-symbol interference.
    ToeplitzIsi {
        taps: Vec<T>,
        n: usize,
        sigma2: T,
        p: T,
    },
    /// Explicit matrices.
    Explicit {
        a: DMatrix<T>,
        sigma: DMatrix<T>,
        p: T,
    },
}

/// Instantiate and validate a preset.
pub fn preset<T: Real>(spec: Preset<T>) -> Result<ChannelModel<T>, ChannelError> {
    match spec {
        Preset::Awgn { n, sigma2, p } => {
            let a = DMatrix::identity(n, n);
            let sigma = DMatrix::identity(n, n) * sigma2;
            validate_channel(n, a, sigma, p)
        }
        Preset::ScalarFading { n, gain, sigma2, p } => {
            let a = DMatrix::identity(n, n) * gain;
            let sigma = DMatrix::identity(n, n) * sigma2;
            validate_channel(n, a, sigma, p)
        }
        Preset::DiagFading { gains, sigma2, p } => {
            let n = gains.len();
            let a = DMatrix::from_diagonal(&DVector::from_vec(gains));
            let sigma = DMatrix::identity(n, n) * sigma2;
            validate_channel(n, a, sigma, p)
        }
        Preset::ToeplitzIsi { taps, n, sigma2, p } => {
            if taps.is_empty() || taps.len() > n {
                return Err(ChannelError::DimensionMismatch(format!(
                    "need 1..=n taps, got {} for n = {n}",
                    taps.len()
                )));
            }
            let a = DMatrix::from_fn(n, n, |i, j| {
                if i >= j && i - j < taps.len() {
                    taps[i - j]
                } else {
                    T::zero()
                }
            });
            let sigma = DMatrix::identity(n, n) * sigma2;
            validate_channel(n, a, sigma, p)
        }
        Preset::Explicit { a, sigma, p } => {
            let n = a.nrows();
            validate_channel(n, a, sigma, p)
        }
    }
}

/// Draw one channel output `y = Ax + L·g` where `L` is the Cholesky factor of
/// Σ and `g` holds `n` standard normal draws taken from `rng` in index order.
///
/// Inputs beyond the power budget are allowed for diagnostics; a warning is
/// logged rather than an error raised.
pub fn sample_output<T: Real, R: Rng + ?Sized>(
    ch: &ChannelModel<T>,
    cache: &SpectralCache<T>,
    x: &DVector<T>,
    rng: &mut R,
) -> DVector<T>
where
    StandardNormal: Distribution<T>,
{
    assert_eq!(x.len(), ch.n, "input length must equal block length");
    let budget = T::of_usize(ch.n) * ch.p;
    if x.norm_squared() > budget {
        log::warn!(
            "sampling with over-budget input: |x|^2 = {:.6e} > nP = {:.6e}",
            x.norm_squared().as_f64(),
            budget.as_f64()
        );
    }
    let mut g = DVector::zeros(ch.n);
    for i in 0..ch.n {
        g[i] = rng.sample(StandardNormal);
    }
    &ch.a * x + &cache.sigma_chol * g
}
