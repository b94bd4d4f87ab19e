//! Closed-form rate–reliability formulas: converse bounds for the symmetric
//! and maximally asymmetric error regimes, the distance-decoding
//! achievability rates and exponents, packing radii, ball volumes, and
//! feasibility checks.
//!
//! Unit convention: error exponents `E` are in nats (`λ = e^{−nE}`); every
//! rate is reported in bits per channel use. Exponents quoted base-2
//! elsewhere must be multiplied by `ln 2` before entering these functions.

use thiserror::Error;

use crate::channel::SpectralCache;
use crate::scalar::Real;
use crate::special::ln_gamma;

#[derive(Debug, Error)]
pub enum BoundsError {
    #[error("exponent too small: need n*E >= {required:.6}, got {got:.6}")]
    ExponentTooSmall { required: f64, got: f64 },
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(f64),
    #[error("packing radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("eps must lie in (0, 1/3), got {0}")]
    EpsOutOfRange(f64),
    #[error("infeasible: margin eps^2*P - nu_M*f(E1) = {margin:.6e} is not positive")]
    Infeasible { margin: f64 },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
}

/// A pair of error exponents in nats, with `λᵢ = e^{−nEᵢ}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorExponents<T: Real> {
    pub e1: T,
    pub e2: T,
    pub n: usize,
}

impl<T: Real> ErrorExponents<T> {
    pub fn lambda1(&self) -> T {
        lambda_from_exponent(self.e1, self.n).unwrap_or(T::one())
    }

    pub fn lambda2(&self) -> T {
        lambda_from_exponent(self.e2, self.n).unwrap_or(T::one())
    }
}

/// `√E` below 1, `E` above: the exponent functional shared by the decoder
/// threshold, the feasibility condition, and the type-II exponent. The two
/// branches agree at `E = 1`.
pub fn effective_exponent<T: Real>(e1: T) -> T {
    if e1 <= T::one() {
        e1.sqrt()
    } else {
        e1
    }
}

/// Symmetric-regime converse (bits/symbol): `R ≤ ½·log₂(8·ν_max·P / E)`.
///
/// Requires `E ≥ ln(16)/n`; `E` in nats.
pub fn converse_rate_symmetric<T: Real>(
    n: usize,
    e: T,
    nu_max: T,
    p: T,
) -> Result<T, BoundsError> {
    let required = T::lit(16.0).ln();
    let ne = T::of_usize(n) * e;
    if !(ne >= required) {
        return Err(BoundsError::ExponentTooSmall {
            required: required.as_f64(),
            got: ne.as_f64(),
        });
    }
    Ok(T::lit(0.5) * (T::lit(8.0) * nu_max * p / e).log2_())
}

/// Minimum packing radius forced by the symmetric converse:
/// `r = √((nE − 2 ln 2)/ν_max)`; any valid DI code is pairwise farther
/// than `2r`. Requires `nE ≥ 2 ln 2`.
pub fn packing_radius_symmetric<T: Real>(n: usize, e: T, nu_max: T) -> Result<T, BoundsError> {
    let required = T::lit(2.0) * T::ln_2();
    let ne = T::of_usize(n) * e;
    if !(ne >= required) {
        return Err(BoundsError::ExponentTooSmall {
            required: required.as_f64(),
            got: ne.as_f64(),
        });
    }
    Ok(((ne - required) / nu_max).sqrt())
}

/// Asymmetric-regime (Stein/Sanov) converse (bits/symbol):
/// `R ≤ log₂(√(2·ν_max·P/E) + 1)` for any `E > 0` in nats.
pub fn converse_rate_asymmetric<T: Real>(e: T, nu_max: T, p: T) -> Result<T, BoundsError> {
    if !(e > T::zero()) {
        return Err(BoundsError::NonPositiveExponent(e.as_f64()));
    }
    Ok(((T::lit(2.0) * nu_max * p / e).sqrt() + T::one()).log2_())
}

/// Packing radius forced in the asymmetric regimes: `r = ½·√(2nE/ν_max)`.
pub fn packing_radius_asymmetric<T: Real>(n: usize, e: T, nu_max: T) -> Result<T, BoundsError> {
    if !(e > T::zero()) {
        return Err(BoundsError::NonPositiveExponent(e.as_f64()));
    }
    Ok(T::lit(0.5) * (T::lit(2.0) * T::of_usize(n) * e / nu_max).sqrt())
}

/// Natural log of the volume of the `n`-ball of radius `rho > 0`:
/// `(n/2)·ln π − ln Γ(n/2 + 1) + n·ln ρ`.
pub fn log_ball_volume<T: Real>(n: usize, rho: T) -> T {
    let half_n = T::of_usize(n) * T::lit(0.5);
    half_n * T::pi().ln() - ln_gamma(half_n + T::one()) + T::of_usize(n) * rho.ln()
}

/// Volumetric upper bound on `log₂ N` for a packing of radius `r` with
/// centres inside the ball of radius `√(nP)`: `n·log₂(2√(nP)/r)`.
pub fn log2_packing_count_upper<T: Real>(n: usize, p: T, r: T) -> Result<T, BoundsError> {
    if !(r > T::zero()) {
        return Err(BoundsError::NonPositiveRadius(r.as_f64()));
    }
    let np_sqrt = (T::of_usize(n) * p).sqrt();
    Ok(T::of_usize(n) * (T::lit(2.0) * np_sqrt / r).log2_())
}

/// Distance-decoder threshold `T = Tr Σ + 4·ν_M·n·√E₁` (or `E₁` in place of
/// `√E₁` when `E₁ > 1`; the branches agree at `E₁ = 1`).
pub fn decoder_threshold<T: Real>(
    n: usize,
    e1: T,
    cache: &SpectralCache<T>,
) -> Result<T, BoundsError> {
    if !(e1 > T::zero()) {
        return Err(BoundsError::NonPositiveExponent(e1.as_f64()));
    }
    Ok(cache.sigma_trace
        + T::lit(4.0) * cache.sigma_eig_max * T::of_usize(n) * effective_exponent(e1))
}

/// Feasibility of the distance-decoding construction:
/// `P·ε² > ν_M·√E₁` (with `√E₁ → E₁` for `E₁ > 1`). Requires `ε ∈ (0, 1/3)`.
pub fn feasibility<T: Real>(eps: T, e1: T, nu_m: T, p: T) -> Result<bool, BoundsError> {
    if !(eps > T::zero() && eps < T::one() / T::lit(3.0)) {
        return Err(BoundsError::EpsOutOfRange(eps.as_f64()));
    }
    if !(e1 > T::zero()) {
        return Err(BoundsError::NonPositiveExponent(e1.as_f64()));
    }
    Ok(p * eps * eps > nu_m * effective_exponent(e1))
}

/// Type-II exponent of the distance decoder (nats):
/// `E₂ = 2·(ε²P − ν_M·√E₁)² / (ν_M·(ν_M + P))`, general-ε form.
pub fn type2_exponent<T: Real>(eps: T, e1: T, nu_m: T, p: T) -> Result<T, BoundsError> {
    if !feasibility(eps, e1, nu_m, p)? {
        let margin = eps * eps * p - nu_m * effective_exponent(e1);
        return Err(BoundsError::Infeasible {
            margin: margin.as_f64(),
        });
    }
    let margin = eps * eps * p - nu_m * effective_exponent(e1);
    Ok(T::lit(2.0) * margin * margin / (nu_m * (nu_m + p)))
}

/// Result of the linear-rate achievability evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearRate<T: Real> {
    /// Achievable rate in bits/symbol (0 when degenerate).
    pub rate_bits: T,
    /// Type-II exponent paired with the construction (nats).
    pub e2: T,
    /// The canonical packing ratio `ε = √((1+τ)·ν_M·√E₁/P)`.
    pub eps: T,
    /// Set when the rate formula's log argument was ≤ 1 and the rate was
    /// clamped to zero.
    pub degenerate: bool,
}

/// Linear-rate achievability with exponentially vanishing errors:
/// `R = log₂(√(P/(4·ν_M·(1+τ)·√E₁)) − ½)` with
/// `E₂ = 2·τ²·E₁/(1 + P/ν_M)` (for `E₁ ≤ 1`; `√E₁ → E₁` and `E₁ → E₁²`
/// above 1).
///
/// Enforces the stated hypothesis `0 < √E₁ < P/(9·τ·ν_M)` (with the `E₁ > 1`
/// variant). A packing ratio `ε ≥ 1/3` makes the log argument ≤ 1; the rate
/// is then clamped to zero and flagged degenerate rather than rejected. The
/// construction route additionally requires `ε < 1/3` through
/// [`feasibility`].
pub fn achievable_rate_linear<T: Real>(
    e1: T,
    tau: T,
    nu_m: T,
    p: T,
) -> Result<LinearRate<T>, BoundsError> {
    if !(tau > T::zero()) {
        return Err(BoundsError::HypothesisViolated(format!(
            "tau must be positive, got {}",
            tau.as_f64()
        )));
    }
    if !(e1 > T::zero()) {
        return Err(BoundsError::HypothesisViolated(format!(
            "E1 must be positive, got {}",
            e1.as_f64()
        )));
    }
    let eff = effective_exponent(e1);
    let limit = p / (T::lit(9.0) * tau * nu_m);
    if !(eff < limit) {
        return Err(BoundsError::HypothesisViolated(format!(
            "require sqrt(E1) < P/(9 tau nu_M) = {:.6}, got {:.6}",
            limit.as_f64(),
            eff.as_f64()
        )));
    }
    let eps_sq = (T::one() + tau) * nu_m * eff / p;
    let eps = eps_sq.sqrt();
    let e2 = T::lit(2.0) * tau * tau * eff * eff / (T::one() + p / nu_m);
    let arg = (p / (T::lit(4.0) * nu_m * (T::one() + tau) * eff)).sqrt() - T::lit(0.5);
    let (rate_bits, degenerate) = if arg > T::one() {
        (arg.log2_(), false)
    } else {
        (T::zero(), true)
    };
    Ok(LinearRate {
        rate_bits,
        e2,
        eps,
        degenerate,
    })
}

/// Result of the linearithmic-rate evaluation (formula path only; these
/// codebooks are astronomically large and are never constructed).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearithmicRate<T: Real> {
    /// `E₁ = n^{−β}` (nats).
    pub e1: T,
    /// `E₂ = 2·τ²·n^{−β}/(1 + P/ν_M)` (nats).
    pub e2: T,
    /// Lower bound on `log₂ N`.
    pub log2_n_lower: T,
    /// `log₂ N / (n·log₂ n)`.
    pub normalized_rate: T,
}

/// Linearithmic achievability: sub-exponentially vanishing errors with
/// `log₂ N ≥ n·log₂(n^{β/4}·√P / (4·√((1+τ)·ν_M)))`.
pub fn achievable_rate_linearithmic<T: Real>(
    n: usize,
    beta: T,
    tau: T,
    nu_m: T,
    p: T,
) -> Result<LinearithmicRate<T>, BoundsError> {
    if !(beta > T::zero() && beta < T::one()) {
        return Err(BoundsError::OutOfRange(format!(
            "beta must lie in (0, 1), got {}",
            beta.as_f64()
        )));
    }
    if !(tau > T::zero()) {
        return Err(BoundsError::OutOfRange(format!(
            "tau must be positive, got {}",
            tau.as_f64()
        )));
    }
    if n < 2 {
        return Err(BoundsError::OutOfRange(
            "need n >= 2 for a normalized linearithmic rate".into(),
        ));
    }
    let nf = T::of_usize(n);
    let e1 = nf.powf(-beta);
    let e2 = T::lit(2.0) * tau * tau * e1 / (T::one() + p / nu_m);
    let per_symbol = beta / T::lit(4.0) * nf.log2_()
        + T::lit(0.5) * (p / (T::lit(16.0) * (T::one() + tau) * nu_m)).log2_();
    let log2_n_lower = nf * per_symbol;
    let normalized_rate = per_symbol / nf.log2_();
    Ok(LinearithmicRate {
        e1,
        e2,
        log2_n_lower,
        normalized_rate,
    })
}

/// `E = −ln(λ)/n` for `λ ∈ (0, 1]`.
pub fn exponent_from_lambda<T: Real>(lambda: T, n: usize) -> Result<T, BoundsError> {
    if !(lambda > T::zero()) || lambda > T::one() {
        return Err(BoundsError::OutOfRange(format!(
            "lambda must lie in (0, 1], got {}",
            lambda.as_f64()
        )));
    }
    Ok(-lambda.ln() / T::of_usize(n))
}

/// `λ = e^{−nE}` for `E ≥ 0`.
pub fn lambda_from_exponent<T: Real>(e: T, n: usize) -> Result<T, BoundsError> {
    if e < T::zero() {
        return Err(BoundsError::OutOfRange(format!(
            "exponent must be nonnegative, got {}",
            e.as_f64()
        )));
    }
    Ok((-T::of_usize(n) * e).exp())
}

/// Every applicable converse for a given exponent pair, with applicability
/// flags instead of errors.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport<T: Real> {
    pub n: usize,
    /// `min(E₁, E₂)` when both exponents are present and positive.
    pub e_min: Option<T>,
    /// Largest present positive exponent (the asymmetric converse may use it).
    pub e_max: Option<T>,
    /// Symmetric converse at `e_min` (bits), when its hypothesis holds.
    pub conv_symmetric_bits: Option<T>,
    /// Asymmetric converse at `e_max` (bits).
    pub conv_asymmetric_bits: Option<T>,
    /// Symmetric packing radius at `e_min`.
    pub r_symmetric: Option<T>,
    /// Asymmetric packing radius at `e_max`.
    pub r_asymmetric: Option<T>,
    /// Volumetric bound on `log₂ N` from the regime-appropriate radius.
    pub log2_n_upper: Option<T>,
    /// Why flags above are unset.
    pub notes: Vec<String>,
}

/// Evaluate every converse that applies to exponents `(e1, e2)`; `None` or
/// non-positive entries mark an error type without an exponential guarantee.
pub fn bound_report<T: Real>(
    n: usize,
    e1: Option<T>,
    e2: Option<T>,
    cache: &SpectralCache<T>,
    p: T,
) -> BoundReport<T> {
    let pos1 = e1.filter(|v| *v > T::zero());
    let pos2 = e2.filter(|v| *v > T::zero());
    let mut notes = Vec::new();

    let e_min = match (pos1, pos2) {
        (Some(a), Some(b)) => Some(a.min(b)),
        _ => {
            notes.push("symmetric converse needs both exponents positive".to_string());
            None
        }
    };
    let e_max = match (pos1, pos2) {
        (Some(a), Some(b)) => Some(a.max(b)),
        (Some(a), None) => Some(a),
        (None, Some(b)) => Some(b),
        (None, None) => {
            notes.push("no positive exponent provided".to_string());
            None
        }
    };

    let nu_max = cache.m_eig_max;
    let conv_symmetric_bits = e_min.and_then(|e| match converse_rate_symmetric(n, e, nu_max, p) {
        Ok(v) => Some(v),
        Err(err) => {
            notes.push(format!("symmetric converse inapplicable: {err}"));
            None
        }
    });
    let r_symmetric = e_min.and_then(|e| packing_radius_symmetric(n, e, nu_max).ok());
    let conv_asymmetric_bits = e_max.and_then(|e| converse_rate_asymmetric(e, nu_max, p).ok());
    let r_asymmetric = e_max.and_then(|e| packing_radius_asymmetric(n, e, nu_max).ok());

    let log2_n_upper = r_symmetric
        .or(r_asymmetric)
        .filter(|r| *r > T::zero())
        .and_then(|r| log2_packing_count_upper(n, p, r).ok());
    if log2_n_upper.is_none() {
        notes.push("volumetric count bound needs a positive packing radius".to_string());
    }

    BoundReport {
        n,
        e_min,
        e_max,
        conv_symmetric_bits,
        conv_asymmetric_bits,
        r_symmetric,
        r_asymmetric,
        log2_n_upper,
        notes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{preset, spectral_cache, Preset};

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn symmetric_converse_values() {
        close(converse_rate_symmetric(6, 0.5, 1.0, 1.0).unwrap(), 2.0, 1e-14);
        close(converse_rate_symmetric(1, 8.0, 1.0, 1.0).unwrap(), 0.0, 1e-14);
        assert!(matches!(
            converse_rate_symmetric(4, 0.5, 1.0, 1.0),
            Err(BoundsError::ExponentTooSmall { .. })
        ));
    }

    #[test]
    fn symmetric_packing_radius_values() {
        let two_ln2 = 2.0 * 2.0f64.ln();
        close(packing_radius_symmetric(1, two_ln2, 1.0).unwrap(), 0.0, 1e-15);
        // n=4, E = ln(16)/4 => nE - 2 ln 2 = 2 ln 2
        close(
            packing_radius_symmetric(4, 16.0f64.ln() / 4.0, 1.0).unwrap(),
            1.177_410_022_515_474_7,
            1e-12,
        );
        // doubling nu_max divides r by sqrt(2)
        let r1 = packing_radius_symmetric(8, 1.0, 1.0).unwrap();
        let r2 = packing_radius_symmetric(8, 1.0, 2.0).unwrap();
        close(r1 / r2, 2.0f64.sqrt(), 1e-12);
        assert!(packing_radius_symmetric(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn asymmetric_converse_values() {
        close(converse_rate_asymmetric(20.0, 1.0, 10.0).unwrap(), 1.0, 1e-14);
        close(
            converse_rate_asymmetric(0.01, 1.0, 10.0).unwrap(),
            5.514_796_398_415_138,
            1e-12,
        );
        // monotone decreasing in E
        let mut prev = f64::INFINITY;
        for &e in &[0.01, 0.1, 1.0, 10.0] {
            let v = converse_rate_asymmetric(e, 1.0, 10.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        assert!(matches!(
            converse_rate_asymmetric(0.0, 1.0, 10.0),
            Err(BoundsError::NonPositiveExponent(_))
        ));
    }

    #[test]
    fn asymmetric_packing_radius_values() {
        close(packing_radius_asymmetric(2, 1.0, 1.0).unwrap(), 1.0, 1e-15);
        close(
            packing_radius_asymmetric(8, 0.25, 0.5).unwrap(),
            1.414_213_562_373_095_1,
            1e-12,
        );
        assert!(packing_radius_asymmetric(8, 1e-12, 1.0).unwrap() > 0.0);
        assert!(packing_radius_asymmetric(8, 0.0, 1.0).is_err());
    }

    #[test]
    fn ball_volume_values() {
        close(log_ball_volume(2, 1.0), std::f64::consts::PI.ln(), 1e-13);
        close(
            log_ball_volume(3, 1.0),
            (4.0 * std::f64::consts::PI / 3.0).ln(),
            1e-13,
        );
        close(log_ball_volume(1, 2.0), 4.0f64.ln(), 1e-13);
    }

    #[test]
    fn packing_count_upper_values() {
        close(log2_packing_count_upper(1, 1.0, 1.0).unwrap(), 1.0, 1e-13);
        let r = 2.0 * (8.0f64 * 10.0).sqrt();
        close(log2_packing_count_upper(8, 10.0, r).unwrap(), 0.0, 1e-12);
        close(
            log2_packing_count_upper(8, 10.0, 1.0).unwrap(),
            33.287_712_379_549_45,
            1e-10,
        );
        assert!(log2_packing_count_upper(8, 10.0, 0.0).is_err());
    }

    fn awgn_cache(n: usize, sigma2: f64) -> SpectralCache<f64> {
        let ch = preset(Preset::Awgn { n, sigma2, p: 1.0 }).unwrap();
        spectral_cache(&ch).unwrap()
    }

    #[test]
    fn decoder_threshold_values() {
        let c8 = awgn_cache(8, 1.0);
        close(decoder_threshold(8, 1.0, &c8).unwrap(), 40.0, 1e-12);
        let c32 = awgn_cache(32, 1.0);
        close(decoder_threshold(32, 0.04, &c32).unwrap(), 57.6, 1e-10);
        // E1 > 1 branch
        close(decoder_threshold(8, 4.0, &c8).unwrap(), 8.0 * 17.0, 1e-10);
        assert!(decoder_threshold(8, 0.0, &c8).is_err());
    }

    #[test]
    fn feasibility_and_type2() {
        // P = 10, nu_M = 1, eps^2 = 0.05, E1 = 0.04: 0.5 > 0.2
        let eps = 0.05f64.sqrt();
        assert!(feasibility(eps, 0.04, 1.0, 10.0).unwrap());
        // exact boundary is infeasible (strict inequality)
        let eps_b = (1.0f64 * 0.2 / 10.0).sqrt();
        assert!(!feasibility(eps_b, 0.04, 1.0, 10.0).unwrap());
        assert!(matches!(
            type2_exponent(eps_b, 0.04, 1.0, 10.0),
            Err(BoundsError::Infeasible { .. })
        ));
        assert!(matches!(
            feasibility(0.4, 0.04, 1.0, 10.0),
            Err(BoundsError::EpsOutOfRange(_))
        ));

        // Theorem-3 epsilon with tau = 1, E1 = 0.01, P/nu_M = 9 gives E2 = 0.002
        let p = 9.0;
        let nu = 1.0;
        let eps_t = ((1.0 + 1.0) * nu * 0.1 / p as f64).sqrt();
        close(type2_exponent(eps_t, 0.01, nu, p).unwrap(), 0.002, 1e-15);

        // monotone increasing in eps above the boundary
        let mut prev = 0.0;
        for k in 1..=5 {
            let e = 0.15 + 0.03 * k as f64;
            let v = type2_exponent(e, 0.04, 1.0, 10.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn linear_rate_values() {
        let r = achievable_rate_linear(0.01, 0.1, 1.0, 10.0).unwrap();
        close(r.rate_bits, 2.093_327_915_417_329_6, 1e-12);
        assert!(!r.degenerate);
        close(r.eps * r.eps, 1.1 * 0.1 / 10.0, 1e-15);
        close(r.e2, 2.0 * 0.01 * 0.01 / (1.0 + 10.0), 1e-15);

        // degenerate rate clamps to zero with a flag
        let d = achievable_rate_linear(0.9, 0.2, 1.0, 10.0).unwrap();
        assert!(d.degenerate);
        assert_eq!(d.rate_bits, 0.0);

        // eps >= 1/3 violates the hypothesis
        assert!(matches!(
            achievable_rate_linear(1.0, 2.0, 1.0, 10.0),
            Err(BoundsError::HypothesisViolated(_))
        ));
        assert!(achievable_rate_linear(0.0, 0.1, 1.0, 10.0).is_err());

        // increasing tau decreases R, increases E2
        let lo = achievable_rate_linear(0.01, 0.1, 1.0, 10.0).unwrap();
        let hi = achievable_rate_linear(0.01, 0.5, 1.0, 10.0).unwrap();
        assert!(hi.rate_bits < lo.rate_bits);
        assert!(hi.e2 > lo.e2);
    }

    #[test]
    fn linear_rate_big_exponent_branch() {
        // E1 > 1 uses E1 in place of sqrt(E1) throughout.
        let r = achievable_rate_linear(2.0, 0.1, 1.0, 100.0).unwrap();
        close(r.eps * r.eps, 1.1 * 2.0 / 100.0, 1e-15);
        close(r.e2, 2.0 * 0.01 * 4.0 / (1.0 + 100.0), 1e-15);
    }

    #[test]
    fn linearithmic_values() {
        let r = achievable_rate_linearithmic(64, 0.5, 0.5, 1.0, 16.0).unwrap();
        close(r.e1, 0.125, 1e-15);
        close(r.e2, 2.0 * 0.25 * 0.125 / 17.0, 1e-15);
        // normalized rate - beta/4 = (1/2) log2(P/(16(1+tau)nu)) / log2 n
        let c = 0.5 * (16.0f64 / (16.0 * 1.5)).log2();
        close(r.normalized_rate - 0.125, c / 64.0f64.log2(), 1e-13);
        assert!(achievable_rate_linearithmic(64, 1.0, 0.5, 1.0, 16.0).is_err());
        assert!(achievable_rate_linearithmic(64, 0.5, 0.0, 1.0, 16.0).is_err());
    }

    #[test]
    fn exponent_lambda_round_trip() {
        close(exponent_from_lambda(1.0, 10).unwrap(), 0.0, 0.0);
        close(exponent_from_lambda((-10.0f64).exp(), 10).unwrap(), 1.0, 1e-12);
        close(
            exponent_from_lambda(0.01, 10).unwrap(),
            0.460_517_018_598_809_14,
            1e-14,
        );
        for &(lam, n) in &[(0.37f64, 5usize), (1e-8, 100), (0.999, 3)] {
            let e = exponent_from_lambda(lam, n).unwrap();
            let back = lambda_from_exponent(e, n).unwrap();
            assert!((back - lam).abs() <= 1e-12 * lam);
        }
        assert!(exponent_from_lambda(0.0, 4).is_err());
        assert!(exponent_from_lambda(1.5, 4).is_err());
        assert!(lambda_from_exponent(-0.1, 4).is_err());
    }

    #[test]
    fn report_symmetric_and_stein() {
        let cache = awgn_cache(8, 1.0);
        // equal exponents: both converses evaluated at the same E
        let rep = bound_report(8, Some(0.5), Some(0.5), &cache, 1.0);
        assert_eq!(rep.e_min, Some(0.5));
        assert_eq!(rep.e_max, Some(0.5));
        assert!(rep.conv_symmetric_bits.is_some());
        assert!(rep.conv_asymmetric_bits.is_some());
        assert!(rep.log2_n_upper.is_some());

        // Stein regime: E1 absent, Theorem 1 inapplicable, Theorem 2 uses E2
        let rep = bound_report(8, None, Some(0.5), &cache, 1.0);
        assert!(rep.conv_symmetric_bits.is_none());
        close(
            rep.conv_asymmetric_bits.unwrap(),
            converse_rate_asymmetric(0.5, 1.0, 1.0).unwrap(),
            1e-14,
        );
        assert!(!rep.notes.is_empty());

        // zero exponent treated as absent
        let rep = bound_report(8, Some(0.0), Some(0.5), &cache, 1.0);
        assert!(rep.conv_symmetric_bits.is_none());
    }

    #[test]
    fn converse_monotone_in_e_and_nu_p() {
        let mut prev = f64::INFINITY;
        for k in 1..=6 {
            let e = 0.4 + 0.2 * k as f64;
            let v = converse_rate_symmetric(64, e, 1.0, 1.0).unwrap();
            assert!(v < prev);
            prev = v;
        }
        let mut prev = f64::NEG_INFINITY;
        for k in 1..=6 {
            let nu_p = k as f64;
            let v = converse_rate_symmetric(64, 1.0, nu_p, 1.0).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn proof_chain_consistency() {
        // log2_packing_count_upper(n, P, r_sym(n, E)) / n never exceeds the
        // closed-form symmetric converse when nE >= ln 16.
        for &n in &[4usize, 8, 32, 128] {
            for &e in &[1.0f64, 0.75, 2.0] {
                for &p in &[1.0f64, 10.0] {
                    if (n as f64) * e < 16.0f64.ln() {
                        continue;
                    }
                    let r = packing_radius_symmetric(n, e, 1.0).unwrap();
                    if r <= 0.0 {
                        continue;
                    }
                    let lhs = log2_packing_count_upper(n, p, r).unwrap() / n as f64;
                    let rhs = converse_rate_symmetric(n, e, 1.0, p).unwrap();
                    assert!(lhs <= rhs + 1e-9, "n={n} e={e} p={p}: {lhs} > {rhs}");
                }
            }
        }
    }

    #[test]
    fn constant_exponent_rate_is_n_free_and_c_over_n_recovers_half_log_n() {
        let base = converse_rate_symmetric(8, 0.5, 1.0, 1.0).unwrap();
        for k in 4..=10 {
            let n = 1usize << k;
            assert_eq!(converse_rate_symmetric(n, 0.5, 1.0, 1.0).unwrap(), base);
        }
        let c = 4.0;
        let anchor = converse_rate_symmetric(8, c / 8.0, 1.0, 1.0).unwrap() - 0.5 * 8.0f64.log2();
        for k in 4..=10 {
            let n = 1usize << k;
            let v = converse_rate_symmetric(n, c / n as f64, 1.0, 1.0).unwrap()
                - 0.5 * (n as f64).log2();
            close(v, anchor, 1e-12);
        }
    }
}
