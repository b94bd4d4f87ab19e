//! Power-constrained sphere packings of codewords and their certificates.
//!
//! The constructive route is greedy random saturation: candidates are drawn
//! uniformly from the ball the power budget leaves for centres and accepted
//! when farther than `2r` from every accepted codeword. A packing that the
//! budget has saturated covers the centre ball with radius-`2r` balls, which
//! is what yields the `((1−ε)/2ε)ⁿ` size guarantee.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StandardUniform};
use thiserror::Error;

use crate::bounds;
use crate::channel::{ChannelModel, SpectralCache};
use crate::decoder::DecoderSpec;
use crate::rng::{stream_rng, STREAM_CODEBOOK};
use crate::scalar::Real;

/// Hard ceiling on constructible codebooks (log₂): larger packings are
/// refused and only formula-path results are available.
pub const HARD_LOG2_CAP: u32 = 20;
/// Default codeword cap for [`construct_greedy`].
pub const DEFAULT_MAX_CODEWORDS: usize = 1 << HARD_LOG2_CAP;
/// Consecutive-rejection budget per codeword of saturation target.
pub const BUDGET_PER_TARGET_CODEWORD: u64 = 5000;
/// Fresh-seed retries of a greedy run that fell short of the saturation
/// target.
pub const MAX_SATURATION_RETRIES: u32 = 3;

#[derive(Debug, Error)]
pub enum CodebookError {
    #[error("rejection budget must be at least 1")]
    BudgetZero,
    #[error("packing radius must satisfy 0 < r < sqrt(nP), got r = {r} with sqrt(nP) = {limit}")]
    InvalidRadius { r: f64, limit: f64 },
    #[error("invalid codebook: {0}")]
    InvalidCodebook(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error(
        "size cap exceeded: predicted log2 N = {predicted_log2_n:.2} > cap {cap_log2} \
         (formula-path results remain available)"
    )]
    SizeCapExceeded { predicted_log2_n: f64, cap_log2: u32 },
    #[error("greedy saturation fell short: reached {achieved} of {target} after {attempts} runs")]
    SaturationShortfall {
        achieved: usize,
        target: u64,
        attempts: u32,
    },
}

/// A certified packing: `N` codewords inside the centre ball
/// `‖u‖ ≤ √(nP) − r`, pairwise farther than `2r`.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook<T: Real> {
    n: usize,
    codewords: Vec<DVector<T>>,
    r: T,
    eps: T,
    p: T,
    min_pairwise_dist: T,
    seed: u64,
}

impl<T: Real> Codebook<T> {
    /// Assemble a codebook from raw parts, validating every invariant.
    /// `min_pairwise_dist` is recomputed exhaustively.
    pub fn from_parts(
        n: usize,
        codewords: Vec<DVector<T>>,
        r: T,
        p: T,
        seed: u64,
    ) -> Result<Self, CodebookError> {
        let np_sqrt = (T::of_usize(n) * p).sqrt();
        if !(r > T::zero()) || !(r < np_sqrt) {
            return Err(CodebookError::InvalidRadius {
                r: r.as_f64(),
                limit: np_sqrt.as_f64(),
            });
        }
        if codewords.is_empty() {
            return Err(CodebookError::InvalidCodebook("no codewords".into()));
        }
        let norm_limit = np_sqrt - r;
        for (i, w) in codewords.iter().enumerate() {
            if w.len() != n {
                return Err(CodebookError::InvalidCodebook(format!(
                    "codeword {i} has length {}, expected {n}",
                    w.len()
                )));
            }
            if w.norm() > norm_limit {
                return Err(CodebookError::InvalidCodebook(format!(
                    "codeword {i} has norm {} beyond sqrt(nP) - r = {}",
                    w.norm().as_f64(),
                    norm_limit.as_f64()
                )));
            }
        }
        let min_pairwise_dist = min_pairwise_distance(&codewords);
        if min_pairwise_dist <= T::lit(2.0) * r {
            return Err(CodebookError::InvalidCodebook(format!(
                "min pairwise distance {} does not exceed 2r = {}",
                min_pairwise_dist.as_f64(),
                (T::lit(2.0) * r).as_f64()
            )));
        }
        let eps = r / np_sqrt;
        Ok(Codebook {
            n,
            codewords,
            r,
            eps,
            p,
            min_pairwise_dist,
            seed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.codewords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn codewords(&self) -> &[DVector<T>] {
        &self.codewords
    }

    pub fn codeword(&self, i: usize) -> &DVector<T> {
        &self.codewords[i]
    }

    /// Declared packing radius.
    pub fn r(&self) -> T {
        self.r
    }

    /// `ε = r / √(nP)`.
    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn p(&self) -> T {
        self.p
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Minimum pairwise distance (`+∞` for a single codeword).
    pub fn min_pairwise_dist(&self) -> T {
        self.min_pairwise_dist
    }

    pub fn log2_len(&self) -> T {
        T::of_usize(self.len()).log2_()
    }
}

fn dist_sq<T: Real>(a: &DVector<T>, b: &DVector<T>) -> T {
    let mut acc = T::zero();
    for i in 0..a.len() {
        let d = a[i] - b[i];
        acc += d * d;
    }
    acc
}

fn min_pairwise_distance<T: Real>(words: &[DVector<T>]) -> T {
    let mut min_sq = T::lit(f64::INFINITY);
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            let d = dist_sq(&words[i], &words[j]);
            if d < min_sq {
                min_sq = d;
            }
        }
    }
    min_sq.sqrt()
}

/// Uniform draw from the solid ball of radius `rho`: a normalized standard
/// normal direction scaled by `rho·U^{1/n}`. Draw order is the `n` normals,
/// then the uniform.
pub fn sample_uniform_ball<T: Real, R: Rng + ?Sized>(n: usize, rho: T, rng: &mut R) -> DVector<T>
where
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    loop {
        let mut g = DVector::zeros(n);
        for i in 0..n {
            g[i] = rng.sample(StandardNormal);
        }
        let norm = g.norm();
        let u: T = rng.sample(StandardUniform);
        if norm > T::zero() {
            let radius = rho * u.powf(T::one() / T::of_usize(n));
            return g * (radius / norm);
        }
    }
}

fn greedy_run<T: Real>(
    n: usize,
    r: T,
    p: T,
    seed: u64,
    attempt: u64,
    budget: u64,
    max_codewords: usize,
) -> Codebook<T>
where
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    let np_sqrt = (T::of_usize(n) * p).sqrt();
    let center_radius = np_sqrt - r;
    let min_allowed_sq = T::lit(4.0) * r * r;

    let mut rng = stream_rng(seed, STREAM_CODEBOOK, attempt);
    let mut words: Vec<DVector<T>> = Vec::new();
    let mut min_dist_sq = T::lit(f64::INFINITY);
    let mut consecutive_rejections = 0u64;

    while words.len() < max_codewords {
        let cand = sample_uniform_ball(n, center_radius, &mut rng);
        let mut accept = true;
        let mut cand_min = T::lit(f64::INFINITY);
        for w in &words {
            let d = dist_sq(w, &cand);
            if d <= min_allowed_sq {
                accept = false;
                break;
            }
            if d < cand_min {
                cand_min = d;
            }
        }
        if accept {
            if cand_min < min_dist_sq {
                min_dist_sq = cand_min;
            }
            words.push(cand);
            consecutive_rejections = 0;
        } else {
            consecutive_rejections += 1;
            if consecutive_rejections >= budget {
                break;
            }
        }
    }

    let eps = r / np_sqrt;
    Codebook {
        n,
        codewords: words,
        r,
        eps,
        p,
        min_pairwise_dist: min_dist_sq.sqrt(),
        seed,
    }
}

/// Greedy construction with the default codeword cap.
///
/// Draws candidates until `budget` consecutive rejections occur or the cap is
/// reached. The first draw always lands, so the result is never empty. Fixed
/// seeds give bit-identical codebooks.
pub fn construct_greedy<T: Real>(
    n: usize,
    r: T,
    p: T,
    seed: u64,
    budget: u64,
) -> Result<Codebook<T>, CodebookError>
where
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    construct_greedy_capped(n, r, p, seed, budget, DEFAULT_MAX_CODEWORDS)
}

/// [`construct_greedy`] with an explicit codeword cap.
pub fn construct_greedy_capped<T: Real>(
    n: usize,
    r: T,
    p: T,
    seed: u64,
    budget: u64,
    max_codewords: usize,
) -> Result<Codebook<T>, CodebookError>
where
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    if budget == 0 {
        return Err(CodebookError::BudgetZero);
    }
    let np_sqrt = (T::of_usize(n) * p).sqrt();
    if !(r > T::zero()) || !(r < np_sqrt) {
        return Err(CodebookError::InvalidRadius {
            r: r.as_f64(),
            limit: np_sqrt.as_f64(),
        });
    }
    if max_codewords == 0 {
        return Err(CodebookError::InvalidCodebook("codeword cap is zero".into()));
    }
    Ok(greedy_run(n, r, p, seed, 0, budget, max_codewords))
}

/// What a codebook certification reports: exhaustively recomputed extremes
/// checked against the declared radius and power budget, plus the volumetric
/// converse on the code size.
#[derive(Debug, Clone, PartialEq)]
pub struct PackingCertificate<T: Real> {
    pub n_codewords: usize,
    /// Exhaustive min pairwise distance (`+∞` for one codeword).
    pub min_pairwise_dist: T,
    pub max_norm: T,
    /// Required separation `2r`.
    pub dist_threshold: T,
    /// Required centre bound `√(nP) − r`.
    pub norm_threshold: T,
    pub dist_ok: bool,
    pub norm_ok: bool,
    pub log2_n: T,
    /// Volumetric upper bound on `log₂ N` at this `(n, P, r)`.
    pub log2_n_upper: T,
    pub converse_ok: bool,
    pub pass: bool,
}

/// Re-verify a codebook's invariants by exhaustive pairwise computation.
/// Failures are reported in the certificate, never raised.
pub fn certify_packing<T: Real>(cb: &Codebook<T>) -> PackingCertificate<T> {
    let min_pairwise_dist = min_pairwise_distance(&cb.codewords);
    let max_norm = cb
        .codewords
        .iter()
        .map(|w| w.norm())
        .fold(T::zero(), T::max);
    let np_sqrt = (T::of_usize(cb.n) * cb.p).sqrt();
    let dist_threshold = T::lit(2.0) * cb.r;
    let norm_threshold = np_sqrt - cb.r;
    let dist_ok = min_pairwise_dist > dist_threshold;
    let norm_ok = max_norm <= norm_threshold;
    let log2_n = cb.log2_len();
    let log2_n_upper = bounds::log2_packing_count_upper(cb.n, cb.p, cb.r)
        .unwrap_or_else(|_| T::lit(f64::NEG_INFINITY));
    let converse_ok = log2_n <= log2_n_upper;
    PackingCertificate {
        n_codewords: cb.len(),
        min_pairwise_dist,
        max_norm,
        dist_threshold,
        norm_threshold,
        dist_ok,
        norm_ok,
        log2_n,
        log2_n_upper,
        converse_ok,
        pass: dist_ok && norm_ok && converse_ok,
    }
}

/// A code produced by the distance-decoding achievability route: the packing,
/// its decoder, and the predicted type-II exponent.
#[derive(Debug, Clone, PartialEq)]
pub struct Theorem3Code<T: Real> {
    pub codebook: Codebook<T>,
    pub decoder: DecoderSpec<T>,
    /// Predicted type-II exponent (nats).
    pub e2: T,
    /// Packing ratio `ε = √((1+τ)·ν_M·√E₁/P)`.
    pub eps: T,
    /// Saturation target `⌈((1−ε)/2ε)ⁿ⌉`.
    pub saturation_target: u64,
    /// Greedy runs consumed (1 = first run saturated).
    pub attempts: u32,
}

/// Saturation lower bound `⌈((1−ε)/2ε)ⁿ⌉` as used by the achievability
/// construction, and its log₂ (useful before deciding to construct).
pub fn predicted_log2_size<T: Real>(n: usize, eps: T) -> T {
    T::of_usize(n) * ((T::one() - eps) / (T::lit(2.0) * eps)).log2_()
}

/// Run the full achievability construction: pick `ε` from `(E₁, τ)`, build
/// the greedy packing to saturation, and pair it with the distance decoder.
///
/// `log2_n_cap` guards desk-scale feasibility: predicted sizes above it (or
/// above the hard cap of 2^20 codewords) are refused with
/// [`CodebookError::SizeCapExceeded`]. A run that misses the saturation
/// target is retried with a fresh derived seed up to
/// [`MAX_SATURATION_RETRIES`] times.
pub fn construct_from_theorem3<T: Real>(
    ch: &ChannelModel<T>,
    cache: &SpectralCache<T>,
    e1: T,
    tau: T,
    seed: u64,
    log2_n_cap: u32,
) -> Result<Theorem3Code<T>, CodebookError>
where
    StandardNormal: Distribution<T>,
    StandardUniform: Distribution<T>,
{
    let n = ch.n();
    let linear = bounds::achievable_rate_linear(e1, tau, cache.sigma_eig_max, ch.p())
        .map_err(|e| CodebookError::HypothesisViolated(e.to_string()))?;
    let eps = linear.eps;
    match bounds::feasibility(eps, e1, cache.sigma_eig_max, ch.p()) {
        Ok(true) => {}
        Ok(false) => {
            return Err(CodebookError::HypothesisViolated(
                "feasibility margin eps^2 P - nu_M sqrt(E1) is not positive".into(),
            ))
        }
        Err(e) => return Err(CodebookError::HypothesisViolated(e.to_string())),
    }

    let predicted = predicted_log2_size(n, eps);
    let cap = log2_n_cap.min(HARD_LOG2_CAP);
    if predicted.as_f64() > cap as f64 {
        return Err(CodebookError::SizeCapExceeded {
            predicted_log2_n: predicted.as_f64(),
            cap_log2: log2_n_cap,
        });
    }
    let target = predicted.as_f64().exp2().ceil() as u64;
    let budget = BUDGET_PER_TARGET_CODEWORD * n as u64 * target.max(1);
    let max_codewords = 1usize << cap;

    let r = eps * ch.power_radius();
    let decoder = DecoderSpec::for_channel(n, e1, cache)
        .map_err(|e| CodebookError::HypothesisViolated(e.to_string()))?;

    let mut best: Option<Codebook<T>> = None;
    for attempt in 0..=MAX_SATURATION_RETRIES {
        let cb = greedy_run(n, r, ch.p(), seed, attempt as u64, budget, max_codewords);
        if cb.len() as u64 >= target {
            return Ok(Theorem3Code {
                codebook: cb,
                decoder,
                e2: linear.e2,
                eps,
                saturation_target: target,
                attempts: attempt + 1,
            });
        }
        if best.as_ref().map_or(true, |b| cb.len() > b.len()) {
            best = Some(cb);
        }
    }
    Err(CodebookError::SaturationShortfall {
        achieved: best.map_or(0, |b| b.len()),
        target,
        attempts: MAX_SATURATION_RETRIES + 1,
    })
}
