//! Empirical estimation of the two identification error probabilities.
//!
//! Both estimators report the worst case over messages (resp. ordered pairs),
//! matching the universal quantifier in the DI code definition; the average
//! across cells is kept as a secondary statistic. Every trial derives its own
//! generator from `(master_seed, stream, cell*trials + trial)` and counts are
//! integers, so estimates are reproducible under any execution schedule.

use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::channel::{sample_output, ChannelModel, SpectralCache};
use crate::codebook::Codebook;
use crate::decoder::{identify, DecoderSpec};
use crate::rng::{stream_rng, STREAM_LAMBDA1, STREAM_LAMBDA2};
use crate::scalar::Real;
use crate::special::normal_quantile;

#[derive(Debug, Error)]
pub enum MonteCarloError {
    #[error("need at least 2 codewords for a false-identification estimate, got {0}")]
    InsufficientCodebook(usize),
    #[error("argument out of range: {0}")]
    OutOfRange(String),
}

/// Which error probability an estimate refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Missed identification: the tested message was sent, the test rejected.
    Missed,
    /// False identification: another message was sent, the test accepted.
    FalseId,
}

/// The cell achieving the reported worst-case estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorstCase {
    Message(usize),
    Pair { sent: usize, tested: usize },
}

/// A Monte Carlo probability estimate with its Wilson score interval.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorEstimate<T: Real> {
    /// Worst-case estimate over messages/pairs.
    pub p_hat: T,
    /// Trials per message (resp. per ordered pair).
    pub trials: u64,
    /// Wilson interval at `level` for the worst cell.
    pub ci_low: T,
    pub ci_high: T,
    pub kind: ErrorKind,
    pub worst: WorstCase,
    /// Two-sided confidence level of the Wilson interval.
    pub level: T,
    /// Average estimate across all tested cells (secondary statistic).
    pub mean_p: T,
    /// False when a pair strategy restricted the tested pairs; the reported
    /// maximum is then a lower bound on the true worst case.
    pub exhaustive: bool,
    /// Number of cells (messages or ordered pairs) tested.
    pub cells: usize,
}

/// Which ordered pairs the false-identification estimator visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStrategy {
    /// Every ordered pair `(i, j)`, `i ≠ j`.
    All,
    /// For each tested message `i`, only the `k` senders `j` with the
    /// smallest `‖A(u_j − u_i)‖` — the dominant error events.
    NearestK(usize),
}

impl PairStrategy {
    /// Exhaustive up to 256 ordered pairs per message, nearest-8 beyond.
    pub fn default_for(n_messages: usize) -> Self {
        if n_messages.saturating_sub(1) <= 256 {
            PairStrategy::All
        } else {
            PairStrategy::NearestK(8)
        }
    }
}

/// Confidence level used when none is configured.
pub const DEFAULT_CI_LEVEL: f64 = 0.95;

/// Wilson score interval for `successes` out of `trials` at the given
/// two-sided level. Degenerate counts (0 or all) stay inside `[0, 1]`
/// without blowups.
pub fn binomial_ci<T: Real>(
    successes: u64,
    trials: u64,
    level: T,
) -> Result<(T, T), MonteCarloError> {
    if trials == 0 {
        return Err(MonteCarloError::OutOfRange("trials must be positive".into()));
    }
    if successes > trials {
        return Err(MonteCarloError::OutOfRange(format!(
            "successes {successes} exceed trials {trials}"
        )));
    }
    if !(level > T::zero() && level < T::one()) {
        return Err(MonteCarloError::OutOfRange(format!(
            "level must lie in (0,1), got {}",
            level.as_f64()
        )));
    }
    let z = normal_quantile((T::one() + level) * T::lit(0.5));
    let n = T::lit(trials as f64);
    let p = T::lit(successes as f64) / n;
    let z2 = z * z;
    let denom = T::one() + z2 / n;
    let center = (p + z2 / (T::lit(2.0) * n)) / denom;
    let half = z * (p * (T::one() - p) / n + z2 / (T::lit(4.0) * n * n)).sqrt() / denom;
    let low = (center - half).max(T::zero());
    let high = (center + half).min(T::one());
    Ok((low, high))
}

fn finish_estimate<T: Real>(
    counts: &[u64],
    trials: u64,
    kind: ErrorKind,
    worst_of: impl Fn(usize) -> WorstCase,
    exhaustive: bool,
) -> ErrorEstimate<T> {
    let mut worst_idx = 0usize;
    for (i, &c) in counts.iter().enumerate() {
        if c > counts[worst_idx] {
            worst_idx = i;
        }
    }
    let worst_count = counts[worst_idx];
    let p_hat = T::lit(worst_count as f64) / T::lit(trials as f64);
    let level = T::lit(DEFAULT_CI_LEVEL);
    let (ci_low, ci_high) =
        binomial_ci(worst_count, trials, level).expect("valid Wilson arguments");
    let total: u64 = counts.iter().sum();
    let mean_p = T::lit(total as f64) / (T::lit(trials as f64) * T::of_usize(counts.len()));
    ErrorEstimate {
        p_hat,
        trials,
        ci_low,
        ci_high,
        kind,
        worst: worst_of(worst_idx),
        level,
        mean_p,
        exhaustive,
        cells: counts.len(),
    }
}

/// Estimate the missed-identification probability `λ₁`: for each message `i`,
/// send `uᵢ` and count rejections of test `i`; report the worst message.
pub fn estimate_lambda1<T: Real>(
    cb: &Codebook<T>,
    spec: &DecoderSpec<T>,
    ch: &ChannelModel<T>,
    cache: &SpectralCache<T>,
    trials_per_msg: u64,
    master_seed: u64,
) -> ErrorEstimate<T>
where
    StandardNormal: Distribution<T>,
{
    assert_eq!(cb.n(), ch.n(), "codebook and channel block lengths differ");
    assert!(trials_per_msg >= 1, "need at least one trial per message");
    let n_msgs = cb.len();
    let mut counts = vec![0u64; n_msgs];
    for (i, count) in counts.iter_mut().enumerate() {
        let u = cb.codeword(i);
        for t in 0..trials_per_msg {
            let mut rng = stream_rng(
                master_seed,
                STREAM_LAMBDA1,
                i as u64 * trials_per_msg + t,
            );
            let y = sample_output(ch, cache, u, &mut rng);
            if !identify(&y, u, ch.a(), spec).expect("dimensions validated") {
                *count += 1;
            }
        }
    }
    finish_estimate(&counts, trials_per_msg, ErrorKind::Missed, WorstCase::Message, true)
}

/// The ordered pairs a strategy selects, in deterministic order.
pub fn select_pairs<T: Real>(cb: &Codebook<T>, ch: &ChannelModel<T>, strategy: PairStrategy) -> Vec<(usize, usize)> {
    let n_msgs = cb.len();
    match strategy {
        PairStrategy::All => {
            let mut pairs = Vec::with_capacity(n_msgs * (n_msgs - 1));
            for i in 0..n_msgs {
                for j in 0..n_msgs {
                    if i != j {
                        pairs.push((i, j));
                    }
                }
            }
            pairs
        }
        PairStrategy::NearestK(k) => {
            let transformed: Vec<_> = cb.codewords().iter().map(|u| ch.a() * u).collect();
            let mut pairs = Vec::with_capacity(n_msgs * k.min(n_msgs - 1));
            for i in 0..n_msgs {
                let mut dists: Vec<(T, usize)> = (0..n_msgs)
                    .filter(|&j| j != i)
                    .map(|j| ((&transformed[j] - &transformed[i]).norm_squared(), j))
                    .collect();
                dists.sort_by(|a, b| {
                    a.0.partial_cmp(&b.0)
                        .expect("finite distances")
                        .then(a.1.cmp(&b.1))
                });
                for &(_, j) in dists.iter().take(k) {
                    pairs.push((i, j));
                }
            }
            pairs
        }
    }
}

/// Estimate the false-identification probability `λ₂`: for ordered pairs
/// `(i, j)`, send `u_j` and count acceptances of test `i`; report the worst
/// pair. `NearestK` restricts to the dominant pairs and marks the estimate as
/// non-exhaustive (a lower bound for the max statistic).
pub fn estimate_lambda2<T: Real>(
    cb: &Codebook<T>,
    spec: &DecoderSpec<T>,
    ch: &ChannelModel<T>,
    cache: &SpectralCache<T>,
    trials_per_pair: u64,
    strategy: PairStrategy,
    master_seed: u64,
) -> Result<ErrorEstimate<T>, MonteCarloError>
where
    StandardNormal: Distribution<T>,
{
    assert_eq!(cb.n(), ch.n(), "codebook and channel block lengths differ");
    assert!(trials_per_pair >= 1, "need at least one trial per pair");
    let n_msgs = cb.len();
    if n_msgs < 2 {
        return Err(MonteCarloError::InsufficientCodebook(n_msgs));
    }
    let pairs = select_pairs(cb, ch, strategy);
    let mut counts = vec![0u64; pairs.len()];
    for (idx, &(i, j)) in pairs.iter().enumerate() {
        let tested = cb.codeword(i);
        let sent = cb.codeword(j);
        let cell = (i * n_msgs + j) as u64;
        for t in 0..trials_per_pair {
            let mut rng = stream_rng(
                master_seed,
                STREAM_LAMBDA2,
                cell * trials_per_pair + t,
            );
            let y = sample_output(ch, cache, sent, &mut rng);
            if identify(&y, tested, ch.a(), spec).expect("dimensions validated") {
                counts[idx] += 1;
            }
        }
    }
    let exhaustive = matches!(strategy, PairStrategy::All);
    Ok(finish_estimate(
        &counts,
        trials_per_pair,
        ErrorKind::FalseId,
        |idx| {
            let (i, j) = pairs[idx];
            WorstCase::Pair { sent: j, tested: i }
        },
        exhaustive,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{preset, Preset};
    use crate::channel::spectral_cache;
    use crate::codebook::construct_greedy;
    use crate::decoder::ExponentRegime;
    use crate::oracle;
    use nalgebra::DVector;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn spec(threshold: f64) -> DecoderSpec<f64> {
        DecoderSpec {
            threshold,
            e1: 0.5,
            regime: ExponentRegime::Sqrt,
        }
    }

    #[test]
    fn wilson_interval_values() {
        let (low, high) = binomial_ci::<f64>(0, 100, 0.95).unwrap();
        assert_eq!(low, 0.0);
        close(high, 0.036_993_498_206_985_68, 1e-9);

        let (low, high) = binomial_ci::<f64>(50, 100, 0.95).unwrap();
        close((low + high) / 2.0, 0.5, 1e-12);

        let (_, high) = binomial_ci::<f64>(100, 100, 0.95).unwrap();
        assert_eq!(high, 1.0);

        assert!(binomial_ci::<f64>(5, 0, 0.95).is_err());
        assert!(binomial_ci::<f64>(5, 4, 0.95).is_err());
        assert!(binomial_ci::<f64>(1, 4, 1.0).is_err());
    }

    fn tiny_codebook(n: usize, p: f64) -> (Codebook<f64>, ChannelModel<f64>, SpectralCache<f64>) {
        let ch = preset(Preset::Awgn { n, sigma2: 1.0, p }).unwrap();
        let cache = spectral_cache(&ch).unwrap();
        let cb = construct_greedy(n, 0.3 * (n as f64 * p).sqrt(), p, 5, 20_000).unwrap();
        (cb, ch, cache)
    }

    #[test]
    fn infinite_threshold_never_misses() {
        let (cb, ch, cache) = tiny_codebook(4, 5.0);
        let est = estimate_lambda1(&cb, &spec(f64::INFINITY), &ch, &cache, 200, 1);
        assert_eq!(est.p_hat, 0.0);
        assert_eq!(est.ci_low, 0.0);
        assert!(est.ci_high > 0.0);
        assert_eq!(est.kind, ErrorKind::Missed);
    }

    #[test]
    fn zero_threshold_never_falsely_identifies() {
        let (cb, ch, cache) = tiny_codebook(4, 5.0);
        assert!(cb.len() >= 2);
        let est =
            estimate_lambda2(&cb, &spec(1e-12), &ch, &cache, 200, PairStrategy::All, 1).unwrap();
        assert_eq!(est.p_hat, 0.0);
        assert!(est.exhaustive);
    }

    #[test]
    fn single_message_codebook_rejected_for_lambda2() {
        let ch = preset(Preset::Awgn { n: 2, sigma2: 1.0, p: 10.0 }).unwrap();
        let cache = spectral_cache(&ch).unwrap();
        let cb = Codebook::from_parts(2, vec![DVector::zeros(2)], 1.0, 10.0, 0).unwrap();
        let err =
            estimate_lambda2(&cb, &spec(1.0), &ch, &cache, 10, PairStrategy::All, 0).unwrap_err();
        assert!(matches!(err, MonteCarloError::InsufficientCodebook(1)));
    }

    #[test]
    fn lambda1_matches_chi_square_tail() {
        // Single codeword, Sigma = I_10, threshold 20:
        // miss probability is P(chi2_10 > 20) ~ 0.029253.
        let ch = preset(Preset::Awgn { n: 10, sigma2: 1.0, p: 1.0 }).unwrap();
        let cache = spectral_cache(&ch).unwrap();
        let cb = Codebook::from_parts(10, vec![DVector::zeros(10)], 0.5, 1.0, 0).unwrap();
        let trials = 40_000u64;
        let est = estimate_lambda1(&cb, &spec(20.0), &ch, &cache, trials, 9);
        let p = oracle::chi2_tail(10, 20.0).unwrap();
        close(p, 0.029_252_688_076_961_124, 1e-12);
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        close(est.p_hat, p, 3.0 * sd);
    }

    #[test]
    fn lambda2_matches_noncentral_chi_square() {
        // Two codewords at distance d in AWGN: acceptance of the wrong test is
        // the noncentral chi-square CDF at the threshold.
        let n = 4;
        let ch = preset(Preset::Awgn { n, sigma2: 1.0, p: 10.0 }).unwrap();
        let cache = spectral_cache(&ch).unwrap();
        let u0 = DVector::zeros(n);
        let mut u1 = DVector::zeros(n);
        u1[0] = 3.0;
        let cb = Codebook::from_parts(n, vec![u0, u1], 1.0, 10.0, 0).unwrap();
        let threshold = 8.0;
        let trials = 40_000u64;
        let est = estimate_lambda2(
            &cb,
            &spec(threshold),
            &ch,
            &cache,
            trials,
            PairStrategy::All,
            31,
        )
        .unwrap();
        let p = oracle::noncentral_chi2_cdf(n, 9.0, threshold).unwrap();
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        // worst == mean here up to noise; compare the mean (both pairs identical)
        close(est.mean_p, p, 3.0 * sd);
        assert!(est.p_hat >= est.mean_p);
        close(est.p_hat, p, 4.0 * sd);
    }

    #[test]
    fn estimates_are_reproducible() {
        let (cb, ch, cache) = tiny_codebook(4, 5.0);
        let s = spec(6.0);
        let a = estimate_lambda1(&cb, &s, &ch, &cache, 500, 77);
        let b = estimate_lambda1(&cb, &s, &ch, &cache, 500, 77);
        assert_eq!(a, b);
        let c = estimate_lambda2(&cb, &s, &ch, &cache, 300, PairStrategy::All, 77).unwrap();
        let d = estimate_lambda2(&cb, &s, &ch, &cache, 300, PairStrategy::All, 77).unwrap();
        assert_eq!(c, d);
        let e = estimate_lambda1(&cb, &s, &ch, &cache, 500, 78);
        assert_ne!(a, e);
    }

    #[test]
    fn nearest_k_selects_dominant_pairs() {
        let (cb, ch, cache) = tiny_codebook(4, 5.0);
        assert!(cb.len() >= 3, "need a few codewords, got {}", cb.len());
        let pairs_all = select_pairs(&cb, &ch, PairStrategy::All);
        assert_eq!(pairs_all.len(), cb.len() * (cb.len() - 1));
        let pairs_k = select_pairs(&cb, &ch, PairStrategy::NearestK(1));
        assert_eq!(pairs_k.len(), cb.len());
        // with k = N-1 the restricted strategy covers all ordered pairs
        let pairs_full = select_pairs(&cb, &ch, PairStrategy::NearestK(cb.len() - 1));
        assert_eq!(pairs_full.len(), pairs_all.len());

        let s = spec(6.0);
        let full = estimate_lambda2(&cb, &s, &ch, &cache, 400, PairStrategy::All, 3).unwrap();
        let restricted =
            estimate_lambda2(&cb, &s, &ch, &cache, 400, PairStrategy::NearestK(1), 3).unwrap();
        assert!(!restricted.exhaustive);
        // a restricted max is a lower bound on the exhaustive max
        assert!(restricted.p_hat <= full.p_hat);
    }

    #[test]
    fn default_strategy_switches_on_size() {
        assert_eq!(PairStrategy::default_for(10), PairStrategy::All);
        assert_eq!(PairStrategy::default_for(257), PairStrategy::All);
        assert_eq!(PairStrategy::default_for(258), PairStrategy::NearestK(8));
    }
}
