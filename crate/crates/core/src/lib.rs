//! Deterministic identification (DI) over linear Gaussian channels `Y = Ax + Z`.
//!
//! The crate bundles everything needed to study the rate–reliability tradeoff
//! of DI codes at finite block length:
//!
//! * [`channel`] — the channel model `(A, Σ, P)`, presets for classical
//!   special cases, derived spectral quantities, and noise sampling;
//! * [`divergences`] — closed-form statistical distances between channel
//!   output distributions (Mahalanobis, fidelity, Rényi, TV sandwich,
//!   hypothesis-testing relative entropy);
//! * [`bounds`] — converse and achievability rate formulas, error exponents,
//!   packing radii, and feasibility checks;
//! * [`codebook`] — greedy sphere-packing constructions with certificates;
//! * [`decoder`] — the distance-decoding identification test;
//! * [`montecarlo`] — seeded, reproducible estimation of both identification
//!   error probabilities with Wilson confidence intervals;
//! * [`oracle`] — independent references: adaptive quadrature of the
//!   divergence definitions at low dimension and (non)central chi-square
//!   distribution functions for white-noise channels.
//!
//! All numeric code is generic over the scalar type through [`scalar::Real`];
//! the aliases at the crate root fix `f64`, which is what the test suite and
//! the CLI use.

pub mod bounds;
pub mod channel;
pub mod codebook;
pub mod decoder;
pub mod divergences;
pub mod montecarlo;
pub mod oracle;
pub mod rng;
pub mod scalar;
pub mod special;

pub use scalar::Real;

/// `f64` channel model.
pub type ChannelModel64 = channel::ChannelModel<f64>;
/// `f64` spectral cache.
pub type SpectralCache64 = channel::SpectralCache<f64>;
/// `f64` pair geometry.
pub type PairGeometry64 = divergences::PairGeometry<f64>;
/// `f64` bound report.
pub type BoundReport64 = bounds::BoundReport<f64>;
/// `f64` codebook.
pub type Codebook64 = codebook::Codebook<f64>;
/// `f64` decoder specification.
pub type DecoderSpec64 = decoder::DecoderSpec<f64>;
/// `f64` Monte Carlo error estimate.
pub type ErrorEstimate64 = montecarlo::ErrorEstimate<f64>;
