//! Experiment configuration: a single JSON document driving every
//! subcommand.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use digauss::channel::{preset, ChannelModel, Preset};
use digauss::montecarlo::PairStrategy;

/// Channel description; presets take their block length from each grid cell.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Awgn {
        sigma2: f64,
        p: f64,
    },
    ScalarFading {
        gain: f64,
        sigma2: f64,
        p: f64,
    },
    DiagFading {
        gains: Vec<f64>,
        sigma2: f64,
        p: f64,
    },
    ToeplitzIsi {
        taps: Vec<f64>,
        sigma2: f64,
        p: f64,
    },
    /// Explicit matrices, row-major nested arrays.
    Explicit {
        a: Vec<Vec<f64>>,
        sigma: Vec<Vec<f64>>,
        p: f64,
    },
}

impl ChannelSpec {
    /// Instantiate at block length `n`. Specs with an intrinsic dimension
    /// (gains, explicit matrices) must agree with `n`.
    pub fn build(&self, n: usize) -> Result<ChannelModel<f64>> {
        let model = match self {
            ChannelSpec::Awgn { sigma2, p } => preset(Preset::Awgn {
                n,
                sigma2: *sigma2,
                p: *p,
            }),
            ChannelSpec::ScalarFading { gain, sigma2, p } => preset(Preset::ScalarFading {
                n,
                gain: *gain,
                sigma2: *sigma2,
                p: *p,
            }),
            ChannelSpec::DiagFading { gains, sigma2, p } => {
                if gains.len() != n {
                    bail!("diag_fading has {} gains but the cell wants n = {n}", gains.len());
                }
                preset(Preset::DiagFading {
                    gains: gains.clone(),
                    sigma2: *sigma2,
                    p: *p,
                })
            }
            ChannelSpec::ToeplitzIsi { taps, sigma2, p } => preset(Preset::ToeplitzIsi {
                taps: taps.clone(),
                n,
                sigma2: *sigma2,
                p: *p,
            }),
            ChannelSpec::Explicit { a, sigma, p } => {
                let a = matrix_from_rows(a).context("channel matrix A")?;
                let sigma = matrix_from_rows(sigma).context("channel matrix Sigma")?;
                if a.nrows() != n {
                    bail!("explicit channel is {}x{} but the cell wants n = {n}", a.nrows(), a.ncols());
                }
                preset(Preset::Explicit { a, sigma, p: *p })
            }
        };
        model.map_err(|e| anyhow::anyhow!("invalid channel: {e}"))
    }

}

fn matrix_from_rows(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let n = rows.len();
    if n == 0 {
        bail!("matrix has no rows");
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            bail!("row {i} has {} entries, expected {n} (square matrix)", row.len());
        }
    }
    Ok(DMatrix::from_fn(n, n, |i, j| rows[i][j]))
}

/// Base the configured exponents are declared in. Internally everything is
/// nats; base-2 inputs are multiplied by ln 2 on load.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum ExponentBase {
    #[default]
    Nats,
    Bits,
}

/// Pair selection for the false-identification estimator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "snake_case")]
pub enum PairStrategyConfig {
    /// Exhaustive up to 256 ordered pairs per message, nearest-8 beyond.
    #[default]
    Auto,
    All,
    NearestK {
        k: usize,
    },
}

impl PairStrategyConfig {
    pub fn resolve(self, n_messages: usize) -> PairStrategy {
        match self {
            PairStrategyConfig::Auto => PairStrategy::default_for(n_messages),
            PairStrategyConfig::All => PairStrategy::All,
            PairStrategyConfig::NearestK { k } => PairStrategy::NearestK(k),
        }
    }
}

fn default_trials() -> u64 {
    10_000
}

fn default_n_cap() -> u32 {
    16
}

fn default_ci_level() -> f64 {
    0.95
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub channel: ChannelSpec,
    /// Block lengths of the grid.
    pub n_list: Vec<usize>,
    /// Type-I exponents of the grid; may be empty in the Stein regime if
    /// `e2_list` is set.
    #[serde(default)]
    pub e1_list: Vec<f64>,
    #[serde(default)]
    pub e1_base: ExponentBase,
    /// Type-II exponents for converse-only evaluation without a type-I
    /// guarantee (Stein regime). Shares `e1_base`.
    #[serde(default)]
    pub e2_list: Option<Vec<f64>>,
    pub tau: f64,
    /// Monte Carlo trials per message.
    #[serde(default = "default_trials")]
    pub trials: u64,
    /// Monte Carlo trials per ordered pair (defaults to `trials`).
    #[serde(default)]
    pub trials_per_pair: Option<u64>,
    pub seed: u64,
    #[serde(default)]
    pub pair_strategy: PairStrategyConfig,
    /// Construction guard: refuse codebooks predicted beyond `2^n_cap`.
    #[serde(default = "default_n_cap")]
    pub n_cap: u32,
    #[serde(default = "default_ci_level")]
    pub ci_level: f64,
    /// Default output directory (the `--out` flag overrides it).
    #[serde(default)]
    pub out_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).context("parsing config JSON")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_list.is_empty() {
            bail!("n_list must be nonempty");
        }
        if self.n_list.iter().any(|&n| n == 0) {
            bail!("block lengths must be at least 1");
        }
        let stein = self.e2_list.as_ref().is_some_and(|l| !l.is_empty());
        if self.e1_list.is_empty() && !stein {
            bail!("need a nonempty e1_list, or e2_list for the Stein regime");
        }
        if self.e1_list.iter().any(|&e| !(e > 0.0)) {
            bail!("every E1 must be positive");
        }
        if let Some(e2s) = &self.e2_list {
            if e2s.iter().any(|&e| !(e > 0.0)) {
                bail!("every E2 must be positive");
            }
        }
        if !(self.tau > 0.0) {
            bail!("tau must be positive");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            bail!("ci_level must lie in (0, 1)");
        }
        Ok(())
    }

    /// Exponents in nats after base conversion.
    pub fn e1_nats(&self) -> Vec<f64> {
        self.e1_list.iter().map(|&e| self.to_nats(e)).collect()
    }

    pub fn e2_nats(&self) -> Option<Vec<f64>> {
        self.e2_list
            .as_ref()
            .map(|l| l.iter().map(|&e| self.to_nats(e)).collect())
    }

    fn to_nats(&self, e: f64) -> f64 {
        match self.e1_base {
            ExponentBase::Nats => e,
            ExponentBase::Bits => e * std::f64::consts::LN_2,
        }
    }

    pub fn trials_per_pair(&self) -> u64 {
        self.trials_per_pair.unwrap_or(self.trials)
    }

    /// SHA-256 of the canonical serialized form, recorded in every CSV.
    pub fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canon.as_bytes());
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}
