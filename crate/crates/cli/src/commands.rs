//! The five subcommands: bounds, construct, simulate, sweep, verify.

use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rayon::prelude::*;

use digauss::bounds;
use digauss::channel::{spectral_cache, ChannelModel, SpectralCache};
use digauss::codebook::{self, certify_packing, Codebook, CodebookError, Theorem3Code};
use digauss::decoder::DecoderSpec;
use digauss::divergences::{dh_exact, fidelity, pair_geometry, renyi, tv_sandwich};
use digauss::montecarlo::{estimate_lambda1, estimate_lambda2, ErrorEstimate};
use digauss::oracle;
use digauss::rng::derive_seed;

use crate::codebook_io::{read_codebook, write_codebook};
use crate::config::ExperimentConfig;
use crate::csvout::{render, Row};

/// Command failure with its process exit code: 1 config, 2 infeasible
/// parameters, 3 numerical failure.
#[derive(Debug)]
pub enum CmdError {
    Config(String),
    Infeasible(String),
    Numerical(String),
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Config(_) => 1,
            CmdError::Infeasible(_) => 2,
            CmdError::Numerical(_) => 3,
        }
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Config(m) => write!(f, "config error: {m}"),
            CmdError::Infeasible(m) => write!(f, "infeasible parameters: {m}"),
            CmdError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<anyhow::Error> for CmdError {
    fn from(e: anyhow::Error) -> Self {
        CmdError::Config(format!("{e:#}"))
    }
}

pub struct Ctx {
    pub cfg: ExperimentConfig,
    pub out_dir: PathBuf,
    pub master_seed: u64,
}

impl Ctx {
    fn write_csv(&self, name: &str, rows: &[Row]) -> Result<PathBuf, CmdError> {
        let path = self.out_dir.join(name);
        let text = render(rows, &self.cfg.hash(), self.master_seed);
        std::fs::write(&path, text)
            .map_err(|e| CmdError::Config(format!("writing {}: {e}", path.display())))?;
        Ok(path)
    }
}

/// Independent sub-seed for grid cell `idx`, derived so cells never share
/// trial streams.
fn cell_seed(master: u64, idx: u64) -> u64 {
    let bytes = derive_seed(master, 100, idx);
    u64::from_le_bytes(bytes[..8].try_into().expect("8 bytes"))
}

fn build_cell(
    cfg: &ExperimentConfig,
    n: usize,
) -> Result<(ChannelModel<f64>, SpectralCache<f64>), CmdError> {
    let ch = cfg
        .channel
        .build(n)
        .map_err(|e| CmdError::Config(format!("{e:#}")))?;
    let cache = spectral_cache(&ch).map_err(|e| CmdError::Numerical(e.to_string()))?;
    Ok((ch, cache))
}

/// Converse/achievability columns for one cell. `e1`/`e2` in nats; `None`
/// marks an error type without an exponential guarantee.
fn bounds_columns(
    n: usize,
    e1: Option<f64>,
    e2: Option<f64>,
    tau: f64,
    ch: &ChannelModel<f64>,
    cache: &SpectralCache<f64>,
    seed: u64,
) -> Row {
    let report = bounds::bound_report(n, e1, e2, cache, ch.p());
    let linear = e1.and_then(|e| {
        bounds::achievable_rate_linear(e, tau, cache.sigma_eig_max, ch.p()).ok()
    });
    Row {
        n,
        e1_nats: e1,
        e2_nats: e2,
        tau,
        eps: linear.map(|l| l.eps),
        r: linear.map(|l| l.eps * ch.power_radius()),
        conv_thm1_bits: report.conv_symmetric_bits,
        conv_thm2_bits: report.conv_asymmetric_bits,
        ach_thm3_bits: linear.map(|l| l.rate_bits),
        lambda1_bound: e1.and_then(|e| bounds::lambda_from_exponent(e, n).ok()),
        lambda2_bound: e2.and_then(|e| bounds::lambda_from_exponent(e, n).ok()),
        seed,
        status: "bounds_only".into(),
        ..Default::default()
    }
}

/// `bounds`: evaluate every applicable bound over the configured grid. A
/// declared exponent is treated as the common exponent of both error types;
/// an `e2_list` without `e1_list` evaluates the Stein regime.
pub fn cmd_bounds(ctx: &Ctx) -> Result<(), CmdError> {
    let cfg = &ctx.cfg;
    let e1s = cfg.e1_nats();
    let e2s = cfg.e2_nats();
    let mut rows = Vec::new();
    let mut idx = 0u64;
    for &n in &cfg.n_list {
        let (ch, cache) = build_cell(cfg, n)?;
        if !e1s.is_empty() {
            for &e1 in &e1s {
                rows.push(bounds_columns(
                    n,
                    Some(e1),
                    Some(e1),
                    cfg.tau,
                    &ch,
                    &cache,
                    cell_seed(ctx.master_seed, idx),
                ));
                idx += 1;
            }
        } else {
            for e2 in e2s.as_deref().unwrap_or(&[]) {
                rows.push(bounds_columns(
                    n,
                    None,
                    Some(*e2),
                    cfg.tau,
                    &ch,
                    &cache,
                    cell_seed(ctx.master_seed, idx),
                ));
                idx += 1;
            }
        }
    }
    let path = ctx.write_csv("bounds.csv", &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn map_construction_error(e: CodebookError) -> CmdError {
    match e {
        CodebookError::HypothesisViolated(_) | CodebookError::SizeCapExceeded { .. } => {
            CmdError::Infeasible(e.to_string())
        }
        other => CmdError::Numerical(other.to_string()),
    }
}

fn certificate_text(code: &Theorem3Code<f64>, e1: f64) -> String {
    let cb = &code.codebook;
    let cert = certify_packing(cb);
    let verdict = |ok: bool| if ok { "PASS" } else { "FAIL" };
    format!(
        "codebook: n={} N={} r={} eps={} P={} seed={}\n\
         min_pairwise_dist={} required > 2r={} ... {}\n\
         max_norm={} required <= sqrt(nP)-r={} ... {}\n\
         log2_N={} volumetric upper bound={} ... {}\n\
         saturation_target={} reached={} (greedy runs: {})\n\
         decoder: threshold={} E1={} regime={:?}\n\
         predicted_E2={} (lambda2 <= exp(-n*E2) = {})\n\
         overall: {}\n",
        cb.n(),
        cb.len(),
        cb.r(),
        cb.eps(),
        cb.p(),
        cb.seed(),
        cert.min_pairwise_dist,
        cert.dist_threshold,
        verdict(cert.dist_ok),
        cert.max_norm,
        cert.norm_threshold,
        verdict(cert.norm_ok),
        cert.log2_n,
        cert.log2_n_upper,
        verdict(cert.converse_ok),
        code.saturation_target,
        verdict(cb.len() as u64 >= code.saturation_target),
        code.attempts,
        code.decoder.threshold,
        e1,
        code.decoder.regime,
        code.e2,
        bounds::lambda_from_exponent(code.e2, cb.n()).unwrap_or(f64::NAN),
        verdict(cert.pass),
    )
}

/// `construct`: run the achievability construction per grid cell; write the
/// codebook file and a human-readable certificate.
pub fn cmd_construct(ctx: &Ctx) -> Result<(), CmdError> {
    let cfg = &ctx.cfg;
    let e1s = cfg.e1_nats();
    if e1s.is_empty() {
        return Err(CmdError::Config(
            "construct needs a nonempty e1_list".into(),
        ));
    }
    let mut idx = 0u64;
    for &n in &cfg.n_list {
        let (ch, cache) = build_cell(cfg, n)?;
        for (ei, &e1) in e1s.iter().enumerate() {
            let seed = cell_seed(ctx.master_seed, idx);
            idx += 1;
            let code = codebook::construct_from_theorem3(&ch, &cache, e1, cfg.tau, seed, cfg.n_cap)
                .map_err(map_construction_error)?;
            let cb_path = ctx.out_dir.join(format!("codebook-n{n}-e{ei}.txt"));
            write_codebook(&code.codebook, &cb_path)
                .map_err(|e| CmdError::Config(format!("{e:#}")))?;
            let cert_path = ctx.out_dir.join(format!("certificate-n{n}-e{ei}.txt"));
            std::fs::write(&cert_path, certificate_text(&code, e1))
                .map_err(|e| CmdError::Config(format!("writing certificate: {e}")))?;
            println!("wrote {} and {}", cb_path.display(), cert_path.display());
        }
    }
    Ok(())
}

/// `p_hat` with the zero-count convention: compare the Wilson upper limit
/// when nothing was observed.
fn comparable(est: &ErrorEstimate<f64>) -> f64 {
    if est.p_hat == 0.0 {
        est.ci_high
    } else {
        est.p_hat
    }
}

fn bound_ok(est: &ErrorEstimate<f64>, bound: f64) -> bool {
    let half_width = (est.ci_high - est.ci_low) / 2.0;
    comparable(est) <= bound + 3.0 * half_width
}

struct SimOutcome {
    lambda1: ErrorEstimate<f64>,
    lambda2: ErrorEstimate<f64>,
    lambda1_bound: f64,
    lambda2_bound: Option<f64>,
    status: String,
}

fn simulate_code(
    cfg: &ExperimentConfig,
    cb: &Codebook<f64>,
    spec: &DecoderSpec<f64>,
    ch: &ChannelModel<f64>,
    cache: &SpectralCache<f64>,
    e1: f64,
    e2: Option<f64>,
    seed: u64,
) -> Result<SimOutcome, CmdError> {
    let n = cb.n();
    let lambda1 = estimate_lambda1(cb, spec, ch, cache, cfg.trials, seed);
    let strategy = cfg.pair_strategy.resolve(cb.len());
    let lambda2 = estimate_lambda2(cb, spec, ch, cache, cfg.trials_per_pair(), strategy, seed)
        .map_err(|e| CmdError::Config(e.to_string()))?;
    let lambda1_bound =
        bounds::lambda_from_exponent(e1, n).map_err(|e| CmdError::Config(e.to_string()))?;
    let lambda2_bound = e2.map(|e| bounds::lambda_from_exponent(e, n).expect("e2 >= 0"));

    let mut flags = Vec::new();
    if !bound_ok(&lambda1, lambda1_bound) {
        flags.push("lambda1_bound_violated");
    }
    if let Some(b2) = lambda2_bound {
        if !bound_ok(&lambda2, b2) {
            flags.push("lambda2_bound_violated");
        }
    }
    let status = if flags.is_empty() {
        "ok".to_string()
    } else {
        flags.join("+")
    };
    Ok(SimOutcome {
        lambda1,
        lambda2,
        lambda1_bound,
        lambda2_bound,
        status,
    })
}

/// `simulate`: estimate both error probabilities of a stored codebook under
/// the configured channel, one row per configured exponent.
pub fn cmd_simulate(ctx: &Ctx, codebook_path: &Path) -> Result<(), CmdError> {
    let cfg = &ctx.cfg;
    let cb = read_codebook(codebook_path).map_err(|e| CmdError::Config(format!("{e:#}")))?;
    let n = cb.n();
    let (ch, cache) = build_cell(cfg, n)?;
    if (ch.p() - cb.p()).abs() > 1e-12 * ch.p().abs() {
        return Err(CmdError::Config(format!(
            "codebook was built for P = {} but the channel has P = {}",
            cb.p(),
            ch.p()
        )));
    }
    let e1s = cfg.e1_nats();
    if e1s.is_empty() {
        return Err(CmdError::Config("simulate needs a nonempty e1_list".into()));
    }

    let mut rows = Vec::new();
    for (idx, &e1) in e1s.iter().enumerate() {
        let seed = cell_seed(ctx.master_seed, idx as u64);
        let spec = DecoderSpec::for_channel(n, e1, &cache)
            .map_err(|e| CmdError::Config(e.to_string()))?;
        let e2 = bounds::type2_exponent(cb.eps(), e1, cache.sigma_eig_max, ch.p()).ok();
        let sim = simulate_code(cfg, &cb, &spec, &ch, &cache, e1, e2, seed)?;
        rows.push(Row {
            n,
            e1_nats: Some(e1),
            e2_nats: e2,
            tau: cfg.tau,
            eps: Some(cb.eps()),
            r: Some(cb.r()),
            n_codewords: Some(cb.len()),
            log2_n: Some(cb.log2_len()),
            rate_bits: Some(cb.log2_len() / n as f64),
            rate_per_log2n: Some(cb.log2_len() / (n as f64 * (n as f64).log2())),
            lambda1_hat: Some(sim.lambda1.p_hat),
            lambda1_ci_high: Some(sim.lambda1.ci_high),
            lambda1_bound: Some(sim.lambda1_bound),
            lambda2_hat: Some(sim.lambda2.p_hat),
            lambda2_ci_high: Some(sim.lambda2.ci_high),
            lambda2_bound: sim.lambda2_bound,
            seed,
            status: sim.status,
            ..Default::default()
        });
    }
    let path = ctx.write_csv("simulate.csv", &rows)?;
    println!("wrote {}", path.display());
    Ok(())
}

fn sweep_cell(
    cfg: &ExperimentConfig,
    n: usize,
    e1: f64,
    seed: u64,
) -> Result<Row, CmdError> {
    let (ch, cache) = build_cell(cfg, n)?;
    let linear = bounds::achievable_rate_linear(e1, cfg.tau, cache.sigma_eig_max, ch.p()).ok();
    let e2 = linear.map(|l| l.e2);
    let mut row = bounds_columns(n, Some(e1), e2, cfg.tau, &ch, &cache, seed);

    let feasible = linear.is_some_and(|l| !l.degenerate);
    if !feasible {
        row.status = "infeasible".into();
        return Ok(row);
    }
    let eps = linear.expect("feasible").eps;
    if codebook::predicted_log2_size(n, eps) > f64::from(cfg.n_cap) {
        row.status = "size_cap".into();
        return Ok(row);
    }

    match codebook::construct_from_theorem3(&ch, &cache, e1, cfg.tau, seed, cfg.n_cap) {
        Ok(code) => {
            let cb = &code.codebook;
            let sim = simulate_code(cfg, cb, &code.decoder, &ch, &cache, e1, Some(code.e2), seed)?;
            row.e2_nats = Some(code.e2);
            row.n_codewords = Some(cb.len());
            row.log2_n = Some(cb.log2_len());
            row.rate_bits = Some(cb.log2_len() / n as f64);
            row.rate_per_log2n = Some(cb.log2_len() / (n as f64 * (n as f64).log2()));
            row.lambda1_hat = Some(sim.lambda1.p_hat);
            row.lambda1_ci_high = Some(sim.lambda1.ci_high);
            row.lambda1_bound = Some(sim.lambda1_bound);
            row.lambda2_hat = Some(sim.lambda2.p_hat);
            row.lambda2_ci_high = Some(sim.lambda2.ci_high);
            row.lambda2_bound = sim.lambda2_bound;
            row.status = sim.status;
            Ok(row)
        }
        Err(CodebookError::SizeCapExceeded { .. }) => {
            row.status = "size_cap".into();
            Ok(row)
        }
        Err(CodebookError::HypothesisViolated(_)) => {
            row.status = "infeasible".into();
            Ok(row)
        }
        Err(other) => Err(CmdError::Numerical(other.to_string())),
    }
}

const PLOT_SCRIPT: &str = r#"# Plot the sweep results (gnuplot script).
set datafile separator ','
set datafile commentschars '#'
set key autotitle columnhead
set key outside
set terminal pngcairo size 960,640

set output 'rate_vs_e1.png'
set logscale x
set xlabel 'E1 (nats)'
set ylabel 'bits per channel use'
plot 'sweep.csv' using 2:9  with points pt 7 title 'empirical rate', \
     ''          using 2:11 with linespoints title 'symmetric converse', \
     ''          using 2:12 with linespoints title 'asymmetric converse', \
     ''          using 2:13 with linespoints title 'achievable rate'

set output 'rate_norm_vs_n.png'
unset logscale
set xlabel 'block length n'
set ylabel 'log2(N) / (n log2 n)'
plot 'sweep.csv' using 1:10 with points pt 7 title 'normalized rate'
"#;

/// `sweep`: the full pipeline per grid cell (bounds always; construct and
/// simulate only where the size cap permits), plus a plot script. Cells run
/// in parallel; rows are written in grid order, so thread count never
/// affects the output bytes.
pub fn cmd_sweep(ctx: &Ctx) -> Result<(), CmdError> {
    let cfg = &ctx.cfg;
    let e1s = cfg.e1_nats();
    if e1s.is_empty() {
        return Err(CmdError::Config("sweep needs a nonempty e1_list".into()));
    }
    let mut cells = Vec::new();
    for &n in &cfg.n_list {
        for &e1 in &e1s {
            let idx = cells.len() as u64;
            cells.push((n, e1, cell_seed(ctx.master_seed, idx)));
        }
    }
    let results: Vec<Result<Row, CmdError>> = cells
        .par_iter()
        .map(|&(n, e1, seed)| sweep_cell(cfg, n, e1, seed))
        .collect();
    let mut rows = Vec::with_capacity(results.len());
    for r in results {
        rows.push(r?);
    }
    let path = ctx.write_csv("sweep.csv", &rows)?;
    let plot = ctx.out_dir.join("sweep_plot.gp");
    std::fs::write(&plot, PLOT_SCRIPT)
        .map_err(|e| CmdError::Config(format!("writing plot script: {e}")))?;
    println!("wrote {} and {}", path.display(), plot.display());
    Ok(())
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

/// `verify`: run the oracle suite and print a pass/fail table; exit 0 only
/// if every check passes.
pub fn cmd_verify(ctx: &Ctx) -> Result<(), CmdError> {
    use digauss::channel::{preset, Preset};
    use digauss::rng::{stream_rng, STREAM_CHANNEL};
    use rand::Rng;
    use rand_distr::StandardNormal;

    let seed = ctx.master_seed;
    let mut checks: Vec<Check> = Vec::new();

    // quadrature pins at n = 1
    {
        let ch = preset(Preset::Awgn { n: 1, sigma2: 1.0, p: 1.0 })
            .map_err(|e| CmdError::Numerical(e.to_string()))?;
        let cache = spectral_cache(&ch).map_err(|e| CmdError::Numerical(e.to_string()))?;
        let mut rng = stream_rng(seed, STREAM_CHANNEL, 1);
        let mut worst: f64 = 0.0;
        let mut ok = true;
        for _ in 0..5 {
            let x = DVector::from_vec(vec![2.0 * rng.sample::<f64, _>(StandardNormal)]);
            let x2 = DVector::from_vec(vec![2.0 * rng.sample::<f64, _>(StandardNormal)]);
            let geom = pair_geometry(&x, &x2, &cache)
                .map_err(|e| CmdError::Numerical(e.to_string()))?;
            match oracle::fidelity_quadrature(&ch, &x, &x2) {
                Ok(fq) => {
                    let diff: f64 = (fq - fidelity(&geom)).abs();
                    worst = worst.max(diff);
                    ok &= diff <= 1e-6;
                }
                Err(e) => {
                    ok = false;
                    worst = f64::NAN;
                    checks.push(check("fidelity quadrature n=1", false, e.to_string()));
                    break;
                }
            }
        }
        checks.push(check(
            "fidelity quadrature pin (n=1)",
            ok,
            format!("worst |F_closed - F_quad| = {worst:.2e}"),
        ));
    }

    // quadrature pins at n = 2 with a correlated covariance, plus TV sandwich
    {
        let a = nalgebra::DMatrix::from_row_slice(2, 2, &[1.0, 0.3, -0.2, 1.1]);
        let sigma = nalgebra::DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let ch = digauss::channel::validate_channel(2, a, sigma, 1.0)
            .map_err(|e| CmdError::Numerical(e.to_string()))?;
        let cache = spectral_cache(&ch).map_err(|e| CmdError::Numerical(e.to_string()))?;
        let mut rng = stream_rng(seed, STREAM_CHANNEL, 2);
        let mut worst_f: f64 = 0.0;
        let mut worst_d: f64 = 0.0;
        let mut tv_ok = true;
        let mut ok = true;
        for _ in 0..3 {
            let x = DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let x2 = DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal));
            let geom = pair_geometry(&x, &x2, &cache)
                .map_err(|e| CmdError::Numerical(e.to_string()))?;
            let f_cl = fidelity(&geom);
            match (
                oracle::fidelity_quadrature(&ch, &x, &x2),
                oracle::tv_quadrature(&ch, &x, &x2),
            ) {
                (Ok(fq), Ok(tv)) => {
                    worst_f = worst_f.max((fq - f_cl).abs());
                    let (lo, hi) = tv_sandwich(f_cl).unwrap();
                    tv_ok &= tv >= lo - 1e-8 && tv <= hi + 1e-8;
                }
                _ => {
                    ok = false;
                }
            }
            for &alpha in &[1.5, 2.0, 4.0] {
                let d_cl = renyi(&geom, alpha).unwrap();
                match oracle::renyi_quadrature(&ch, &x, &x2, alpha) {
                    Ok(dq) => worst_d = worst_d.max(((dq - d_cl) / d_cl).abs()),
                    Err(_) => ok = false,
                }
            }
            ok &= worst_f <= 1e-6 && worst_d <= 1e-6;
        }
        checks.push(check(
            "fidelity/renyi quadrature pins (n=2, correlated)",
            ok,
            format!("worst abs F err {worst_f:.2e}, worst rel D err {worst_d:.2e}"),
        ));
        checks.push(check(
            "TV inside the fidelity sandwich (quadrature)",
            tv_ok,
            "1 - F <= TV <= sqrt(1 - F^2) with 1e-8 slack".into(),
        ));
    }

    // hypothesis-testing entropy: brute force vs exact, and the Renyi chain
    {
        let ch = preset(Preset::Awgn { n: 1, sigma2: 1.0, p: 1.0 })
            .map_err(|e| CmdError::Numerical(e.to_string()))?;
        let cache = spectral_cache(&ch).map_err(|e| CmdError::Numerical(e.to_string()))?;
        let mut rng = stream_rng(seed, STREAM_CHANNEL, 3);
        let mut worst: f64 = 0.0;
        let mut chain_ok = true;
        for _ in 0..10 {
            let x = DVector::from_vec(vec![2.5 * rng.sample::<f64, _>(StandardNormal)]);
            let x2 = DVector::from_vec(vec![2.5 * rng.sample::<f64, _>(StandardNormal)]);
            let eps = 0.05 + 0.9 * rng.random::<f64>();
            let geom = pair_geometry(&x, &x2, &cache).unwrap();
            let exact = dh_exact(&geom, eps).unwrap();
            let brute = oracle::dh_small_n_check(&geom, eps).unwrap();
            worst = worst.max((exact - brute).abs());
            for &alpha in &[1.5, 2.0, 4.0, 10.0] {
                let rhs = renyi(&geom, alpha).unwrap()
                    + alpha / (alpha - 1.0) * (1.0 / (1.0 - eps)).ln();
                chain_ok &= exact <= rhs + 1e-9;
            }
        }
        checks.push(check(
            "hypothesis-testing entropy brute force agreement (n=1)",
            worst <= 1e-5,
            format!("worst |exact - brute| = {worst:.2e}"),
        ));
        checks.push(check(
            "hypothesis-testing-to-Renyi inequality",
            chain_ok,
            "D_h(eps) <= D_alpha + alpha/(alpha-1) ln(1/(1-eps))".into(),
        ));
    }

    // chi-square references
    {
        let direct =
            (oracle::chi2_tail::<f64>(10, 20.0).unwrap() - 0.029_252_688_076_961_124).abs();
        let k2 = (oracle::chi2_tail::<f64>(2, 3.0).unwrap() - (-1.5f64).exp()).abs();
        let nc = (oracle::noncentral_chi2_cdf::<f64>(6, 0.0, 8.0).unwrap()
            - (1.0 - oracle::chi2_tail::<f64>(6, 8.0).unwrap()))
        .abs();
        checks.push(check(
            "chi-square reference identities",
            direct <= 1e-10 && k2 <= 1e-13 && nc <= 1e-12,
            format!("tail err {direct:.2e}, k=2 closed form err {k2:.2e}, ncp=0 err {nc:.2e}"),
        ));

        // simulation agreement
        let ch = preset(Preset::Awgn { n: 10, sigma2: 1.0, p: 1.0 })
            .map_err(|e| CmdError::Numerical(e.to_string()))?;
        let cache = spectral_cache(&ch).map_err(|e| CmdError::Numerical(e.to_string()))?;
        let cb = Codebook::from_parts(10, vec![DVector::zeros(10)], 0.5, 1.0, 0)
            .map_err(|e| CmdError::Numerical(e.to_string()))?;
        let spec = DecoderSpec {
            threshold: 20.0,
            e1: 0.5,
            regime: digauss::decoder::ExponentRegime::Sqrt,
        };
        let trials = 200_000u64;
        let est = estimate_lambda1(&cb, &spec, &ch, &cache, trials, seed);
        let p = oracle::chi2_tail(10, 20.0).unwrap();
        let sd = (p * (1.0 - p) / trials as f64).sqrt();
        checks.push(check(
            "Monte Carlo vs chi-square tail (3 sigma)",
            (est.p_hat - p).abs() <= 3.0 * sd,
            format!("p_hat = {:.6}, oracle = {p:.6}, sd = {sd:.2e}", est.p_hat),
        ));
    }

    // packing certificate
    {
        let p = 10.0;
        let r = 0.25 * (8.0f64 * p).sqrt();
        match codebook::construct_greedy(8, r, p, seed, 200_000) {
            Ok(cb) => {
                let cert = certify_packing(&cb);
                checks.push(check(
                    "greedy packing certificate and saturation",
                    cert.pass && cb.len() >= 26,
                    format!(
                        "N = {}, min dist = {:.4} (> {:.4}), log2 N = {:.2} <= {:.2}",
                        cb.len(),
                        cert.min_pairwise_dist,
                        cert.dist_threshold,
                        cert.log2_n,
                        cert.log2_n_upper
                    ),
                ));
            }
            Err(e) => checks.push(check(
                "greedy packing certificate and saturation",
                false,
                e.to_string(),
            )),
        }
    }

    let mut all_ok = true;
    println!("{:<4} {:<55} detail", "", "check");
    for c in &checks {
        all_ok &= c.pass;
        println!("{:<4} {:<55} {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    if all_ok {
        println!("verify: all {} checks passed", checks.len());
        Ok(())
    } else {
        Err(CmdError::Numerical("one or more verification checks failed".into()))
    }
}
