//! Codebook file format: a text header followed by the row-major codeword
//! matrix.
//!
//! ```text
//! # digauss codebook v1
//! n=4 N=26 r=1.5811388300841898 P=10 seed=42
//! 0.31824... -1.0912... 0.0034... 2.2191...
//! ...
//! ```
//!
//! Floats are written with Rust's shortest round-trip formatting, so a
//! load/save cycle is bit-exact. Loading re-validates every packing
//! invariant through `Codebook::from_parts`.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DVector;

use digauss::codebook::Codebook;

const MAGIC: &str = "# digauss codebook v1";

pub fn write_codebook(cb: &Codebook<f64>, path: &Path) -> Result<()> {
    let mut out = String::new();
    out.push_str(MAGIC);
    out.push('\n');
    out.push_str(&format!(
        "n={} N={} r={} P={} seed={}\n",
        cb.n(),
        cb.len(),
        cb.r(),
        cb.p(),
        cb.seed()
    ));
    for w in cb.codewords() {
        let row: Vec<String> = w.iter().map(|v| format!("{v}")).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

pub fn read_codebook(path: &Path) -> Result<Codebook<f64>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let magic = lines.next().unwrap_or_default();
    if magic.trim() != MAGIC {
        bail!("not a digauss codebook file (bad magic line)");
    }
    let header = lines.next().unwrap_or_default();
    let mut n = None;
    let mut count = None;
    let mut r = None;
    let mut p = None;
    let mut seed = None;
    for field in header.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .with_context(|| format!("malformed header field {field:?}"))?;
        match key {
            "n" => n = Some(value.parse::<usize>()?),
            "N" => count = Some(value.parse::<usize>()?),
            "r" => r = Some(value.parse::<f64>()?),
            "P" => p = Some(value.parse::<f64>()?),
            "seed" => seed = Some(value.parse::<u64>()?),
            other => bail!("unknown header field {other:?}"),
        }
    }
    let (n, count, r, p, seed) = match (n, count, r, p, seed) {
        (Some(a), Some(b), Some(c), Some(d), Some(e)) => (a, b, c, d, e),
        _ => bail!("header must carry n, N, r, P, seed"),
    };

    let mut words = Vec::with_capacity(count);
    for (idx, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Result<Vec<f64>, _> = line.split_whitespace().map(str::parse).collect();
        let vals = vals.with_context(|| format!("parsing codeword line {idx}"))?;
        if vals.len() != n {
            bail!("codeword line {idx} has {} entries, expected {n}", vals.len());
        }
        words.push(DVector::from_vec(vals));
    }
    if words.len() != count {
        bail!("header claims N={count} codewords, found {}", words.len());
    }
    Codebook::from_parts(n, words, r, p, seed)
        .map_err(|e| anyhow::anyhow!("codebook fails validation: {e}"))
}
