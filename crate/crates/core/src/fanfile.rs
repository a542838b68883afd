//! The `.fan` input format: a small TOML document with rank, rays, maximal
//! cones (1-based), facet constants as exact rational strings, the wall
//! height, and optional numeric Kahler-parameter overrides.
//!
//! Parsing is strict: unknown fields are rejected, indices are validated
//! against the 1-based range, and every fan/Kahler invariant is checked
//! eagerly so diagnostics point at the offending entry.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde::Deserialize;
use thiserror::Error;

use crate::fan::{FanData, KahlerData};
use crate::numeric::fmt_f64;

#[derive(Debug, Error)]
pub enum FanFileError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFanFile {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<i64>>,
    lambda: Vec<String>,
    eps_abs: String,
    #[serde(default)]
    q: Option<Vec<String>>,
}

/// A parsed and fully validated input document.
#[derive(Debug, Clone)]
pub struct FanFile {
    pub fan: FanData,
    pub kahler: KahlerData,
    pub eps_abs: f64,
    pub q_override: Option<Vec<f64>>,
}

/// Exact rational from a "p/q" or "p" string.
pub fn parse_rational(s: &str) -> Result<BigRational, String> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a, b),
        None => (s, "1"),
    };
    let p: BigInt = num
        .parse()
        .map_err(|_| format!("invalid rational numerator {num:?}"))?;
    let q: BigInt = den
        .parse()
        .map_err(|_| format!("invalid rational denominator {den:?}"))?;
    if q == BigInt::from(0) {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(BigRational::new(p, q))
}

/// Reduced "p/q" (or "p" when integral) form.
pub fn rational_string(x: &BigRational) -> String {
    if x.denom().is_one() {
        format!("{}", x.numer())
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_fan_file(bytes: &[u8]) -> Result<FanFile, FanFileError> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| FanFileError::Parse(format!("not utf-8: {e}")))?;
    let raw: RawFanFile =
        toml::from_str(text).map_err(|e| FanFileError::Parse(e.to_string()))?;

    let m = raw.rays.len();
    let mut cones = Vec::with_capacity(raw.max_cones.len());
    for (c, cone) in raw.max_cones.iter().enumerate() {
        let mut indices = Vec::with_capacity(cone.len());
        for (j, &idx) in cone.iter().enumerate() {
            if idx < 1 || idx as usize > m {
                return Err(FanFileError::Parse(format!(
                    "max_cones[{}][{}]: ray index {idx} out of 1-based range 1..={m}",
                    c + 1,
                    j + 1
                )));
            }
            indices.push(idx as usize - 1);
        }
        cones.push(indices);
    }

    let fan = FanData::from_i64(raw.rank, &raw.rays, &cones)
        .map_err(|e| FanFileError::Validation(e.to_string()))?;

    if raw.lambda.len() != m {
        return Err(FanFileError::Validation(format!(
            "lambda has {} entries, expected {m}",
            raw.lambda.len()
        )));
    }
    let lambda: Vec<BigRational> = raw
        .lambda
        .iter()
        .map(|s| parse_rational(s))
        .collect::<Result<_, _>>()
        .map_err(FanFileError::Parse)?;

    let q_override = match &raw.q {
        None => None,
        Some(strings) => {
            let vals: Vec<f64> = strings
                .iter()
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| FanFileError::Parse(format!("invalid q value {s:?}")))
                })
                .collect::<Result<_, _>>()?;
            Some(vals)
        }
    };

    let kahler = match &q_override {
        None => KahlerData::new(&fan, lambda),
        Some(q) => KahlerData::with_q_override(&fan, lambda, q.clone()),
    }
    .map_err(|e| FanFileError::Validation(e.to_string()))?;

    let eps_abs: f64 = raw
        .eps_abs
        .trim()
        .parse()
        .map_err(|_| FanFileError::Parse(format!("invalid eps_abs {:?}", raw.eps_abs)))?;
    if !(eps_abs > 0.0) {
        return Err(FanFileError::Validation(format!(
            "eps_abs must be positive, got {eps_abs}"
        )));
    }

    Ok(FanFile { fan, kahler, eps_abs, q_override })
}

impl FanFile {
    /// Canonical serialization: fixed field order, reduced rationals,
    /// 17-significant-digit floats. Hashing this form makes the result
    /// cache insensitive to comment/whitespace differences.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        use std::fmt::Write as _;
        let mut out = String::new();
        writeln!(out, "rank = {}", self.fan.rank()).unwrap();
        let rays: Vec<String> = self
            .fan
            .rays()
            .iter()
            .map(|v| {
                let entries: Vec<String> = v.iter().map(|c| c.to_string()).collect();
                format!("[{}]", entries.join(", "))
            })
            .collect();
        writeln!(out, "rays = [{}]", rays.join(", ")).unwrap();
        let cones: Vec<String> = self
            .fan
            .max_cones()
            .iter()
            .map(|cone| {
                let idx: Vec<String> = cone.iter().map(|&i| (i + 1).to_string()).collect();
                format!("[{}]", idx.join(", "))
            })
            .collect();
        writeln!(out, "max_cones = [{}]", cones.join(", ")).unwrap();
        let lambda: Vec<String> = self
            .kahler
            .lambda
            .iter()
            .map(|x| format!("\"{}\"", rational_string(x)))
            .collect();
        writeln!(out, "lambda = [{}]", lambda.join(", ")).unwrap();
        writeln!(out, "eps_abs = \"{}\"", fmt_f64(self.eps_abs)).unwrap();
        if let Some(q) = &self.q_override {
            let qs: Vec<String> = q.iter().map(|&v| format!("\"{}\"", fmt_f64(v))).collect();
            writeln!(out, "q = [{}]", qs.join(", ")).unwrap();
        }
        out.into_bytes()
    }
}
