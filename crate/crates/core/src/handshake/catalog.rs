//! KEM and signature parameter catalogs.
//!
//! Sizes come from a line-oriented data file (`name;level;pk;ct_or_sig;cert;provenance`);
//! a copy is compiled in. Timing fields are model inputs and start at zero.

use std::path::Path;
use std::time::Duration;

use serde::Serialize;

use crate::error::{Error, Result};

/// Environment variable that points at an alternative catalog file.
pub const CATALOG_ENV: &str = "QCL_CATALOG";

const BUILTIN: &str = include_str!("../../data/catalog.txt");

/// Representative timing inputs for every catalog entry, in the format read
/// by [`Catalog::apply_timings`].
pub const REFERENCE_TIMINGS: &str = include_str!("../../data/timings.txt");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KemSpec {
    pub name: String,
    pub nist_level: u8,
    /// Key share carried in the ClientHello.
    pub pk_size: usize,
    /// Key share carried in the ServerHello.
    pub ct_size: usize,
    #[serde(skip)]
    pub t_keygen: Duration,
    #[serde(skip)]
    pub t_encaps: Duration,
    #[serde(skip)]
    pub t_decaps: Duration,
}

impl KemSpec {
    pub fn new(name: impl Into<String>, nist_level: u8, pk_size: usize, ct_size: usize) -> Self {
        Self {
            name: name.into(),
            nist_level,
            pk_size,
            ct_size,
            t_keygen: Duration::ZERO,
            t_encaps: Duration::ZERO,
            t_decaps: Duration::ZERO,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SigSpec {
    pub name: String,
    pub nist_level: u8,
    pub pk_size: usize,
    pub sig_size: usize,
    pub cert_chain_size: usize,
    #[serde(skip)]
    pub t_sign: Duration,
    #[serde(skip)]
    pub t_verify: Duration,
}

impl SigSpec {
    pub fn new(
        name: impl Into<String>,
        nist_level: u8,
        pk_size: usize,
        sig_size: usize,
        cert_chain_size: usize,
    ) -> Self {
        Self {
            name: name.into(),
            nist_level,
            pk_size,
            sig_size,
            cert_chain_size,
            t_sign: Duration::ZERO,
            t_verify: Duration::ZERO,
        }
    }
}

/// Concatenation of two KEMs: sizes and timings add, the level is the max.
pub fn hybrid(a: &KemSpec, b: &KemSpec) -> KemSpec {
    KemSpec {
        name: format!("{}+{}", a.name, b.name),
        nist_level: a.nist_level.max(b.nist_level),
        pk_size: a.pk_size + b.pk_size,
        ct_size: a.ct_size + b.ct_size,
        t_keygen: a.t_keygen + b.t_keygen,
        t_encaps: a.t_encaps + b.t_encaps,
        t_decaps: a.t_decaps + b.t_decaps,
    }
}

/// Case-, dash- and underscore-insensitive key, so `p256` finds `P-256` and
/// `sphincs-sha2-192f` finds `SPHINCS+-SHA2-192f`.
fn normalize(name: &str) -> String {
    name.chars()
        .filter(|c| !matches!(c, '-' | '_' | '+' | ' '))
        .flat_map(char::to_lowercase)
        .collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    pub kems: Vec<KemSpec>,
    pub sigs: Vec<SigSpec>,
}

impl Catalog {
    pub fn builtin() -> Self {
        Self::parse(BUILTIN).expect("built-in catalog parses")
    }

    /// Built-in sizes with [`REFERENCE_TIMINGS`] applied.
    pub fn with_reference_timings() -> Self {
        let mut cat = Self::builtin();
        cat.apply_timings(REFERENCE_TIMINGS)
            .expect("reference timings match the built-in catalog");
        cat
    }

    /// Loads the file named by `QCL_CATALOG`, falling back to the built-in data.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CATALOG_ENV) {
            Some(path) => Self::load(path),
            None => Ok(Self::builtin()),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            line: 0,
            msg: format!("{}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cat = Catalog::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split(';').map(str::trim).collect();
            if fields.len() != 6 {
                return Err(err(format!("expected 6 fields, found {}", fields.len())));
            }
            let num = |i: usize, what: &str| -> Result<usize> {
                fields[i]
                    .parse()
                    .map_err(|_| err(format!("invalid {what} `{}`", fields[i])))
            };
            let name = fields[0];
            if name.is_empty() {
                return Err(err("empty name".into()));
            }
            let level = num(1, "level")?;
            let level = u8::try_from(level).map_err(|_| err(format!("invalid level {level}")))?;
            let pk = num(2, "pk size")?;
            let second = num(3, "ct/sig size")?;
            if fields[4] == "-" {
                if pk == 0 || second == 0 {
                    return Err(err("KEM sizes must be positive".into()));
                }
                cat.kems.push(KemSpec::new(name, level, pk, second));
            } else {
                let cert = num(4, "certificate size")?;
                if cert < pk + second {
                    return Err(err(format!(
                        "certificate ({cert}) smaller than key plus signature ({})",
                        pk + second
                    )));
                }
                cat.sigs.push(SigSpec::new(name, level, pk, second, cert));
            }
        }
        Ok(cat)
    }

    /// Resolves a KEM name or a hybrid expression `a+b` (e.g. `p256+kyber512`).
    pub fn kem(&self, expr: &str) -> Result<KemSpec> {
        let parts: Vec<&str> = expr.split('+').map(str::trim).collect();
        let mut found = parts.iter().map(|p| {
            let key = normalize(p);
            self.kems
                .iter()
                .find(|k| normalize(&k.name) == key)
                .ok_or_else(|| Error::UnknownAlgorithm(p.to_string()))
        });
        let first = found
            .next()
            .expect("split yields at least one part")?
            .clone();
        found.try_fold(first, |acc, k| Ok(hybrid(&acc, k?)))
    }

    pub fn sig(&self, name: &str) -> Result<SigSpec> {
        let key = normalize(name);
        self.sigs
            .iter()
            .find(|s| normalize(&s.name) == key)
            .cloned()
            .ok_or_else(|| Error::UnknownAlgorithm(name.to_owned()))
    }

    /// Applies a timing file: `name;keygen_us;encaps_us;decaps_us` for KEMs,
    /// `name;sign_us;verify_us` for signature schemes. Microseconds may be
    /// fractional.
    pub fn apply_timings(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let fields: Vec<&str> = line.split(';').map(str::trim).collect();
            let us = |s: &str| -> Result<Duration> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .map(|v| Duration::from_nanos((v * 1e3).round() as u64))
                    .ok_or_else(|| err(format!("invalid microseconds `{s}`")))
            };
            let key = normalize(fields[0]);
            match fields.len() {
                4 => {
                    let kem = self
                        .kems
                        .iter_mut()
                        .find(|k| normalize(&k.name) == key)
                        .ok_or_else(|| Error::UnknownAlgorithm(fields[0].to_owned()))?;
                    kem.t_keygen = us(fields[1])?;
                    kem.t_encaps = us(fields[2])?;
                    kem.t_decaps = us(fields[3])?;
                }
                3 => {
                    let sig = self
                        .sigs
                        .iter_mut()
                        .find(|s| normalize(&s.name) == key)
                        .ok_or_else(|| Error::UnknownAlgorithm(fields[0].to_owned()))?;
                    sig.t_sign = us(fields[1])?;
                    sig.t_verify = us(fields[2])?;
                }
                n => return Err(err(format!("expected 3 or 4 fields, found {n}"))),
            }
        }
        Ok(())
    }
}

pub fn kem_catalog() -> Vec<KemSpec> {
    Catalog::builtin().kems
}

pub fn sig_catalog() -> Vec<SigSpec> {
    Catalog::builtin().sigs
}
