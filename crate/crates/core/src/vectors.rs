//! Hex test-vector files.
//!
//! A file is a sequence of blocks separated by blank lines. Each block is a
//! list of `label: value` lines; `#` starts a comment line.
//!
//! ```text
//! name: initial_client
//! suite: AES_128_GCM
//! hp: AES_ECB
//! dcid: 8394c8f03e515708
//! side: client
//! header: c300000001088394c8f03e5157080000449e
//! pn: 2
//! payload: 060040f1...
//! wire: c000000001...
//! ```
//!
//! Keys come from exactly one of `dcid` + `side` (Initial secrets),
//! `secret` (a 32-byte traffic secret) or `key` + `iv` + `hp_key`.
//! `header` runs up to the packet number field; for short headers the DCID
//! length is taken from `dcid_len` (default 8). `largest_acked` is optional.

use std::path::Path;

use crate::error::{Error, Result};
use crate::keys::{
    derive_initial_secrets, derive_packet_keys, derive_packet_keys_from, PacketKeys, Side,
};
use crate::packet::{PlainPacket, Protection, WirePacket, DEFAULT_DCID_LEN};
use crate::suites::{HpAlg, SuiteId, NONCE_LEN};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeySource {
    Initial {
        dcid: Vec<u8>,
        side: Side,
    },
    Secret(Vec<u8>),
    Raw {
        key: Vec<u8>,
        iv: Vec<u8>,
        hp: Vec<u8>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vector {
    pub name: String,
    /// Line where the block starts.
    pub line: usize,
    pub suite: SuiteId,
    pub hp_alg: HpAlg,
    pub keys: KeySource,
    pub header: Vec<u8>,
    pub pn: u64,
    pub payload: Vec<u8>,
    pub wire: Vec<u8>,
    pub largest_acked: Option<u64>,
    pub dcid_len: usize,
}

/// First label whose value disagrees with the computed result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mismatch {
    pub label: &'static str,
    pub detail: String,
}

#[derive(Default)]
struct Block {
    start: usize,
    fields: Vec<(String, String, usize)>,
}

impl Block {
    fn get(&self, label: &str) -> Option<(&str, usize)> {
        self.fields
            .iter()
            .find(|(l, _, _)| l == label)
            .map(|(_, v, line)| (v.as_str(), *line))
    }

    fn require(&self, label: &str) -> Result<(&str, usize)> {
        self.get(label).ok_or_else(|| Error::Parse {
            line: self.start,
            msg: format!("missing `{label}`"),
        })
    }

    fn hex(&self, label: &str) -> Result<Option<Vec<u8>>> {
        self.get(label)
            .map(|(v, line)| {
                hex::decode(v).map_err(|e| Error::Parse {
                    line,
                    msg: format!("`{label}`: {e}"),
                })
            })
            .transpose()
    }

    fn hex_required(&self, label: &str) -> Result<Vec<u8>> {
        self.require(label)?;
        Ok(self.hex(label)?.unwrap_or_default())
    }

    fn number(&self, label: &str) -> Result<Option<u64>> {
        self.get(label)
            .map(|(v, line)| {
                v.parse().map_err(|_| Error::Parse {
                    line,
                    msg: format!("`{label}` is not an integer"),
                })
            })
            .transpose()
    }

    fn into_vector(self) -> Result<Vector> {
        let parse_err = |line, msg: String| Error::Parse { line, msg };
        let (name, _) = self.require("name")?;
        let (suite, line) = self.require("suite")?;
        let suite: SuiteId = suite
            .parse()
            .map_err(|e: Error| parse_err(line, e.to_string()))?;
        let hp_alg = match self.get("hp") {
            Some((v, line)) => v
                .parse()
                .map_err(|e: Error| parse_err(line, e.to_string()))?,
            None => suite.params().default_hp_alg,
        };

        let keys = if let Some(dcid) = self.hex("dcid")? {
            let (side, line) = self.require("side")?;
            let side = match side {
                "client" => Side::Client,
                "server" => Side::Server,
                other => return Err(parse_err(line, format!("unknown side `{other}`"))),
            };
            KeySource::Initial { dcid, side }
        } else if let Some(secret) = self.hex("secret")? {
            KeySource::Secret(secret)
        } else if self.get("key").is_some() {
            KeySource::Raw {
                key: self.hex_required("key")?,
                iv: self.hex_required("iv")?,
                hp: self.hex_required("hp_key")?,
            }
        } else {
            return Err(parse_err(
                self.start,
                "no key material (`dcid`, `secret` or `key`)".into(),
            ));
        };

        let pn = self
            .number("pn")?
            .ok_or_else(|| parse_err(self.start, "missing `pn`".into()))?;
        let header = self.hex_required("header")?;
        if header.is_empty() {
            return Err(parse_err(self.require("header")?.1, "empty header".into()));
        }
        Ok(Vector {
            name: name.to_owned(),
            line: self.start,
            suite,
            hp_alg,
            keys,
            header,
            pn,
            payload: self.hex_required("payload")?,
            wire: self.hex_required("wire")?,
            largest_acked: self.number("largest_acked")?,
            dcid_len: self
                .number("dcid_len")?
                .map_or(DEFAULT_DCID_LEN, |n| n as usize),
        })
    }
}

pub fn parse_vectors(text: &str) -> Result<Vec<Vector>> {
    let mut blocks = Vec::new();
    let mut cur = Block::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.starts_with('#') {
            continue;
        }
        if trimmed.is_empty() {
            if !cur.fields.is_empty() {
                blocks.push(std::mem::take(&mut cur));
            }
            continue;
        }
        let (label, value) = trimmed.split_once(':').ok_or_else(|| Error::Parse {
            line,
            msg: "expected `label: value`".into(),
        })?;
        if cur.fields.is_empty() {
            cur.start = line;
        }
        let label = label.trim().to_owned();
        if cur.fields.iter().any(|(l, _, _)| *l == label) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate `{label}`"),
            });
        }
        cur.fields.push((label, value.trim().to_owned(), line));
    }
    if !cur.fields.is_empty() {
        blocks.push(cur);
    }
    blocks.into_iter().map(Block::into_vector).collect()
}

pub fn load_vectors(path: impl AsRef<Path>) -> Result<Vec<Vector>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
    parse_vectors(&text)
}

impl Vector {
    pub fn packet_keys(&self) -> Result<PacketKeys> {
        match &self.keys {
            KeySource::Initial { dcid, side } => {
                let (client, server) = derive_initial_secrets(dcid)?;
                let secret = if *side == Side::Client {
                    client
                } else {
                    server
                };
                Ok(derive_packet_keys(&secret, self.suite, self.hp_alg))
            }
            KeySource::Secret(secret) => derive_packet_keys_from(secret, self.suite, self.hp_alg),
            KeySource::Raw { key, iv, hp } => {
                let iv: [u8; NONCE_LEN] = iv
                    .as_slice()
                    .try_into()
                    .map_err(|_| Error::NonceLength(iv.len()))?;
                Ok(PacketKeys {
                    key: key.clone(),
                    iv,
                    hp: hp.clone(),
                })
            }
        }
    }

    pub fn plain(&self) -> PlainPacket {
        PlainPacket {
            header: self.header.clone(),
            pn: self.pn,
            pn_len: usize::from(self.header[0] & 0x03) + 1,
            payload: self.payload.clone(),
        }
    }

    /// Seals the plaintext and compares with `wire`, then opens `wire` and
    /// compares with the plaintext fields.
    pub fn verify(&self) -> std::result::Result<(), Mismatch> {
        let fail = |label, detail: String| Mismatch { label, detail };
        let keys = self
            .packet_keys()
            .map_err(|e| fail("keys", e.to_string()))?;
        let prot = Protection::new(&keys, self.suite, self.hp_alg)
            .map_err(|e| fail("keys", e.to_string()))?;
        let sealed = prot
            .seal(&self.plain())
            .map_err(|e| fail("header", e.to_string()))?;
        if sealed.bytes != self.wire {
            let detail = match sealed
                .bytes
                .iter()
                .zip(&self.wire)
                .position(|(a, b)| a != b)
            {
                Some(i) => format!("first difference at byte {i}"),
                None => format!(
                    "length {} != expected {}",
                    sealed.bytes.len(),
                    self.wire.len()
                ),
            };
            return Err(fail("wire", detail));
        }
        let opened = prot
            .open(
                &WirePacket {
                    bytes: self.wire.clone(),
                },
                self.largest_acked,
                self.dcid_len,
            )
            .map_err(|e| fail("wire", format!("open failed: {e}")))?;
        if opened.pn != self.pn {
            return Err(fail("pn", format!("decoded {} from the wire", opened.pn)));
        }
        if opened.header != self.header {
            return Err(fail("header", "unprotected header differs".into()));
        }
        if opened.payload != self.payload {
            return Err(fail("payload", "decrypted payload differs".into()));
        }
        Ok(())
    }
}
