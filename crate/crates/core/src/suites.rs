//! AEAD cipher suites and header-protection mask algorithms.
//!
//! The registry holds the four suites the pipeline can run (the three QUIC v1
//! AEADs plus a NOOP stand-in) and the header-protection algorithms. A suite
//! carries a *default* header-protection algorithm, but every function here
//! takes the two independently so any pairing can be exercised.

use std::fmt;
use std::str::FromStr;

use aead::{AeadInPlace, KeyInit};
use aes::cipher::consts::U10;
use aes::cipher::{BlockEncrypt, KeyIvInit, StreamCipherCore, StreamCipherSeekCore};
use aes::{Aes128, Aes256};
use aes_gcm::{Aes128Gcm, Aes256Gcm};
use chacha20::ChaChaCore;
use chacha20poly1305::ChaCha20Poly1305;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const NONCE_LEN: usize = 12;
pub const TAG_LEN: usize = 16;
pub const SAMPLE_LEN: usize = 16;
/// One byte for the flags plus up to four packet-number bytes.
pub const MASK_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SuiteId {
    #[serde(rename = "AES_128_GCM")]
    Aes128Gcm,
    #[serde(rename = "AES_256_GCM")]
    Aes256Gcm,
    #[serde(rename = "CHACHA20_POLY1305")]
    ChaCha20Poly1305,
    #[serde(rename = "NOOP")]
    Noop,
}

impl SuiteId {
    pub const ALL: [SuiteId; 4] = [
        SuiteId::Aes128Gcm,
        SuiteId::Aes256Gcm,
        SuiteId::ChaCha20Poly1305,
        SuiteId::Noop,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SuiteId::Aes128Gcm => "AES_128_GCM",
            SuiteId::Aes256Gcm => "AES_256_GCM",
            SuiteId::ChaCha20Poly1305 => "CHACHA20_POLY1305",
            SuiteId::Noop => "NOOP",
        }
    }

    pub fn params(self) -> &'static CipherSuite {
        &SUITES[self as usize]
    }
}

impl fmt::Display for SuiteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SuiteId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_owned()))
    }
}

/// Header-protection selection. `Off` skips sampling and masking entirely,
/// while `NoopHp` runs the stage with an all-zero mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum HpAlg {
    #[serde(rename = "AES_ECB")]
    AesEcb,
    #[serde(rename = "CHACHA20_RAW")]
    ChaCha20Raw,
    #[serde(rename = "NOOP_HP")]
    NoopHp,
    #[serde(rename = "OFF")]
    Off,
}

impl HpAlg {
    pub const ALL: [HpAlg; 4] = [HpAlg::AesEcb, HpAlg::ChaCha20Raw, HpAlg::NoopHp, HpAlg::Off];

    pub fn name(self) -> &'static str {
        match self {
            HpAlg::AesEcb => "AES_ECB",
            HpAlg::ChaCha20Raw => "CHACHA20_RAW",
            HpAlg::NoopHp => "NOOP_HP",
            HpAlg::Off => "OFF",
        }
    }

    pub fn is_enabled(self) -> bool {
        self != HpAlg::Off
    }

    /// Length of the `hp` key derived for this algorithm when paired with `suite`.
    ///
    /// AES-ECB follows the AES key size of the suite (32 bytes only for
    /// AES-256-GCM); NOOP_HP takes a key as long as the suite's AEAD key.
    pub fn hp_key_len(self, suite: SuiteId) -> usize {
        match self {
            HpAlg::AesEcb if suite == SuiteId::Aes256Gcm => 32,
            HpAlg::AesEcb => 16,
            HpAlg::ChaCha20Raw => 32,
            HpAlg::NoopHp => suite.params().key_len,
            HpAlg::Off => 0,
        }
    }
}

impl fmt::Display for HpAlg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HpAlg {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HpAlg::ALL
            .into_iter()
            .find(|alg| alg.name() == s)
            .ok_or_else(|| Error::UnknownHpAlg(s.to_owned()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CipherSuite {
    pub id: SuiteId,
    pub key_len: usize,
    pub iv_len: usize,
    pub tag_len: usize,
    pub default_hp_alg: HpAlg,
}

/// Indexed by `SuiteId as usize`.
pub static SUITES: [CipherSuite; 4] = [
    CipherSuite {
        id: SuiteId::Aes128Gcm,
        key_len: 16,
        iv_len: NONCE_LEN,
        tag_len: TAG_LEN,
        default_hp_alg: HpAlg::AesEcb,
    },
    CipherSuite {
        id: SuiteId::Aes256Gcm,
        key_len: 32,
        iv_len: NONCE_LEN,
        tag_len: TAG_LEN,
        default_hp_alg: HpAlg::AesEcb,
    },
    CipherSuite {
        id: SuiteId::ChaCha20Poly1305,
        key_len: 32,
        iv_len: NONCE_LEN,
        tag_len: TAG_LEN,
        default_hp_alg: HpAlg::ChaCha20Raw,
    },
    CipherSuite {
        id: SuiteId::Noop,
        key_len: 16,
        iv_len: NONCE_LEN,
        tag_len: TAG_LEN,
        default_hp_alg: HpAlg::NoopHp,
    },
];

/// Looks up a suite by its wire name, e.g. `"AES_128_GCM"`.
pub fn suite_params(name: &str) -> Result<&'static CipherSuite> {
    name.parse::<SuiteId>().map(SuiteId::params)
}

fn check_key(expected: usize, key: &[u8]) -> Result<()> {
    if key.len() != expected {
        return Err(Error::KeyLengthMismatch {
            expected,
            actual: key.len(),
        });
    }
    Ok(())
}

fn nonce_array(nonce: &[u8]) -> Result<&[u8; NONCE_LEN]> {
    nonce
        .try_into()
        .map_err(|_| Error::NonceLength(nonce.len()))
}

enum AeadImpl {
    Aes128(Box<Aes128Gcm>),
    Aes256(Box<Aes256Gcm>),
    ChaCha(Box<ChaCha20Poly1305>),
    Noop,
}

/// A keyed AEAD instance. Key expansion happens once in [`PacketCipher::new`].
pub struct PacketCipher {
    suite: SuiteId,
    inner: AeadImpl,
}

impl fmt::Debug for PacketCipher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PacketCipher")
            .field("suite", &self.suite)
            .finish()
    }
}

impl PacketCipher {
    pub fn new(suite: SuiteId, key: &[u8]) -> Result<Self> {
        check_key(suite.params().key_len, key)?;
        let inner = match suite {
            SuiteId::Aes128Gcm => AeadImpl::Aes128(Box::new(Aes128Gcm::new(key.into()))),
            SuiteId::Aes256Gcm => AeadImpl::Aes256(Box::new(Aes256Gcm::new(key.into()))),
            SuiteId::ChaCha20Poly1305 => {
                AeadImpl::ChaCha(Box::new(ChaCha20Poly1305::new(key.into())))
            }
            SuiteId::Noop => AeadImpl::Noop,
        };
        Ok(Self { suite, inner })
    }

    pub fn suite(&self) -> SuiteId {
        self.suite
    }

    /// Encrypts `buf` in place and returns the detached tag.
    pub fn seal_in_place(
        &self,
        nonce: &[u8; NONCE_LEN],
        aad: &[u8],
        buf: &mut [u8],
    ) -> [u8; TAG_LEN] {
        let nonce = nonce.into();
        let tag = match &self.inner {
            AeadImpl::Aes128(c) => c.encrypt_in_place_detached(nonce, aad, buf),
            AeadImpl::Aes256(c) => c.encrypt_in_place_detached(nonce, aad, buf),
            AeadImpl::ChaCha(c) => c.encrypt_in_place_detached(nonce, aad, buf),
            AeadImpl::Noop => return [0; TAG_LEN],
        };
        // Only fails for inputs beyond the AEAD's plaintext limit (~64 GiB).
        tag.expect("AEAD input length within limits").into()
    }

    /// Decrypts `buf` in place after verifying `tag`. NOOP accepts any tag.
    pub fn open_in_place(
        &self,
        nonce: &[u8; NONCE_LEN],
        aad: &[u8],
        buf: &mut [u8],
        tag: &[u8; TAG_LEN],
    ) -> Result<()> {
        let nonce = nonce.into();
        let tag = tag.into();
        let res = match &self.inner {
            AeadImpl::Aes128(c) => c.decrypt_in_place_detached(nonce, aad, buf, tag),
            AeadImpl::Aes256(c) => c.decrypt_in_place_detached(nonce, aad, buf, tag),
            AeadImpl::ChaCha(c) => c.decrypt_in_place_detached(nonce, aad, buf, tag),
            AeadImpl::Noop => Ok(()),
        };
        res.map_err(|_| Error::AuthFailure)
    }
}

/// Returns `ciphertext || tag` for `plaintext`.
pub fn aead_seal(
    suite: SuiteId,
    key: &[u8],
    nonce: &[u8],
    aad: &[u8],
    plaintext: &[u8],
) -> Result<Vec<u8>> {
    let cipher = PacketCipher::new(suite, key)?;
    let nonce = nonce_array(nonce)?;
    let mut out = Vec::with_capacity(plaintext.len() + TAG_LEN);
    out.extend_from_slice(plaintext);
    let tag = cipher.seal_in_place(nonce, aad, &mut out);
    out.extend_from_slice(&tag);
    Ok(out)
}

pub fn aead_open(
    suite: SuiteId,
    key: &[u8],
    nonce: &[u8],
    aad: &[u8],
    sealed: &[u8],
) -> Result<Vec<u8>> {
    let cipher = PacketCipher::new(suite, key)?;
    let nonce = nonce_array(nonce)?;
    if sealed.len() < TAG_LEN {
        return Err(Error::TooShort(sealed.len()));
    }
    let (ct, tag) = sealed.split_at(sealed.len() - TAG_LEN);
    let tag: &[u8; TAG_LEN] = tag.try_into().expect("split at tag length");
    let mut out = ct.to_vec();
    cipher.open_in_place(nonce, aad, &mut out, tag)?;
    Ok(out)
}

enum HpImpl {
    Aes128(Box<Aes128>),
    Aes256(Box<Aes256>),
    ChaCha([u8; 32]),
    Zero,
    Off,
}

/// A keyed header-protection mask generator.
pub struct HeaderProtector {
    alg: HpAlg,
    inner: HpImpl,
}

impl fmt::Debug for HeaderProtector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeaderProtector")
            .field("alg", &self.alg)
            .finish()
    }
}

impl HeaderProtector {
    /// AES_ECB accepts a 16- or 32-byte key, CHACHA20_RAW exactly 32 bytes;
    /// NOOP_HP and OFF ignore the key.
    pub fn new(alg: HpAlg, key: &[u8]) -> Result<Self> {
        let inner = match alg {
            HpAlg::AesEcb => match key.len() {
                16 => HpImpl::Aes128(Box::new(Aes128::new(key.into()))),
                32 => HpImpl::Aes256(Box::new(Aes256::new(key.into()))),
                actual => {
                    return Err(Error::KeyLengthMismatch {
                        expected: 16,
                        actual,
                    })
                }
            },
            HpAlg::ChaCha20Raw => {
                check_key(32, key)?;
                HpImpl::ChaCha(key.try_into().expect("checked length"))
            }
            HpAlg::NoopHp => HpImpl::Zero,
            HpAlg::Off => HpImpl::Off,
        };
        Ok(Self { alg, inner })
    }

    pub fn alg(&self) -> HpAlg {
        self.alg
    }

    pub fn is_enabled(&self) -> bool {
        self.alg.is_enabled()
    }

    pub fn mask(&self, sample: &[u8; SAMPLE_LEN]) -> [u8; MASK_LEN] {
        let mut mask = [0u8; MASK_LEN];
        match &self.inner {
            HpImpl::Aes128(c) => {
                let mut block = (*sample).into();
                c.encrypt_block(&mut block);
                mask.copy_from_slice(&block[..MASK_LEN]);
            }
            HpImpl::Aes256(c) => {
                let mut block = (*sample).into();
                c.encrypt_block(&mut block);
                mask.copy_from_slice(&block[..MASK_LEN]);
            }
            HpImpl::ChaCha(key) => {
                // counter = sample[0..4] little-endian, nonce = sample[4..16]
                let counter = u32::from_le_bytes(sample[..4].try_into().expect("4 bytes"));
                let mut core = ChaChaCore::<U10>::new(key.into(), sample[4..].into());
                core.set_block_pos(counter);
                let mut block = Default::default();
                core.write_keystream_block(&mut block);
                mask.copy_from_slice(&block[..MASK_LEN]);
            }
            HpImpl::Zero | HpImpl::Off => {}
        }
        mask
    }
}

/// Computes the 5-byte header-protection mask for one sample.
pub fn hp_mask(alg: HpAlg, hp_key: &[u8], sample: &[u8]) -> Result<[u8; MASK_LEN]> {
    let sample: &[u8; SAMPLE_LEN] =
        sample
            .try_into()
            .map_err(|_| Error::PayloadTooShortForSample {
                needed: SAMPLE_LEN,
                actual: sample.len(),
            })?;
    Ok(HeaderProtector::new(alg, hp_key)?.mask(sample))
}
