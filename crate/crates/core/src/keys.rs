//! QUIC v1 key schedule: Initial secrets from a client connection ID, and the
//! per-direction `(key, iv, hp)` expansion of a traffic secret.

use hkdf::Hkdf;
use serde::{Deserialize, Serialize};
use sha2::Sha256;

use crate::error::{Error, Result};
use crate::suites::{HpAlg, SuiteId, NONCE_LEN};

pub const SECRET_LEN: usize = 32;
pub const MAX_CID_LEN: usize = 20;

/// QUIC v1 Initial salt.
pub const INITIAL_SALT_V1: [u8; 20] = [
    0x38, 0x76, 0x2c, 0xf7, 0xf5, 0x59, 0x34, 0xb3, 0x4d, 0x17, 0x9a, 0xe6, 0xa4, 0xc8, 0x0c, 0xad,
    0xcc, 0xbb, 0x7f, 0x0a,
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Client,
    Server,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Initial,
    Handshake,
    Application,
}

#[derive(Clone, PartialEq, Eq)]
pub struct TrafficSecret {
    bytes: [u8; SECRET_LEN],
    pub side: Side,
    pub level: Level,
}

impl std::fmt::Debug for TrafficSecret {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TrafficSecret")
            .field("side", &self.side)
            .field("level", &self.level)
            .finish_non_exhaustive()
    }
}

impl TrafficSecret {
    pub fn new(bytes: &[u8], side: Side, level: Level) -> Result<Self> {
        let bytes = bytes
            .try_into()
            .map_err(|_| Error::InvalidSecretLength(bytes.len()))?;
        Ok(Self { bytes, side, level })
    }

    pub fn as_bytes(&self) -> &[u8; SECRET_LEN] {
        &self.bytes
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct PacketKeys {
    pub key: Vec<u8>,
    pub iv: [u8; NONCE_LEN],
    pub hp: Vec<u8>,
}

impl std::fmt::Debug for PacketKeys {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PacketKeys")
            .field("key_len", &self.key.len())
            .field("hp_len", &self.hp.len())
            .finish_non_exhaustive()
    }
}

/// TLS 1.3 `HKDF-Expand-Label` over SHA-256 with an empty context.
pub fn hkdf_expand_label(secret: &[u8], label: &[u8], out: &mut [u8]) {
    let hk = Hkdf::<Sha256>::from_prk(secret).expect("PRK at least one hash length");
    let full_label_len = 6 + label.len();
    let mut info = Vec::with_capacity(4 + full_label_len);
    info.extend_from_slice(&(out.len() as u16).to_be_bytes());
    info.push(full_label_len as u8);
    info.extend_from_slice(b"tls13 ");
    info.extend_from_slice(label);
    info.push(0);
    hk.expand(&info, out)
        .expect("output length within HKDF limit");
}

/// Expands `secret` into the key/iv/hp triple for `suite` and `hp_alg`.
///
/// The NOOP suite runs through the same expansion, so switching suites
/// changes nothing but the cipher.
pub fn derive_packet_keys(secret: &TrafficSecret, suite: SuiteId, hp_alg: HpAlg) -> PacketKeys {
    derive_from_bytes(secret.as_bytes(), suite, hp_alg)
}

/// Like [`derive_packet_keys`] but starting from raw secret bytes.
pub fn derive_packet_keys_from(secret: &[u8], suite: SuiteId, hp_alg: HpAlg) -> Result<PacketKeys> {
    if secret.len() != SECRET_LEN {
        return Err(Error::InvalidSecretLength(secret.len()));
    }
    Ok(derive_from_bytes(secret, suite, hp_alg))
}

fn derive_from_bytes(secret: &[u8], suite: SuiteId, hp_alg: HpAlg) -> PacketKeys {
    let mut key = vec![0u8; suite.params().key_len];
    let mut iv = [0u8; NONCE_LEN];
    let mut hp = vec![0u8; hp_alg.hp_key_len(suite)];
    hkdf_expand_label(secret, b"quic key", &mut key);
    hkdf_expand_label(secret, b"quic iv", &mut iv);
    if !hp.is_empty() {
        hkdf_expand_label(secret, b"quic hp", &mut hp);
    }
    PacketKeys { key, iv, hp }
}

/// Derives the client and server Initial secrets for a client-chosen DCID.
pub fn derive_initial_secrets(client_dcid: &[u8]) -> Result<(TrafficSecret, TrafficSecret)> {
    if client_dcid.is_empty() || client_dcid.len() > MAX_CID_LEN {
        return Err(Error::InvalidConnectionIdLength(client_dcid.len()));
    }
    let (prk, _) = Hkdf::<Sha256>::extract(Some(&INITIAL_SALT_V1), client_dcid);
    let mut client = [0u8; SECRET_LEN];
    let mut server = [0u8; SECRET_LEN];
    hkdf_expand_label(&prk, b"client in", &mut client);
    hkdf_expand_label(&prk, b"server in", &mut server);
    Ok((
        TrafficSecret {
            bytes: client,
            side: Side::Client,
            level: Level::Initial,
        },
        TrafficSecret {
            bytes: server,
            side: Side::Server,
            level: Level::Initial,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unhex(s: &str) -> Vec<u8> {
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap())
            .collect()
    }

    fn zero_secret() -> TrafficSecret {
        TrafficSecret::new(&[0; 32], Side::Client, Level::Application).unwrap()
    }

    // Expected values below come from aioquic's hkdf_expand_label (tools/gen_vectors.py).

    #[test]
    fn zero_secret_aes128() {
        let k = derive_packet_keys(&zero_secret(), SuiteId::Aes128Gcm, HpAlg::AesEcb);
        assert_eq!(k.key, unhex("493b6205f5047533465623eb848cc55a"));
        assert_eq!(k.iv.to_vec(), unhex("cffff10d6d6d9fd79e88938a"));
        assert_eq!(k.hp, unhex("6c8e178d0deeab0ea797f195b374208a"));
    }

    #[test]
    fn zero_secret_chacha_key() {
        let k = derive_packet_keys(
            &zero_secret(),
            SuiteId::ChaCha20Poly1305,
            HpAlg::ChaCha20Raw,
        );
        assert_eq!(
            k.key,
            unhex("b68a19790209515d3c5ea1cf0fa3d6722626725bb57f856a710cb64b22438f15")
        );
        assert_eq!(k.hp.len(), 32);
    }

    #[test]
    fn initial_secrets_vector() {
        let (c, s) = derive_initial_secrets(&unhex("8394c8f03e515708")).unwrap();
        assert_eq!(
            c.as_bytes().to_vec(),
            unhex("c00cf151ca5be075ed0ebfb5c80323c42d6b7db67881289af4008f1f6c357aea")
        );
        assert_eq!(
            s.as_bytes().to_vec(),
            unhex("3c199828fd139efd216c155ad844cc81fb82fa8d7446fa7d78be803acdda951b")
        );
        assert_eq!((c.side, s.side), (Side::Client, Side::Server));
        let again = derive_initial_secrets(&unhex("8394c8f03e515708")).unwrap();
        assert_eq!(again, (c, s));
    }

    #[test]
    fn initial_client_keys() {
        let (c, _) = derive_initial_secrets(&unhex("8394c8f03e515708")).unwrap();
        let k = derive_packet_keys(&c, SuiteId::Aes128Gcm, HpAlg::AesEcb);
        assert_eq!(k.key, unhex("1f369613dd76d5467730efcbe3b1a22d"));
        assert_eq!(k.iv.to_vec(), unhex("fa044b2f42a3fd3b46fb255c"));
        assert_eq!(k.hp, unhex("9f50449e04a0e810283a1e9933adedd2"));
    }

    #[test]
    fn cid_length_bounds() {
        assert_eq!(
            derive_initial_secrets(&[]),
            Err(Error::InvalidConnectionIdLength(0))
        );
        assert_eq!(
            derive_initial_secrets(&[0; 21]),
            Err(Error::InvalidConnectionIdLength(21))
        );
        assert!(derive_initial_secrets(&[0; 20]).is_ok());
    }

    #[test]
    fn one_byte_change_changes_keys() {
        let mut other = [0u8; 32];
        other[31] = 1;
        let a = derive_packet_keys_from(&[0; 32], SuiteId::Aes128Gcm, HpAlg::AesEcb).unwrap();
        let b = derive_packet_keys_from(&other, SuiteId::Aes128Gcm, HpAlg::AesEcb).unwrap();
        assert_ne!(a.key, b.key);
        assert_ne!(a.iv, b.iv);
        assert_ne!(a.hp, b.hp);
    }

    #[test]
    fn lengths_for_every_pairing() {
        for suite in SuiteId::ALL {
            for hp in HpAlg::ALL {
                let k = derive_packet_keys(&zero_secret(), suite, hp);
                assert_eq!(k.key.len(), suite.params().key_len);
                assert_eq!(k.hp.len(), hp.hp_key_len(suite));
            }
        }
    }

    #[test]
    fn bad_secret_length() {
        assert_eq!(
            derive_packet_keys_from(&[0; 31], SuiteId::Noop, HpAlg::Off),
            Err(Error::InvalidSecretLength(31))
        );
        assert!(TrafficSecret::new(&[0; 48], Side::Server, Level::Handshake).is_err());
    }
}
