use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("key length mismatch: expected {expected} bytes, got {actual}")]
    KeyLengthMismatch { expected: usize, actual: usize },

    #[error("nonce must be 12 bytes, got {0}")]
    NonceLength(usize),

    #[error("sealed input of {0} bytes is shorter than the 16-byte tag")]
    TooShort(usize),

    #[error("AEAD authentication failed")]
    AuthFailure,

    #[error("unknown cipher suite `{0}`")]
    UnknownSuite(String),

    #[error("unknown header protection algorithm `{0}`")]
    UnknownHpAlg(String),

    #[error("traffic secret must be 32 bytes, got {0}")]
    InvalidSecretLength(usize),

    #[error("connection ID length must be 1..=20, got {0}")]
    InvalidConnectionIdLength(usize),

    #[error("packet too short for the header protection sample: need {needed} bytes after the packet number offset, have {actual}")]
    PayloadTooShortForSample { needed: usize, actual: usize },

    #[error("malformed header: {0}")]
    MalformedHeader(&'static str),

    #[error("packet number {0:#x} is out of range")]
    PacketNumberOutOfRange(u64),

    #[error("MTU {mtu} leaves no payload room (per-packet overhead is {overhead} bytes)")]
    MtuTooSmall { mtu: usize, overhead: usize },

    #[error("invalid benchmark configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
