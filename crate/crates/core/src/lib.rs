//! QUIC v1 symmetric protection pipeline with a pluggable cipher registry
//! (including a NOOP cipher), a stage-attributing throughput harness, and a
//! deterministic model of post-quantum handshake sizes.
//!
//! - [`suites`]: AEAD suites and header-protection mask algorithms.
//! - [`keys`]: Initial secrets and `(key, iv, hp)` expansion.
//! - [`packet`]: packet/header protection, packet numbers, packetization.
//! - [`handshake`]: KEM/signature catalogs and the handshake simulator.
//! - [`bench`]: goodput and PP/HP cost attribution.
//! - [`vectors`]: hex test-vector files.

pub mod bench;
pub mod error;
pub mod handshake;
pub mod keys;
pub mod packet;
pub mod suites;
pub mod vectors;

pub use error::{Error, Result};
pub use keys::{
    derive_initial_secrets, derive_packet_keys, Level, PacketKeys, Side, TrafficSecret,
};
pub use packet::{
    compute_nonce, open_packet, packetize, pn_decode, seal_packet, PlainPacket, Protection,
    WirePacket,
};
pub use suites::{aead_open, aead_seal, hp_mask, suite_params, CipherSuite, HpAlg, SuiteId};
