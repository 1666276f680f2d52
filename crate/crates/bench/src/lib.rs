//! Fixtures shared by the criterion benches.

use qcl_core::keys::derive_packet_keys_from;
use qcl_core::packet::{payload_capacity, Protection};
use qcl_core::{HpAlg, PlainPacket, SuiteId};

pub const DCID: [u8; 8] = [0x83, 0x94, 0xc8, 0xf0, 0x3e, 0x51, 0x57, 0x08];
pub const PN_LEN: usize = 2;

pub fn protection(suite: SuiteId, hp: HpAlg) -> Protection {
    let keys = derive_packet_keys_from(&[0x42; 32], suite, hp).expect("32-byte secret");
    Protection::new(&keys, suite, hp).expect("derived keys have the right lengths")
}

/// A short-header packet that fills one datagram of `mtu` bytes.
pub fn full_packet(mtu: usize) -> PlainPacket {
    let len = payload_capacity(mtu, 1 + DCID.len(), PN_LEN).expect("mtu fits a packet");
    let payload = (0..len).map(|i| (i * 31 + 7) as u8).collect();
    PlainPacket::short(&DCID, 1, PN_LEN, payload)
}
