//! Flight-by-flight model of a QUIC 1-RTT handshake.
//!
//! The client sends its ClientHello in padded Initial datagrams. The server
//! answers with one CRYPTO stream (ServerHello, then EncryptedExtensions,
//! Certificate, CertificateVerify and Finished) cut into full-size packets.
//! Until the client's address is validated the server may only send
//! `amp_factor` times the bytes it has received; it then either inserts a
//! Retry round trip or stalls until client ACKs re-arm the budget. Address
//! validation completes when the first Handshake-level packet from the
//! client arrives.
//!
//! Byte counts are UDP payload bytes. Packets are counted one per datagram,
//! except that a packet straddling the ServerHello/EncryptedExtensions
//! boundary counts once.

use std::time::Duration;

use serde::{Serialize, Serializer};

use super::catalog::{KemSpec, SigSpec};
use crate::packet::{plan_packets, IP_UDP_OVERHEAD};
use crate::suites::TAG_LEN;

/// Long header with 8-byte connection IDs and a 2-byte length field (26),
/// plus a CRYPTO frame header (7).
pub const HANDSHAKE_HEADER_LEN: usize = 26 + 7;
pub const HANDSHAKE_PN_LEN: usize = 2;
/// ACK-only Handshake packet: long header, packet number, ACK frame, tag.
pub const HANDSHAKE_ACK_LEN: usize = 25 + HANDSHAKE_PN_LEN + 6 + TAG_LEN;
/// Retry packet with a 16-byte token and integrity tag.
pub const RETRY_LEN: usize = 7 + 16 + 16 + 16;
/// Handshake messages processed by a peer before the client may send its
/// request (ClientHello, ServerHello, server authentication flight).
const PROCESSED_MESSAGES: u32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EndpointPolicy {
    /// Highest usable handshake packet number + 1; `None` is unlimited.
    pub pn_window: Option<u64>,
    /// Anti-amplification factor; `None` disables the limit.
    pub amp_factor: Option<u64>,
    pub retry_enabled: bool,
    /// IP-level datagram size used during the handshake.
    pub initial_mtu: usize,
    pub ack_every: u64,
}

impl Default for EndpointPolicy {
    fn default() -> Self {
        Self {
            pn_window: None,
            amp_factor: Some(3),
            retry_enabled: false,
            initial_mtu: 1200,
            ack_every: 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BaseSizes {
    pub client_hello_base: usize,
    pub server_hello_base: usize,
    pub ee_cert_cv_fin_base: usize,
}

impl Default for BaseSizes {
    fn default() -> Self {
        Self {
            client_hello_base: 300,
            server_hello_base: 120,
            ee_cert_cv_fin_base: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandshakeProfile {
    pub kem: KemSpec,
    pub sig: SigSpec,
    pub client_policy: EndpointPolicy,
    pub server_policy: EndpointPolicy,
    pub rtt: Duration,
    pub base_msg_sizes: BaseSizes,
    /// Extra processing time charged for each handshake message.
    pub per_message_delay: Duration,
}

impl HandshakeProfile {
    pub fn new(kem: KemSpec, sig: SigSpec) -> Self {
        Self {
            kem,
            sig,
            client_policy: EndpointPolicy::default(),
            server_policy: EndpointPolicy::default(),
            rtt: Duration::ZERO,
            base_msg_sizes: BaseSizes::default(),
            per_message_delay: Duration::ZERO,
        }
    }

    /// Sum of the modeled computation on the critical path.
    pub fn compute_time(&self) -> Duration {
        self.kem.t_keygen
            + self.kem.t_encaps
            + self.kem.t_decaps
            + self.sig.t_sign
            + self.sig.t_verify
            + self.per_message_delay * PROCESSED_MESSAGES
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Flights {
    pub ch_bytes: usize,
    pub sh_bytes: usize,
    pub server_crypto_bytes: usize,
}

pub fn build_flights(profile: &HandshakeProfile) -> Flights {
    let base = &profile.base_msg_sizes;
    Flights {
        ch_bytes: base.client_hello_base + profile.kem.pk_size,
        sh_bytes: base.server_hello_base + profile.kem.ct_size,
        server_crypto_bytes: base.ee_cert_cv_fin_base
            + profile.sig.cert_chain_size
            + profile.sig.sig_size,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    FailedPnWindow,
    StalledAmplification,
}

fn as_nanos<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u64(u64::try_from(d.as_nanos()).unwrap_or(u64::MAX))
}

/// Result of one simulated handshake. `ttfb` serializes as nanoseconds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SimReport {
    #[serde(serialize_with = "as_nanos")]
    pub ttfb: Duration,
    pub packets_client: u64,
    pub packets_server: u64,
    pub server_flight_bytes: u64,
    pub retry_used: bool,
    pub outcome: Outcome,
    /// Round trips on the critical path, stall rounds included.
    pub round_trips: u32,
    /// Round trips spent waiting on the amplification budget.
    pub stall_round_trips: u32,
}

/// Cumulative byte counters after each server transmission.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmpEvent {
    pub client_bytes: u64,
    pub server_bytes: u64,
    pub validated: bool,
}

#[derive(Debug, Clone, Copy)]
struct ServerPacket {
    bytes: u64,
    handshake_level: bool,
}

fn server_packets(flights: &Flights, mtu: usize) -> Vec<ServerPacket> {
    let total = (flights.sh_bytes + flights.server_crypto_bytes) as u64;
    let plan = plan_packets(total, mtu, HANDSHAKE_HEADER_LEN, HANDSHAKE_PN_LEN)
        .expect("handshake MTU leaves payload room");
    let datagram = (mtu - IP_UDP_OVERHEAD) as u64;
    let overhead = (HANDSHAKE_HEADER_LEN + HANDSHAKE_PN_LEN + TAG_LEN) as u64;
    let mut offset = 0u64;
    plan.sizes()
        .map(|size| {
            let start = offset;
            offset += size as u64;
            let carries_initial = start < flights.sh_bytes as u64;
            ServerPacket {
                // datagrams carrying Initial data are padded
                bytes: if carries_initial {
                    datagram
                } else {
                    size as u64 + overhead
                },
                handshake_level: offset > flights.sh_bytes as u64,
            }
        })
        .collect()
}

pub fn simulate(profile: &HandshakeProfile) -> SimReport {
    simulate_traced(profile).0
}

/// Runs the model and also returns the amplification bookkeeping after every
/// server transmission.
pub fn simulate_traced(profile: &HandshakeProfile) -> (SimReport, Vec<AmpEvent>) {
    let flights = build_flights(profile);
    let client = &profile.client_policy;
    let server = &profile.server_policy;
    let ack_every = client.ack_every.max(1);

    let client_datagram = (client.initial_mtu - IP_UDP_OVERHEAD) as u64;
    let ch_packets = plan_packets(
        flights.ch_bytes as u64,
        client.initial_mtu,
        HANDSHAKE_HEADER_LEN,
        HANDSHAKE_PN_LEN,
    )
    .expect("handshake MTU leaves payload room")
    .count();

    let mut client_sent = ch_packets;
    let mut client_bytes = ch_packets * client_datagram;
    let mut server_numbered = 0u64;
    let mut server_bytes = 0u64;
    let mut retry_used = false;
    let mut validated = server.amp_factor.is_none();
    let mut round_trips = 1u32;
    let mut stall_round_trips = 0u32;
    let mut trace = Vec::new();

    let budget = |client_bytes: u64| server.amp_factor.map_or(u64::MAX, |f| f * client_bytes);
    let packets = server_packets(&flights, server.initial_mtu);
    let flight_bytes: u64 = packets.iter().map(|p| p.bytes).sum();

    if server.retry_enabled && !validated && flight_bytes > budget(client_bytes) {
        server_bytes += RETRY_LEN as u64;
        trace.push(AmpEvent {
            client_bytes,
            server_bytes,
            validated,
        });
        // the ClientHello is sent again with the token, which validates the address
        client_sent += ch_packets;
        client_bytes += ch_packets * client_datagram;
        validated = true;
        retry_used = true;
        round_trips += 1;
    }

    let mut next = 0usize;
    let mut unacked = [0u64; 2]; // [initial, handshake]
    let mut stalled = false;
    loop {
        let start = next;
        while let Some(p) = packets.get(next) {
            if !validated && server_bytes + p.bytes > budget(client_bytes) {
                break;
            }
            server_bytes += p.bytes;
            server_numbered += 1;
            next += 1;
            trace.push(AmpEvent {
                client_bytes,
                server_bytes,
                validated,
            });
        }
        let mut handshake_acked = false;
        for p in &packets[start..next] {
            let level = usize::from(p.handshake_level);
            unacked[level] += 1;
            if unacked[level] == ack_every {
                unacked[level] = 0;
                client_sent += 1;
                if p.handshake_level {
                    client_bytes += HANDSHAKE_ACK_LEN as u64;
                    handshake_acked = true;
                } else {
                    client_bytes += client_datagram;
                }
            }
        }
        if next == packets.len() {
            // remaining ACKs ride along with the client's Finished
            break;
        }
        if next == start {
            stalled = true;
            break;
        }
        // server is blocked: the client's ACK timer flushes what is pending
        if unacked[0] > 0 {
            client_sent += 1;
            client_bytes += client_datagram;
            unacked[0] = 0;
        }
        if unacked[1] > 0 {
            client_sent += 1;
            client_bytes += HANDSHAKE_ACK_LEN as u64;
            unacked[1] = 0;
            handshake_acked = true;
        }
        validated |= handshake_acked;
        round_trips += 1;
        stall_round_trips += 1;
    }

    let exceeds = |policy: &EndpointPolicy, used: u64| policy.pn_window.is_some_and(|w| used > w);
    let outcome = if exceeds(server, server_numbered) || exceeds(client, client_sent) {
        Outcome::FailedPnWindow
    } else if stalled {
        Outcome::StalledAmplification
    } else {
        Outcome::Ok
    };

    let report = SimReport {
        ttfb: profile.rtt * round_trips + profile.compute_time(),
        packets_client: client_sent,
        packets_server: server_numbered + u64::from(retry_used),
        server_flight_bytes: server_bytes,
        retry_used,
        outcome,
        round_trips,
        stall_round_trips,
    };
    (report, trace)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TtfbParts {
    #[serde(serialize_with = "as_nanos")]
    pub network: Duration,
    #[serde(serialize_with = "as_nanos")]
    pub crypto_compute: Duration,
    #[serde(serialize_with = "as_nanos")]
    pub stall: Duration,
}

/// Splits the report's TTFB into round-trip, computation and
/// amplification-stall components; the parts sum to `report.ttfb`.
pub fn ttfb_decompose(report: &SimReport, profile: &HandshakeProfile) -> TtfbParts {
    let stall = profile.rtt * report.stall_round_trips;
    let network = profile.rtt * (report.round_trips - report.stall_round_trips);
    TtfbParts {
        network,
        crypto_compute: report.ttfb - network - stall,
        stall,
    }
}
