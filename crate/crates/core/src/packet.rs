//! Packet protection and header protection for QUIC v1 packets, packet
//! number reconstruction, and MTU-driven packetization.
//!
//! Sealing applies the AEAD first (nonce = iv XOR packet number, AAD = the
//! header up to and including the encoded packet number) and then masks the
//! low flag bits and the packet number bytes with a mask derived from a
//! 16-byte ciphertext sample taken 4 bytes past the packet-number offset.
//! Opening reverses the two steps.

use crate::error::{Error, Result};
use crate::keys::PacketKeys;
use crate::suites::{
    HeaderProtector, HpAlg, PacketCipher, SuiteId, MASK_LEN, NONCE_LEN, SAMPLE_LEN, TAG_LEN,
};

/// Largest packet number representable in QUIC (2^62 - 1).
pub const MAX_PN: u64 = (1 << 62) - 1;
/// IPv4 + UDP header bytes charged against the MTU for every packet.
pub const IP_UDP_OVERHEAD: usize = 28;
/// Default short-header DCID length used by the benchmarks.
pub const DEFAULT_DCID_LEN: usize = 8;

const LONG_HEADER_BIT: u8 = 0x80;
const FIXED_BIT: u8 = 0x40;
const LONG_FLAGS_MASK: u8 = 0x0f;
const SHORT_FLAGS_MASK: u8 = 0x1f;
const LONG_RESERVED_BITS: u8 = 0x0c;
const SHORT_RESERVED_BITS: u8 = 0x18;
const QUIC_V1: u32 = 1;

/// XORs the big-endian, left-padded packet number into the IV.
pub fn compute_nonce(iv: &[u8; NONCE_LEN], pn: u64) -> [u8; NONCE_LEN] {
    let mut nonce = *iv;
    for (n, p) in nonce[NONCE_LEN - 8..].iter_mut().zip(pn.to_be_bytes()) {
        *n ^= p;
    }
    nonce
}

/// Reconstructs a full packet number from its truncated encoding, picking the
/// candidate closest to `largest_acked + 1`. `None` means nothing has been
/// acknowledged yet.
pub fn pn_decode(truncated: u64, pn_len: usize, largest_acked: Option<u64>) -> u64 {
    let expected = largest_acked.map_or(0, |l| l + 1);
    let win = 1u64 << (8 * pn_len);
    let hwin = win / 2;
    let mask = win - 1;
    let candidate = (expected & !mask) | truncated;
    if candidate + hwin <= expected && candidate < (1 << 62) - win {
        candidate + win
    } else if candidate > expected + hwin && candidate >= win {
        candidate - win
    } else {
        candidate
    }
}

/// Minimum number of bytes needed to encode `pn` unambiguously while the
/// peer has acknowledged up to `largest_acked`.
pub fn pn_encode_len(pn: u64, largest_acked: Option<u64>) -> usize {
    let unacked = match largest_acked {
        Some(l) => pn.saturating_sub(l),
        None => pn + 1,
    };
    (1..=4).find(|&n| unacked <= 1 << (8 * n - 1)).unwrap_or(4)
}

fn read_varint(buf: &[u8], pos: &mut usize) -> Result<u64> {
    let first = *buf
        .get(*pos)
        .ok_or(Error::MalformedHeader("truncated varint"))?;
    let len = 1usize << (first >> 6);
    let bytes = buf
        .get(*pos..*pos + len)
        .ok_or(Error::MalformedHeader("truncated varint"))?;
    let mut v = u64::from(first & 0x3f);
    for b in &bytes[1..] {
        v = (v << 8) | u64::from(*b);
    }
    *pos += len;
    Ok(v)
}

fn read_cid(buf: &[u8], pos: &mut usize) -> Result<()> {
    let len = usize::from(
        *buf.get(*pos)
            .ok_or(Error::MalformedHeader("truncated header"))?,
    );
    if len > 20 {
        return Err(Error::MalformedHeader("connection ID longer than 20 bytes"));
    }
    *pos += 1 + len;
    if *pos > buf.len() {
        return Err(Error::MalformedHeader("truncated connection ID"));
    }
    Ok(())
}

/// Locates the packet-number field. For long headers the length field is
/// returned as well; it covers the packet number, payload and tag.
fn parse_pn_offset(buf: &[u8], short_dcid_len: usize) -> Result<(usize, Option<u64>)> {
    let first = *buf.first().ok_or(Error::MalformedHeader("empty packet"))?;
    if first & FIXED_BIT == 0 {
        return Err(Error::MalformedHeader("fixed bit is clear"));
    }
    if first & LONG_HEADER_BIT == 0 {
        let off = 1 + short_dcid_len;
        if off > buf.len() {
            return Err(Error::MalformedHeader("truncated short header"));
        }
        return Ok((off, None));
    }
    let version = buf
        .get(1..5)
        .ok_or(Error::MalformedHeader("truncated long header"))?;
    if u32::from_be_bytes(version.try_into().expect("4 bytes")) != QUIC_V1 {
        return Err(Error::MalformedHeader("unsupported version"));
    }
    let mut pos = 5;
    read_cid(buf, &mut pos)?;
    read_cid(buf, &mut pos)?;
    match (first >> 4) & 0x03 {
        0 => {
            let token_len = read_varint(buf, &mut pos)?;
            pos = pos
                .checked_add(usize::try_from(token_len).unwrap_or(usize::MAX))
                .filter(|&p| p <= buf.len())
                .ok_or(Error::MalformedHeader("truncated token"))?;
        }
        1 | 2 => {}
        _ => return Err(Error::MalformedHeader("retry packets are not protected")),
    }
    let length = read_varint(buf, &mut pos)?;
    Ok((pos, Some(length)))
}

fn flags_mask(first: u8) -> u8 {
    if first & LONG_HEADER_BIT != 0 {
        LONG_FLAGS_MASK
    } else {
        SHORT_FLAGS_MASK
    }
}

fn reserved_bits(first: u8) -> u8 {
    if first & LONG_HEADER_BIT != 0 {
        LONG_RESERVED_BITS
    } else {
        SHORT_RESERVED_BITS
    }
}

/// An unprotected packet. `header` runs up to (not including) the packet
/// number field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlainPacket {
    pub header: Vec<u8>,
    pub pn: u64,
    pub pn_len: usize,
    pub payload: Vec<u8>,
}

impl PlainPacket {
    /// 1-RTT packet with a short header.
    pub fn short(dcid: &[u8], pn: u64, pn_len: usize, payload: Vec<u8>) -> Self {
        let mut header = Vec::with_capacity(1 + dcid.len());
        header.push(FIXED_BIT | (pn_len.saturating_sub(1) as u8 & 0x03));
        header.extend_from_slice(dcid);
        Self {
            header,
            pn,
            pn_len,
            payload,
        }
    }

    /// Initial packet with an empty token and a 2-byte length field.
    pub fn initial(dcid: &[u8], scid: &[u8], pn: u64, pn_len: usize, payload: Vec<u8>) -> Self {
        let mut header = Vec::with_capacity(7 + dcid.len() + scid.len() + 2);
        header.push(LONG_HEADER_BIT | FIXED_BIT | (pn_len.saturating_sub(1) as u8 & 0x03));
        header.extend_from_slice(&QUIC_V1.to_be_bytes());
        header.push(dcid.len() as u8);
        header.extend_from_slice(dcid);
        header.push(scid.len() as u8);
        header.extend_from_slice(scid);
        header.push(0); // token length
        let length = (pn_len + payload.len() + TAG_LEN) as u16;
        header.extend_from_slice(&(0x4000 | length).to_be_bytes());
        Self {
            header,
            pn,
            pn_len,
            payload,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.pn > MAX_PN {
            return Err(Error::PacketNumberOutOfRange(self.pn));
        }
        if !(1..=4).contains(&self.pn_len) {
            return Err(Error::MalformedHeader("packet number length must be 1..=4"));
        }
        let first = *self
            .header
            .first()
            .ok_or(Error::MalformedHeader("empty header"))?;
        if usize::from(first & 0x03) + 1 != self.pn_len {
            return Err(Error::MalformedHeader(
                "packet number length bits disagree with pn_len",
            ));
        }
        if first & reserved_bits(first) != 0 {
            return Err(Error::MalformedHeader("reserved bits set"));
        }
        if first & LONG_HEADER_BIT != 0 {
            let (off, length) = parse_pn_offset(&self.header, 0)?;
            if off != self.header.len() {
                return Err(Error::MalformedHeader(
                    "header does not end at the packet number",
                ));
            }
            if length != Some((self.pn_len + self.payload.len() + TAG_LEN) as u64) {
                return Err(Error::MalformedHeader(
                    "length field does not match packet size",
                ));
            }
        } else if first & FIXED_BIT == 0 {
            return Err(Error::MalformedHeader("fixed bit is clear"));
        }
        Ok(())
    }
}

/// The protected on-wire bytes of one packet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WirePacket {
    pub bytes: Vec<u8>,
}

/// Keyed protection state for one direction: AEAD, header protection and IV.
#[derive(Debug)]
pub struct Protection {
    iv: [u8; NONCE_LEN],
    cipher: PacketCipher,
    hp: HeaderProtector,
}

impl Protection {
    pub fn new(keys: &PacketKeys, suite: SuiteId, hp_alg: HpAlg) -> Result<Self> {
        Ok(Self {
            iv: keys.iv,
            cipher: PacketCipher::new(suite, &keys.key)?,
            hp: HeaderProtector::new(hp_alg, &keys.hp)?,
        })
    }

    pub fn suite(&self) -> SuiteId {
        self.cipher.suite()
    }

    pub fn hp_alg(&self) -> HpAlg {
        self.hp.alg()
    }

    /// Packet protection stage. `packet` holds `header | pn | payload | tag`,
    /// with the last 16 bytes reserved for the tag.
    pub fn protect_payload(&self, packet: &mut [u8], pn_offset: usize, pn_len: usize, pn: u64) {
        let nonce = compute_nonce(&self.iv, pn);
        let (aad, rest) = packet.split_at_mut(pn_offset + pn_len);
        let body_len = rest.len() - TAG_LEN;
        let (body, tag) = rest.split_at_mut(body_len);
        tag.copy_from_slice(&self.cipher.seal_in_place(&nonce, aad, body));
    }

    /// Header protection stage on an already-sealed packet. No-op when HP is off.
    pub fn protect_header(&self, packet: &mut [u8], pn_offset: usize, pn_len: usize) {
        if !self.hp.is_enabled() {
            return;
        }
        let mask = self.sample_mask(packet, pn_offset);
        packet[0] ^= mask[0] & flags_mask(packet[0]);
        for (b, m) in packet[pn_offset..pn_offset + pn_len]
            .iter_mut()
            .zip(&mask[1..])
        {
            *b ^= m;
        }
    }

    fn sample_mask(&self, packet: &[u8], pn_offset: usize) -> [u8; MASK_LEN] {
        let sample: &[u8; SAMPLE_LEN] = packet[pn_offset + 4..pn_offset + 4 + SAMPLE_LEN]
            .try_into()
            .expect("sample length");
        self.hp.mask(sample)
    }

    fn check_sample_room(&self, packet_len: usize, pn_offset: usize) -> Result<()> {
        let needed = 4 + SAMPLE_LEN;
        let actual = packet_len.saturating_sub(pn_offset);
        if self.hp.is_enabled() && actual < needed {
            return Err(Error::PayloadTooShortForSample { needed, actual });
        }
        Ok(())
    }

    /// Removes header protection in place and returns the packet number length.
    pub fn unprotect_header(&self, packet: &mut [u8], pn_offset: usize) -> Result<usize> {
        self.check_sample_room(packet.len(), pn_offset)?;
        if self.hp.is_enabled() {
            let mask = self.sample_mask(packet, pn_offset);
            packet[0] ^= mask[0] & flags_mask(packet[0]);
            let pn_len = usize::from(packet[0] & 0x03) + 1;
            for (b, m) in packet[pn_offset..pn_offset + pn_len]
                .iter_mut()
                .zip(&mask[1..])
            {
                *b ^= m;
            }
            Ok(pn_len)
        } else {
            Ok(usize::from(packet[0] & 0x03) + 1)
        }
    }

    /// Verifies and decrypts the payload in place; the plaintext ends up in
    /// `packet[pn_offset + pn_len..len - 16]`.
    pub fn unprotect_payload(
        &self,
        packet: &mut [u8],
        pn_offset: usize,
        pn_len: usize,
        pn: u64,
    ) -> Result<()> {
        let nonce = compute_nonce(&self.iv, pn);
        let (aad, rest) = packet.split_at_mut(pn_offset + pn_len);
        let body_len = rest.len() - TAG_LEN;
        let (body, tag) = rest.split_at_mut(body_len);
        let tag: &[u8; TAG_LEN] = (&*tag).try_into().expect("tag length");
        self.cipher.open_in_place(&nonce, aad, body, tag)
    }

    pub fn seal(&self, pkt: &PlainPacket) -> Result<WirePacket> {
        pkt.validate()?;
        let pn_offset = pkt.header.len();
        let total = pn_offset + pkt.pn_len + pkt.payload.len() + TAG_LEN;
        self.check_sample_room(total, pn_offset)?;

        let mut bytes = Vec::with_capacity(total);
        bytes.extend_from_slice(&pkt.header);
        bytes.extend_from_slice(&pkt.pn.to_be_bytes()[8 - pkt.pn_len..]);
        bytes.extend_from_slice(&pkt.payload);
        bytes.resize(total, 0);

        self.protect_payload(&mut bytes, pn_offset, pkt.pn_len, pkt.pn);
        self.protect_header(&mut bytes, pn_offset, pkt.pn_len);
        Ok(WirePacket { bytes })
    }

    pub fn open(
        &self,
        wire: &WirePacket,
        largest_acked: Option<u64>,
        short_dcid_len: usize,
    ) -> Result<PlainPacket> {
        let mut bytes = wire.bytes.clone();
        let (pn_offset, length) = parse_pn_offset(&bytes, short_dcid_len)?;
        if let Some(length) = length {
            if pn_offset as u64 + length != bytes.len() as u64 {
                return Err(Error::MalformedHeader(
                    "length field does not match packet size",
                ));
            }
        }
        let pn_len = self.unprotect_header(&mut bytes, pn_offset)?;
        if bytes.len() < pn_offset + pn_len + TAG_LEN {
            return Err(Error::TooShort(bytes.len() - pn_offset));
        }
        let truncated = bytes[pn_offset..pn_offset + pn_len]
            .iter()
            .fold(0u64, |acc, b| (acc << 8) | u64::from(*b));
        let pn = pn_decode(truncated, pn_len, largest_acked);
        self.unprotect_payload(&mut bytes, pn_offset, pn_len, pn)?;
        if bytes[0] & reserved_bits(bytes[0]) != 0 {
            return Err(Error::MalformedHeader("reserved bits set"));
        }
        let payload = bytes[pn_offset + pn_len..bytes.len() - TAG_LEN].to_vec();
        bytes.truncate(pn_offset);
        Ok(PlainPacket {
            header: bytes,
            pn,
            pn_len,
            payload,
        })
    }
}

/// Applies packet protection, then header protection (unless `hp_alg` is OFF).
pub fn seal_packet(
    keys: &PacketKeys,
    suite: SuiteId,
    hp_alg: HpAlg,
    pkt: &PlainPacket,
) -> Result<WirePacket> {
    Protection::new(keys, suite, hp_alg)?.seal(pkt)
}

/// Inverse of [`seal_packet`]. Short headers do not carry their DCID length,
/// so the caller supplies it; it is ignored for long headers.
pub fn open_packet(
    keys: &PacketKeys,
    suite: SuiteId,
    hp_alg: HpAlg,
    wire: &WirePacket,
    largest_acked: Option<u64>,
    short_dcid_len: usize,
) -> Result<PlainPacket> {
    Protection::new(keys, suite, hp_alg)?.open(wire, largest_acked, short_dcid_len)
}

/// How a stream of `total_len` payload bytes splits into packets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PacketPlan {
    /// Payload bytes carried by each full packet.
    pub capacity: usize,
    pub full_packets: u64,
    /// Size of the trailing partial packet, 0 when there is none.
    pub last: usize,
}

impl PacketPlan {
    pub fn count(&self) -> u64 {
        self.full_packets + u64::from(self.last > 0)
    }

    pub fn total_len(&self) -> u64 {
        self.full_packets * self.capacity as u64 + self.last as u64
    }

    pub fn sizes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.full_packets)
            .map(|_| self.capacity)
            .chain((self.last > 0).then_some(self.last))
    }
}

/// Per-packet payload capacity once IP/UDP, header, packet number and tag
/// have been taken out of `mtu`.
pub fn payload_capacity(mtu: usize, header_len: usize, pn_len: usize) -> Result<usize> {
    let overhead = IP_UDP_OVERHEAD + header_len + pn_len + TAG_LEN;
    match mtu.checked_sub(overhead) {
        Some(c) if c > 0 => Ok(c),
        _ => Err(Error::MtuTooSmall { mtu, overhead }),
    }
}

pub fn plan_packets(
    total_len: u64,
    mtu: usize,
    header_len: usize,
    pn_len: usize,
) -> Result<PacketPlan> {
    let capacity = payload_capacity(mtu, header_len, pn_len)?;
    Ok(PacketPlan {
        capacity,
        full_packets: total_len / capacity as u64,
        last: (total_len % capacity as u64) as usize,
    })
}

/// Greedy fill: every packet but the last carries the full capacity.
pub fn packetize(
    total_len: u64,
    mtu: usize,
    header_len: usize,
    pn_len: usize,
) -> Result<Vec<usize>> {
    Ok(plan_packets(total_len, mtu, header_len, pn_len)?
        .sizes()
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::keys::derive_packet_keys_from;

    /// Brute force: scan every value with the right low bytes near the
    /// expected packet number and keep the closest (ties go to the larger).
    fn closest_candidate(truncated: u64, pn_len: usize, largest: Option<u64>) -> u64 {
        let expected = largest.map_or(0, |l| l + 1) as i128;
        let win = 1i128 << (8 * pn_len);
        let mut best: Option<i128> = None;
        let mut c = truncated as i128 + ((expected - 2 * win).max(0) / win) * win;
        while c <= expected + 2 * win {
            if c >= 0 && best.is_none_or(|b| (c - expected).abs() <= (b - expected).abs()) {
                best = Some(c);
            }
            c += win;
        }
        best.unwrap() as u64
    }

    #[test]
    fn nonce_examples() {
        assert_eq!(compute_nonce(&[0; 12], 7), {
            let mut n = [0; 12];
            n[11] = 7;
            n
        });
        assert_eq!(compute_nonce(&[0xff; 12], 0), [0xff; 12]);
        let iv: [u8; 12] = core::array::from_fn(|i| i as u8 + 1);
        let n = compute_nonce(&iv, 0x1234);
        assert_eq!(&n[..10], &iv[..10]);
        assert_eq!(n[10], 0x0b ^ 0x12);
        assert_eq!(n[11], 0x0c ^ 0x34);
    }

    #[test]
    fn pn_decode_examples() {
        assert_eq!(pn_decode(0x00, 1, None), 0);
        assert_eq!(pn_decode(0x34, 1, Some(0x1233)), 0x1234);
        assert_eq!(pn_decode(0x01, 1, Some(0xfe)), 0x101);
        // RFC 9000 A.3 example
        assert_eq!(pn_decode(0x9b32, 2, Some(0xa82f30ea)), 0xa82f9b32);
    }

    #[test]
    fn pn_decode_matches_brute_force() {
        for largest in [
            None,
            Some(0),
            Some(0x7f),
            Some(0xff),
            Some(0x1233),
            Some(0xfffe),
        ] {
            for pn_len in 1..=2 {
                for t in 0..(1u64 << (8 * pn_len)) {
                    assert_eq!(
                        pn_decode(t, pn_len, largest),
                        closest_candidate(t, pn_len, largest),
                        "t={t:#x} len={pn_len} largest={largest:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn encode_len_round_trips() {
        for (pn, largest) in [
            (0, None),
            (200, Some(0)),
            (0xac5c02, Some(0xabe8b3)),
            (1 << 30, Some(1)),
        ] {
            let len = pn_encode_len(pn, largest);
            let truncated = pn & ((1u64 << (8 * len)) - 1);
            assert_eq!(pn_decode(truncated, len, largest), pn);
        }
        // RFC 9000 A.2 examples
        assert_eq!(pn_encode_len(0xac5c02, Some(0xabe8b3)), 2);
        assert_eq!(pn_encode_len(0xace8fe, Some(0xabe8b3)), 3);
    }

    #[test]
    fn packetize_edges() {
        assert!(packetize(0, 1500, 9, 2).unwrap().is_empty());
        let cap = payload_capacity(1500, 9, 2).unwrap();
        assert_eq!(cap, 1500 - 28 - 9 - 2 - 16);
        assert_eq!(packetize(cap as u64, 1500, 9, 2).unwrap(), vec![cap]);
        assert_eq!(packetize(cap as u64 + 1, 1500, 9, 2).unwrap(), vec![cap, 1]);
        assert!(matches!(
            packetize(10, 55, 9, 2),
            Err(Error::MtuTooSmall {
                mtu: 55,
                overhead: 55
            })
        ));
        assert_eq!(packetize(3, 56, 9, 2).unwrap(), vec![1, 1, 1]);
    }

    fn keys(suite: SuiteId, hp: HpAlg) -> PacketKeys {
        derive_packet_keys_from(&[0x42; 32], suite, hp).unwrap()
    }

    #[test]
    fn noop_off_is_plain_layout() {
        let pkt = PlainPacket::short(&[1, 2, 3, 4, 5, 6, 7, 8], 0x0102, 2, b"hello".to_vec());
        let wire = seal_packet(
            &keys(SuiteId::Noop, HpAlg::Off),
            SuiteId::Noop,
            HpAlg::Off,
            &pkt,
        )
        .unwrap();
        let mut expected = pkt.header.clone();
        expected.extend_from_slice(&[0x01, 0x02]);
        expected.extend_from_slice(b"hello");
        expected.extend_from_slice(&[0; 16]);
        assert_eq!(wire.bytes, expected);
    }

    #[test]
    fn sample_requirement() {
        let k = keys(SuiteId::Aes128Gcm, HpAlg::AesEcb);
        let pkt = PlainPacket::short(&[0; 8], 1, 1, vec![0; 2]);
        assert_eq!(
            seal_packet(&k, SuiteId::Aes128Gcm, HpAlg::AesEcb, &pkt),
            Err(Error::PayloadTooShortForSample {
                needed: 20,
                actual: 19
            })
        );
        let pkt = PlainPacket::short(&[0; 8], 1, 1, vec![0; 3]);
        assert!(seal_packet(&k, SuiteId::Aes128Gcm, HpAlg::AesEcb, &pkt).is_ok());
        // with header protection off there is nothing to sample
        let pkt = PlainPacket::short(&[0; 8], 1, 1, vec![]);
        let k = keys(SuiteId::Aes128Gcm, HpAlg::Off);
        let wire = seal_packet(&k, SuiteId::Aes128Gcm, HpAlg::Off, &pkt).unwrap();
        assert_eq!(
            open_packet(&k, SuiteId::Aes128Gcm, HpAlg::Off, &wire, None, 8).unwrap(),
            pkt
        );
    }

    #[test]
    fn header_validation() {
        let k = keys(SuiteId::Aes128Gcm, HpAlg::AesEcb);
        let mut pkt = PlainPacket::short(&[0; 8], 1, 2, vec![0; 10]);
        pkt.pn_len = 3;
        assert!(matches!(
            seal_packet(&k, SuiteId::Aes128Gcm, HpAlg::AesEcb, &pkt),
            Err(Error::MalformedHeader(_))
        ));
        let pkt = PlainPacket::short(&[0; 8], 1 << 62, 4, vec![0; 10]);
        assert_eq!(
            seal_packet(&k, SuiteId::Aes128Gcm, HpAlg::AesEcb, &pkt),
            Err(Error::PacketNumberOutOfRange(1 << 62))
        );
        let mut pkt = PlainPacket::initial(&[1; 8], &[], 0, 1, vec![0; 30]);
        pkt.payload.push(0);
        assert!(matches!(
            seal_packet(&k, SuiteId::Aes128Gcm, HpAlg::AesEcb, &pkt),
            Err(Error::MalformedHeader(_))
        ));
    }

    #[test]
    fn hp_changes_only_flags_and_pn() {
        let k = keys(SuiteId::ChaCha20Poly1305, HpAlg::ChaCha20Raw);
        let pkt = PlainPacket::short(&[9; 8], 0xabcdef, 4, vec![7; 40]);
        let p = Protection::new(&k, SuiteId::ChaCha20Poly1305, HpAlg::ChaCha20Raw).unwrap();
        let masked = p.seal(&pkt).unwrap();
        let off = Protection::new(&k, SuiteId::ChaCha20Poly1305, HpAlg::Off).unwrap();
        let unmasked = off.seal(&pkt).unwrap();
        assert_eq!(
            masked.bytes[0] & !SHORT_FLAGS_MASK,
            unmasked.bytes[0] & !SHORT_FLAGS_MASK
        );
        assert_eq!(masked.bytes[1..9], unmasked.bytes[1..9]);
        assert_eq!(masked.bytes[13..], unmasked.bytes[13..]);
        assert_eq!(&unmasked.bytes[9..13], &[0x00, 0xab, 0xcd, 0xef]);
    }
}
