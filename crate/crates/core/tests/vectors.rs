use qcl_core::keys::{derive_initial_secrets, derive_packet_keys};
use qcl_core::vectors::{load_vectors, parse_vectors};
use qcl_core::{open_packet, HpAlg, PlainPacket, SuiteId};

const PINNED: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/vectors/protected.txt");

#[test]
fn pinned_file_verifies() {
    let vectors = load_vectors(PINNED).unwrap();
    assert_eq!(vectors.len(), 2);
    for v in &vectors {
        assert_eq!(v.verify(), Ok(()), "{}", v.name);
    }
}

#[test]
fn initial_vector_opens_from_scratch() {
    let v = &load_vectors(PINNED).unwrap()[0];
    let (client, _) =
        derive_initial_secrets(&[0x83, 0x94, 0xc8, 0xf0, 0x3e, 0x51, 0x57, 0x08]).unwrap();
    let keys = derive_packet_keys(&client, SuiteId::Aes128Gcm, HpAlg::AesEcb);
    let wire = qcl_core::WirePacket {
        bytes: v.wire.clone(),
    };
    let pkt = open_packet(&keys, SuiteId::Aes128Gcm, HpAlg::AesEcb, &wire, None, 8).unwrap();
    assert_eq!(pkt.pn, 2);
    assert_eq!(pkt.payload.len(), 1162);
    assert_eq!(&pkt.payload[..4], &[0x06, 0x00, 0x40, 0xf1]);
    let rebuilt = PlainPacket::initial(
        &[0x83, 0x94, 0xc8, 0xf0, 0x3e, 0x51, 0x57, 0x08],
        &[],
        2,
        4,
        pkt.payload.clone(),
    );
    assert_eq!(rebuilt.header, pkt.header);
}

#[test]
fn every_corrupted_wire_byte_is_caught() {
    let text = std::fs::read_to_string(PINNED).unwrap();
    let v = &parse_vectors(&text).unwrap()[1];
    for i in 0..v.wire.len() {
        let mut bad = v.clone();
        bad.wire[i] ^= 0x01;
        assert_eq!(bad.verify().unwrap_err().label, "wire", "byte {i}");
    }
}
