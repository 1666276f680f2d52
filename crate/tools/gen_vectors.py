#!/usr/bin/env python3
"""Regenerates the pinned protection vectors used by the qcl-core tests.

Uses aioquic (QUIC v1 reference implementation) and pyca/cryptography as
oracles that share no code with the Rust crate.
"""
from aioquic.quic.crypto import CryptoContext, CryptoPair, hkdf_expand_label
from aioquic.tls import CipherSuite, cipher_suite_hash
from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes
from cryptography.hazmat.primitives.ciphers.aead import AESGCM

V1 = 0x00000001


def h(b):
    return b.hex()


# AEAD / block-cipher primitives
print("aes128gcm_zero_tag=" + h(AESGCM(bytes(16)).encrypt(bytes(12), b"", b"")))
enc = Cipher(algorithms.AES(bytes(16)), modes.ECB()).encryptor()
print("aes128ecb_zero_mask=" + h(enc.update(bytes(16))[:5]))
nonce = (1).to_bytes(4, "little") + bytes(12)
ks = Cipher(algorithms.ChaCha20(bytes(32), nonce), None).encryptor().update(bytes(5))
print("chacha20_ctr1_mask=" + h(ks))

# packet keys from an all-zero secret
algo = cipher_suite_hash(CipherSuite.AES_128_GCM_SHA256)
zero = bytes(32)
print("zero_secret_key=" + h(hkdf_expand_label(algo, zero, b"quic key", b"", 16)))
print("zero_secret_iv=" + h(hkdf_expand_label(algo, zero, b"quic iv", b"", 12)))
print("zero_secret_hp=" + h(hkdf_expand_label(algo, zero, b"quic hp", b"", 16)))
print("zero_secret_key32=" + h(hkdf_expand_label(algo, zero, b"quic key", b"", 32)))

# initial secrets
dcid = bytes.fromhex("8394c8f03e515708")
pair = CryptoPair()
pair.setup_initial(dcid, is_client=True, version=V1)
print("client_initial_secret=" + h(pair.send.secret))
print("server_initial_secret=" + h(pair.recv.secret))

# protected client Initial packet
header = bytes.fromhex("c300000001088394c8f03e5157080000449e00000002")
crypto = bytes([0x06, 0x00, 0x40, 0xF1]) + bytes((i * 7 + 3) % 256 for i in range(241))
payload = crypto + bytes(1162 - len(crypto))
wire = pair.encrypt_packet(header, payload, 2)
print("initial_header=" + h(header))
print("initial_payload=" + h(payload))
print("initial_wire=" + h(wire))

# short-header ChaCha20-Poly1305 packet
secret = bytes.fromhex("9ac312a7f877468ebe69422748ad00a15443f18203a07d6060f688f30f21632b")
ctx = CryptoContext()
ctx.setup(cipher_suite=CipherSuite.CHACHA20_POLY1305_SHA256, secret=secret, version=V1)
short = ctx.encrypt_packet(bytes.fromhex("4200bff4"), bytes.fromhex("01"), 654360564)
print("chacha_short_wire=" + h(short))
