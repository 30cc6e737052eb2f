"""Passphrase key derivation and the authenticated frame format.

A frame is the fixed-size ciphertext carried by one QR symbol::

    magic    2 bytes   0x51 0x30 ("Q0")
    version  1 byte    0x01
    suite    1 byte    0x01 (AES-256-CTR + HMAC-SHA-256)
    nonce    16 bytes  random per message
    ct       envelope_size bytes
    tag      32 bytes  HMAC-SHA-256 over magic||version||suite||nonce||ct

Composition is encrypt-then-MAC: :func:`open_frame` verifies the tag in
constant time and only then decrypts, so forgeries are rejected without
touching plaintext. Frame length is constant per profile; an observer
learns nothing from it but the profile in use.
"""

from __future__ import annotations

import hashlib
import hmac
import os
from dataclasses import dataclass
from typing import Callable

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from .envelope import Envelope, Profile, parse_envelope, serialize_envelope
from .errors import (
    AuthFailure,
    BadChannelId,
    BadLength,
    BadMagic,
    EmptyPassphrase,
    EntropyUnavailable,
    UnsupportedVersion,
)

MAGIC = b"Q0"
WIRE_VERSION = 0x01
SUITE_AES256CTR_HMACSHA256 = 0x01
HEADER = MAGIC + bytes((WIRE_VERSION, SUITE_AES256CTR_HMACSHA256))
NONCE_LEN = 16
TAG_LEN = 32
FRAME_OVERHEAD = len(HEADER) + NONCE_LEN + TAG_LEN

KDF_ITERATIONS = 600_000
_KDF_SALT_PREFIX = b"qrypt0/v1/"
_ENC_LABEL = b"\x01enc"
_MAC_LABEL = b"\x02mac"

# Channel ids feed the KDF salt and name the state file, so they are
# restricted to printable ASCII without '/'.
_CHANNEL_ID_OK = frozenset(chr(c) for c in range(0x21, 0x7F)) - {"/"}


def frame_size(profile: Profile) -> int:
    """Constant frame length for the given profile (FULL: 2932, COMPACT: 1452)."""
    return FRAME_OVERHEAD + profile.envelope_size


@dataclass(frozen=True)
class ChannelKeys:
    """Cipher and MAC keys for one channel. Never persisted."""

    k_enc: bytes
    k_mac: bytes

    def __post_init__(self) -> None:
        if len(self.k_enc) != 32 or len(self.k_mac) != 32:
            raise ValueError("channel keys must be 32 bytes each")

    def __repr__(self) -> str:  # keep key bytes out of logs and tracebacks
        return "ChannelKeys(k_enc=<32 bytes>, k_mac=<32 bytes>)"


def validate_channel_id(channel_id: str) -> str:
    """Return ``channel_id`` if acceptable, else raise BadChannelId."""
    if not channel_id:
        raise BadChannelId("channel id must not be empty")
    bad = set(channel_id) - _CHANNEL_ID_OK
    if bad:
        raise BadChannelId(
            f"channel id may only contain printable ASCII without '/'; "
            f"offending: {sorted(bad)!r}"
        )
    return channel_id


def derive_keys(passphrase: str, channel_id: str) -> ChannelKeys:
    """Derive the channel's cipher and MAC keys from the shared passphrase.

    master = PBKDF2-HMAC-SHA-256(passphrase, "qrypt0/v1/" + channel_id,
    600000 iterations, 32 bytes); the two keys are then separated with
    labelled HMAC-SHA-256 calls. Deterministic, so both parties derive
    identical keys from the same inputs; the iteration count makes bulk
    passphrase guessing expensive.
    """
    if not passphrase:
        raise EmptyPassphrase("passphrase must not be empty")
    validate_channel_id(channel_id)
    salt = _KDF_SALT_PREFIX + channel_id.encode("ascii")
    master = hashlib.pbkdf2_hmac(
        "sha256", passphrase.encode("utf-8"), salt, KDF_ITERATIONS, dklen=32
    )
    k_enc = hmac.new(master, _ENC_LABEL, hashlib.sha256).digest()
    k_mac = hmac.new(master, _MAC_LABEL, hashlib.sha256).digest()
    return ChannelKeys(k_enc=k_enc, k_mac=k_mac)


def random_nonce() -> bytes:
    """16 bytes from the OS entropy source."""
    try:
        return os.urandom(NONCE_LEN)
    except (OSError, NotImplementedError) as exc:
        raise EntropyUnavailable("OS random source unavailable") from exc


def _ctr_xor(key: bytes, nonce: bytes, data: bytes) -> bytes:
    """AES-256-CTR keystream XOR; the initial counter block is the nonce.

    CTR is symmetric, so this both encrypts and decrypts. Kept as a
    separate seam so tests can observe that failed frames are never
    decrypted.
    """
    cipher = Cipher(algorithms.AES(key), modes.CTR(nonce))
    enc = cipher.encryptor()
    return enc.update(data) + enc.finalize()


def _tag(k_mac: bytes, nonce: bytes, ct: bytes) -> bytes:
    return hmac.new(k_mac, HEADER + nonce + ct, hashlib.sha256).digest()


def seal(
    env: Envelope,
    keys: ChannelKeys,
    nonce_source: Callable[[], bytes] = random_nonce,
) -> bytes:
    """Encrypt and authenticate an envelope into one wire frame.

    Output length is ``frame_size(env.profile)`` for every valid body.
    """
    nonce = nonce_source()
    if len(nonce) != NONCE_LEN:
        raise ValueError(f"nonce must be {NONCE_LEN} bytes, got {len(nonce)}")
    ct = _ctr_xor(keys.k_enc, nonce, serialize_envelope(env))
    return HEADER + nonce + ct + _tag(keys.k_mac, nonce, ct)


def open_frame(frame: bytes, keys: ChannelKeys, profile: Profile) -> Envelope:
    """Verify and decrypt an untrusted frame.

    The MAC is checked (constant-time comparison) before any
    decryption. AuthFailure deliberately reports nothing about where
    the frame differs.
    """
    expected = frame_size(profile)
    if len(frame) != expected:
        raise BadLength(f"frame must be {expected} bytes, got {len(frame)}")
    if frame[:2] != MAGIC:
        raise BadMagic("not a qrypt0 frame")
    if frame[2] != WIRE_VERSION:
        raise UnsupportedVersion(f"unsupported wire version 0x{frame[2]:02x}")
    if frame[3] != SUITE_AES256CTR_HMACSHA256:
        raise UnsupportedVersion(f"unsupported ciphersuite 0x{frame[3]:02x}")
    nonce = frame[4 : 4 + NONCE_LEN]
    ct = frame[4 + NONCE_LEN : -TAG_LEN]
    tag = frame[-TAG_LEN:]
    if not hmac.compare_digest(tag, _tag(keys.k_mac, nonce, ct)):
        raise AuthFailure("frame authentication failed")
    return parse_envelope(_ctr_xor(keys.k_enc, nonce, ct), profile)
