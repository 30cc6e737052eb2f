"""Fixed-size plaintext envelopes.

An envelope is the unit that gets encrypted: a message number, a
timestamp, the body, and zero padding out to a constant size. Because
every envelope of a given profile serializes to exactly the same number
of bytes, ciphertext length carries no information about the message.

Wire layout (all integers big-endian)::

    msg_number   8 bytes
    timestamp    8 bytes   Unix seconds
    body_len     2 bytes
    body         body_len bytes
    padding      0x00 up to the profile's envelope size
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from enum import Enum

from .errors import BadBodyLen, BadLength, BadPadding, BodyTooLong

HEADER_LEN = 18  # msg_number (8) + timestamp (8) + body_len (2)
_HEADER = struct.Struct(">QQH")
_U64_MAX = 2**64 - 1


class Profile(Enum):
    """Envelope size class.

    FULL targets the largest common QR symbol; COMPACT targets scanners
    that only manage about half that capacity.
    """

    FULL = 2880
    COMPACT = 1400

    @property
    def envelope_size(self) -> int:
        """Serialized envelope length in bytes."""
        return self.value

    @property
    def max_body(self) -> int:
        """Largest body this profile can carry."""
        return self.value - HEADER_LEN


@dataclass(frozen=True)
class Envelope:
    """One plaintext message with its channel metadata."""

    msg_number: int
    timestamp: int
    body: bytes
    profile: Profile = Profile.FULL

    def __post_init__(self) -> None:
        if not 0 <= self.msg_number <= _U64_MAX:
            raise ValueError(f"msg_number out of range: {self.msg_number}")
        if not 0 <= self.timestamp <= _U64_MAX:
            raise ValueError(f"timestamp out of range: {self.timestamp}")
        if len(self.body) > self.profile.max_body:
            raise BodyTooLong(
                f"body is {len(self.body)} bytes; "
                f"{self.profile.name} allows at most {self.profile.max_body}"
            )


def serialize_envelope(env: Envelope) -> bytes:
    """Serialize to exactly ``env.profile.envelope_size`` bytes.

    Deterministic: equal envelopes produce identical byte strings.
    """
    out = bytearray(env.profile.envelope_size)
    _HEADER.pack_into(out, 0, env.msg_number, env.timestamp, len(env.body))
    out[HEADER_LEN : HEADER_LEN + len(env.body)] = env.body
    return bytes(out)


def parse_envelope(raw: bytes, profile: Profile) -> Envelope:
    """Inverse of :func:`serialize_envelope`.

    Rejects wrong lengths, oversize body_len fields, and any nonzero
    padding byte; all three indicate corruption of the decrypted
    envelope.
    """
    if len(raw) != profile.envelope_size:
        raise BadLength(
            f"envelope must be {profile.envelope_size} bytes, got {len(raw)}"
        )
    msg_number, timestamp, body_len = _HEADER.unpack_from(raw, 0)
    if body_len > profile.max_body:
        raise BadBodyLen(
            f"body_len {body_len} exceeds {profile.name} maximum {profile.max_body}"
        )
    body = raw[HEADER_LEN : HEADER_LEN + body_len]
    pad = raw[HEADER_LEN + body_len :]
    if pad.count(0) != len(pad):
        raise BadPadding("nonzero byte in padding region")
    return Envelope(msg_number, timestamp, body, profile)
