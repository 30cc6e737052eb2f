"""Air-gap messaging over QR codes.

Plaintext messages become fixed-size authenticated frames (encrypt-then-
MAC), each carried by one QR symbol rendered to a portable bitmap. The
package also tracks per-channel counters for loss and replay detection
and ships a command-line tool for both the isolated-machine and
connected-machine (courier) roles.
"""

from .channel import (
    Accept,
    ChannelConfig,
    ChannelRecord,
    ChannelState,
    Replay,
    allocate_send_number,
    load_state,
    register_received,
    store_state,
)
from .crypto import (
    ChannelKeys,
    derive_keys,
    frame_size,
    open_frame,
    random_nonce,
    seal,
)
from .envelope import Envelope, Profile, parse_envelope, serialize_envelope
from .image import ModuleImage, read_pbm, write_pbm
from .qr import EcLevel, QrSymbol, capacity, qr_decode, qr_encode, render

__version__ = "0.1.0"

__all__ = [
    "Accept",
    "ChannelConfig",
    "ChannelKeys",
    "ChannelRecord",
    "ChannelState",
    "EcLevel",
    "Envelope",
    "ModuleImage",
    "Profile",
    "QrSymbol",
    "Replay",
    "allocate_send_number",
    "capacity",
    "derive_keys",
    "frame_size",
    "load_state",
    "open_frame",
    "parse_envelope",
    "qr_decode",
    "qr_encode",
    "random_nonce",
    "read_pbm",
    "register_received",
    "render",
    "seal",
    "serialize_envelope",
    "store_state",
    "write_pbm",
]
