"""QR symbol encoder and decoder (model 2, byte mode, versions 1-40).

The encoder packs a byte payload into data codewords, adds per-block
Reed-Solomon parity, interleaves, places the bits in the module matrix,
and picks the mask with the lowest standard penalty score (N1=3, N2=3,
N3=40, N4=10). The decoder reverses every step and tolerates module
damage up to each block's correction capacity.

Decoding operates on clean, axis-aligned module images (integral scale,
light quiet zone) as produced by :func:`render`; there is no camera
pipeline. Format and version words are recovered by minimum Hamming
distance over the 32 / 34 valid codewords, correcting up to 3 bit
errors each.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from itertools import cycle

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import qr_tables as tables
from .errors import (
    FormatInfoUnreadable,
    NoSymbolFound,
    PayloadTooLarge,
    StructureMismatch,
    VersionInfoUnreadable,
)
from .image import ModuleImage
from .reed_solomon import rs_decode, rs_encode

QUIET_ZONE = 4
PAD_CODEWORDS = (0xEC, 0x11)

PENALTY_N1 = 3
PENALTY_N2 = 3
PENALTY_N3 = 40
PENALTY_N4 = 10


class EcLevel(Enum):
    """Error correction level; ordinal indexes the standard's tables."""

    L = (0, 1)
    M = (1, 0)
    Q = (2, 3)
    H = (3, 2)

    def __init__(self, ordinal: int, format_bits: int) -> None:
        self.ordinal = ordinal
        self.format_bits = format_bits


_LEVEL_BY_FORMAT_BITS = {lvl.format_bits: lvl for lvl in EcLevel}


@dataclass(frozen=True)
class QrSymbol:
    """A finished symbol: square module matrix plus its parameters."""

    version: int
    ec_level: EcLevel
    mask: int
    modules: np.ndarray

    def __post_init__(self) -> None:
        tables.check_version(self.version)
        if not 0 <= self.mask <= 7:
            raise ValueError(f"mask must be 0..7, got {self.mask}")
        arr = np.asarray(self.modules, dtype=bool)
        arr.setflags(write=False)
        object.__setattr__(self, "modules", arr)
        if arr.shape != (self.side, self.side):
            raise ValueError(
                f"version {self.version} needs a {self.side}x{self.side} matrix"
            )

    @property
    def side(self) -> int:
        return tables.symbol_side(self.version)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, QrSymbol):
            return NotImplemented
        return (
            self.version == other.version
            and self.ec_level is other.ec_level
            and self.mask == other.mask
            and bool(np.array_equal(self.modules, other.modules))
        )

    def __hash__(self) -> int:
        return hash((self.version, self.ec_level, self.mask, self.modules.tobytes()))


def capacity(version: int, ec_level: EcLevel = EcLevel.L) -> int:
    """Byte-mode payload capacity of (version, level)."""
    return tables.byte_capacity(version, ec_level.ordinal)


# --- fixed patterns -------------------------------------------------------

@lru_cache(maxsize=None)
def _function_layout(version: int) -> tuple[np.ndarray, np.ndarray]:
    """(base modules, is_function) for a version.

    The base carries every module whose value is independent of payload
    and mask: finders, separators, timing, alignment, the dark module,
    and version information. Format cells are reserved (marked as
    function modules) but written later, per mask.
    """
    side = tables.symbol_side(version)
    modules = np.zeros((side, side), dtype=bool)
    isfunc = np.zeros((side, side), dtype=bool)

    def set_function(r: int, c: int, dark: bool) -> None:
        modules[r, c] = dark
        isfunc[r, c] = True

    # timing patterns
    for i in range(side):
        set_function(6, i, i % 2 == 0)
        set_function(i, 6, i % 2 == 0)

    # finder patterns with separators (ring at distance 2 and 4 is light)
    for cr, cc in ((3, 3), (3, side - 4), (side - 4, 3)):
        for dr in range(-4, 5):
            for dc in range(-4, 5):
                r, c = cr + dr, cc + dc
                if 0 <= r < side and 0 <= c < side:
                    set_function(r, c, max(abs(dr), abs(dc)) not in (2, 4))

    # alignment patterns, skipping the three finder corners
    positions = tables.ALIGNMENT_POSITIONS[version]
    last = len(positions) - 1
    for i, r in enumerate(positions):
        for j, c in enumerate(positions):
            if (i, j) in ((0, 0), (0, last), (last, 0)):
                continue
            for dr in range(-2, 3):
                for dc in range(-2, 3):
                    set_function(r + dr, c + dc, max(abs(dr), abs(dc)) != 1)

    # reserve format cells; values are drawn per mask candidate
    for positions_rc in _format_positions(side):
        for r, c in positions_rc:
            set_function(r, c, False)
    set_function(side - 8, 8, True)  # dark module

    # version information, two copies, for version 7 and up
    if version >= 7:
        value = _version_value(version)
        for i in range(18):
            dark = bool((value >> i) & 1)
            r, c = i // 3, side - 11 + i % 3
            set_function(r, c, dark)
            set_function(c, r, dark)

    modules.setflags(write=False)
    isfunc.setflags(write=False)
    return modules, isfunc


@lru_cache(maxsize=None)
def _format_positions(side: int) -> tuple[tuple[tuple[int, int], ...], ...]:
    """(copy1, copy2): (row, col) of format bit i at index i."""
    copy1 = (
        [(i, 8) for i in range(6)]
        + [(7, 8), (8, 8), (8, 7)]
        + [(8, 14 - i) for i in range(9, 15)]
    )
    copy2 = [(8, side - 1 - i) for i in range(8)] + [
        (side - 15 + i, 8) for i in range(8, 15)
    ]
    return tuple(copy1), tuple(copy2)


def _format_value(ec_level: EcLevel, mask: int) -> int:
    """15-bit format word: 5 data bits, BCH(15,5) remainder, fixed XOR mask."""
    data = ec_level.format_bits << 3 | mask
    rem = data
    for _ in range(10):
        rem = (rem << 1) ^ ((rem >> 9) * 0x537)
    return (data << 10 | rem) ^ 0x5412


def _version_value(version: int) -> int:
    """18-bit version word: 6 data bits plus BCH(18,6) remainder."""
    rem = version
    for _ in range(12):
        rem = (rem << 1) ^ ((rem >> 11) * 0x1F25)
    return version << 12 | rem


_FORMAT_CANDIDATES = tuple(
    (_format_value(lvl, mask), lvl, mask) for lvl in EcLevel for mask in range(8)
)
_VERSION_CANDIDATES = tuple(
    (_version_value(v), v) for v in range(7, tables.MAX_VERSION + 1)
)


def _draw_format(modules: np.ndarray, ec_level: EcLevel, mask: int) -> None:
    value = _format_value(ec_level, mask)
    for positions in _format_positions(modules.shape[0]):
        for i, (r, c) in enumerate(positions):
            modules[r, c] = bool((value >> i) & 1)


@lru_cache(maxsize=None)
def _placement(version: int) -> tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of every non-function module in zigzag placement order."""
    _, isfunc = _function_layout(version)
    side = tables.symbol_side(version)
    rows: list[int] = []
    cols: list[int] = []
    right = side - 1
    while right >= 1:
        if right == 6:  # timing column is skipped entirely
            right = 5
        upward = (right + 1) & 2 == 0
        vertical = range(side - 1, -1, -1) if upward else range(side)
        for r in vertical:
            for c in (right, right - 1):
                if not isfunc[r, c]:
                    rows.append(r)
                    cols.append(c)
        right -= 2
    expected = tables.TOTAL_CODEWORDS[version] * 8 + tables.REMAINDER_BITS[version]
    assert len(rows) == expected, f"placement size {len(rows)} != {expected}"
    return np.array(rows, dtype=np.int32), np.array(cols, dtype=np.int32)


@lru_cache(maxsize=None)
def _mask_grid(side: int, mask: int) -> np.ndarray:
    """True where the mask inverts a module, before excluding function cells."""
    r = np.arange(side).reshape(-1, 1)
    c = np.arange(side).reshape(1, -1)
    if mask == 0:
        grid = (r + c) % 2 == 0
    elif mask == 1:
        grid = r % 2 == 0
    elif mask == 2:
        grid = c % 3 == 0
    elif mask == 3:
        grid = (r + c) % 3 == 0
    elif mask == 4:
        grid = (r // 2 + c // 3) % 2 == 0
    elif mask == 5:
        grid = (r * c) % 2 + (r * c) % 3 == 0
    elif mask == 6:
        grid = ((r * c) % 2 + (r * c) % 3) % 2 == 0
    elif mask == 7:
        grid = ((r + c) % 2 + (r * c) % 3) % 2 == 0
    else:
        raise ValueError(f"mask must be 0..7, got {mask}")
    grid = np.broadcast_to(grid, (side, side)).copy()
    grid.setflags(write=False)
    return grid


# --- penalty scoring ------------------------------------------------------

# Finder-like sequences for rule N3: dark core 1011101 with a 4-module
# light area on one side and at least one light module on the other.
_N3_PATTERNS = (
    np.array([0, 0, 0, 0, 1, 0, 1, 1, 1, 0, 1, 0], dtype=bool),
    np.array([0, 1, 0, 1, 1, 1, 0, 1, 0, 0, 0, 0], dtype=bool),
)


def _penalty_runs(m: np.ndarray) -> int:
    """Rule N1 along rows: 3 points per run of 5, +1 per extra module."""
    eq = m[:, 1:] == m[:, :-1]
    if eq.shape[1] < 4:
        return 0
    w5 = eq[:, :-3] & eq[:, 1:-2] & eq[:, 2:-1] & eq[:, 3:]
    n5 = int(w5.sum())
    n6 = int((w5[:, :-1] & eq[:, 4:]).sum())
    # a run of length L >= 5 contains L-4 uniform 5-windows and L-5
    # 6-windows, so summing 3 + (L - 5) over all runs gives 3*n5 - 2*n6
    return PENALTY_N1 * n5 - 2 * n6


def _penalty_finder_like(m: np.ndarray) -> int:
    """Rule N3 occurrences along rows; the border counts as light."""
    padded = np.pad(m, ((0, 0), (QUIET_ZONE, QUIET_ZONE)))
    windows = sliding_window_view(padded, 12, axis=1)
    count = 0
    for pattern in _N3_PATTERNS:
        count += int((windows == pattern).all(axis=2).sum())
    return count


def penalty_score(m: np.ndarray) -> int:
    """Standard mask evaluation score; lower is better."""
    score = _penalty_runs(m) + _penalty_runs(m.T)

    blocks = (
        (m[:-1, :-1] == m[1:, :-1])
        & (m[:-1, :-1] == m[:-1, 1:])
        & (m[:-1, :-1] == m[1:, 1:])
    )
    score += PENALTY_N2 * int(blocks.sum())

    score += PENALTY_N3 * (_penalty_finder_like(m) + _penalty_finder_like(m.T))

    dark = int(m.sum())
    total = m.size
    score += PENALTY_N4 * (abs(20 * dark - 10 * total) // total)
    return score


# --- codeword pipeline ----------------------------------------------------

def _build_data_codewords(payload: bytes, version: int, ec_level: EcLevel) -> bytes:
    """Byte-mode segment, terminator, and alternating pad codewords."""
    n = len(payload)
    cc_bits = tables.char_count_bits(version)
    capacity_bits = tables.data_codewords(version, ec_level.ordinal) * 8

    head = [(tables.MODE_BYTE >> (3 - i)) & 1 for i in range(4)]
    head += [(n >> (cc_bits - 1 - i)) & 1 for i in range(cc_bits)]
    body = (
        np.unpackbits(np.frombuffer(payload, dtype=np.uint8))
        if n
        else np.zeros(0, dtype=np.uint8)
    )
    used = len(head) + body.size
    terminator = min(4, capacity_bits - used)
    tail = (-(used + terminator)) % 8
    bits = np.concatenate(
        [np.array(head, dtype=np.uint8), body, np.zeros(terminator + tail, np.uint8)]
    )
    codewords = bytearray(np.packbits(bits).tobytes())

    want = capacity_bits // 8
    for pad in cycle(PAD_CODEWORDS):
        if len(codewords) >= want:
            break
        codewords.append(pad)
    return bytes(codewords)


def _interleave(data: bytes, version: int, ec_level: EcLevel) -> bytes:
    """Split into blocks, append parity, interleave column-wise."""
    structure = tables.block_structure(version, ec_level.ordinal)
    blocks: list[bytes] = []
    parities: list[bytes] = []
    offset = 0
    for data_len, ec_len in structure:
        block = data[offset : offset + data_len]
        offset += data_len
        blocks.append(block)
        parities.append(rs_encode(block, ec_len))
    assert offset == len(data)

    out = bytearray()
    for i in range(max(len(b) for b in blocks)):
        out.extend(b[i] for b in blocks if i < len(b))
    for i in range(len(parities[0])):
        out.extend(p[i] for p in parities)
    return bytes(out)


def _deinterleave(codewords: bytes, version: int, ec_level: EcLevel) -> list[bytes]:
    """Inverse of :func:`_interleave`: per-block data+parity codewords."""
    structure = tables.block_structure(version, ec_level.ordinal)
    data_parts = [bytearray() for _ in structure]
    parity_parts = [bytearray() for _ in structure]
    it = iter(codewords)
    for i in range(max(d for d, _ in structure)):
        for part, (data_len, _) in zip(data_parts, structure):
            if i < data_len:
                part.append(next(it))
    for _ in range(structure[0][1]):
        for part in parity_parts:
            part.append(next(it))
    return [bytes(d + p) for d, p in zip(data_parts, parity_parts)]


# --- encoding -------------------------------------------------------------

def qr_encode(
    payload: bytes,
    ec_level: EcLevel = EcLevel.L,
    forced_version: int | None = None,
) -> QrSymbol:
    """Encode a byte payload into the smallest fitting version.

    All eight masks are drawn and scored; the lowest penalty wins
    (lowest mask number on ties). Raises PayloadTooLarge when the
    payload exceeds the capacity of version 40 (or the forced version).
    """
    if forced_version is not None:
        tables.check_version(forced_version)
        if len(payload) > capacity(forced_version, ec_level):
            raise PayloadTooLarge(
                f"{len(payload)} bytes exceed version {forced_version}-"
                f"{ec_level.name} capacity {capacity(forced_version, ec_level)}"
            )
        version = forced_version
    else:
        for version in range(tables.MIN_VERSION, tables.MAX_VERSION + 1):
            if len(payload) <= capacity(version, ec_level):
                break
        else:
            raise PayloadTooLarge(
                f"{len(payload)} bytes exceed version 40-{ec_level.name} "
                f"capacity {capacity(tables.MAX_VERSION, ec_level)}"
            )

    codewords = _interleave(
        _build_data_codewords(payload, version, ec_level), version, ec_level
    )
    base, isfunc = _function_layout(version)
    unmasked = base.copy()
    rows, cols = _placement(version)
    bits = np.unpackbits(np.frombuffer(codewords, dtype=np.uint8)).astype(bool)
    unmasked[rows[: bits.size], cols[: bits.size]] = bits
    # any remainder positions stay light

    best_mask = -1
    best_score = None
    best_modules = None
    for mask in range(8):
        candidate = unmasked ^ (_mask_grid(unmasked.shape[0], mask) & ~isfunc)
        _draw_format(candidate, ec_level, mask)
        score = penalty_score(candidate)
        if best_score is None or score < best_score:
            best_mask, best_score, best_modules = mask, score, candidate
    return QrSymbol(version, ec_level, best_mask, best_modules)


# --- rendering and location ----------------------------------------------

def render(sym: QrSymbol, scale: int = 1) -> ModuleImage:
    """Add the 4-module quiet zone and replicate each module scale x scale."""
    if scale < 1:
        raise ValueError(f"scale must be at least 1, got {scale}")
    side = sym.side
    out = np.zeros(((side + 2 * QUIET_ZONE) * scale,) * 2, dtype=bool)
    body = np.repeat(np.repeat(sym.modules, scale, axis=0), scale, axis=1)
    lo = QUIET_ZONE * scale
    hi = lo + side * scale
    out[lo:hi, lo:hi] = body
    return ModuleImage(out)


@lru_cache(maxsize=1)
def _finder_template() -> np.ndarray:
    d = np.abs(np.arange(7) - 3)
    template = np.maximum(d.reshape(-1, 1), d.reshape(1, -1)) != 2
    template.setflags(write=False)
    return template


def _finders_ok(m: np.ndarray) -> bool:
    tpl = _finder_template()
    return (
        bool((m[:7, :7] == tpl).all())
        and bool((m[:7, -7:] == tpl).all())
        and bool((m[-7:, :7] == tpl).all())
    )


def locate_symbol(img: ModuleImage) -> np.ndarray:
    """Find the one symbol in the image and return its module matrix.

    The symbol must be axis-aligned at an integral scale with a light
    quiet zone; the three finder patterns are verified exactly.
    """
    bits = img.bits
    if not bits.any():
        raise NoSymbolFound("image has no dark modules")
    row_idx = np.flatnonzero(bits.any(axis=1))
    col_idx = np.flatnonzero(bits.any(axis=0))
    height = row_idx[-1] - row_idx[0] + 1
    width = col_idx[-1] - col_idx[0] + 1
    if height != width:
        raise NoSymbolFound("dark region is not square")
    crop = bits[row_idx[0] : row_idx[-1] + 1, col_idx[0] : col_idx[-1] + 1]
    for version in range(tables.MIN_VERSION, tables.MAX_VERSION + 1):
        side = tables.symbol_side(version)
        if height % side:
            continue
        scale = height // side
        sampled = crop[scale // 2 :: scale, scale // 2 :: scale]
        if sampled.shape == (side, side) and _finders_ok(sampled):
            return sampled
    raise NoSymbolFound("no finder patterns recognized at any version or scale")


# --- decoding -------------------------------------------------------------

def _best_codeword(
    observed: tuple[int, ...], candidates, width: int
) -> tuple[int, object]:
    """Minimum Hamming distance decode over all observed copies."""
    best_dist = width + 1
    best_payload: object = None
    for value, *meta in candidates:
        for obs in observed:
            dist = (value ^ obs).bit_count()
            if dist < best_dist:
                best_dist = dist
                best_payload = meta
    return best_dist, best_payload


def _read_bits(m: np.ndarray, positions) -> int:
    value = 0
    for i, (r, c) in enumerate(positions):
        if m[r, c]:
            value |= 1 << i
    return value


def decode_matrix(m: np.ndarray) -> bytes:
    """Decode a bare module matrix (no quiet zone) back to its payload."""
    side = m.shape[0]
    version = (side - 17) // 4
    if (
        m.shape != (side, side)
        or (side - 17) % 4
        or not tables.MIN_VERSION <= version <= tables.MAX_VERSION
    ):
        raise NoSymbolFound(f"matrix shape {m.shape} is not a symbol size")

    copy1, copy2 = _format_positions(side)
    observed = (_read_bits(m, copy1), _read_bits(m, copy2))
    dist, meta = _best_codeword(observed, _FORMAT_CANDIDATES, 15)
    if dist > 3:
        raise FormatInfoUnreadable(
            "format info differs from every valid word by > 3 bits"
        )
    ec_level, mask = meta

    if version >= 7:
        obs1 = obs2 = 0
        for i in range(18):
            r, c = i // 3, side - 11 + i % 3
            if m[r, c]:
                obs1 |= 1 << i
            if m[c, r]:
                obs2 |= 1 << i
        dist, meta = _best_codeword((obs1, obs2), _VERSION_CANDIDATES, 18)
        if dist > 3:
            raise VersionInfoUnreadable(
                "version info differs from every valid word by > 3 bits"
            )
        if meta[0] != version:
            raise StructureMismatch(
                f"version info says {meta[0]} but the matrix is {side}x{side}"
            )

    rows, cols = _placement(version)
    grid = _mask_grid(side, mask)
    bits = m[rows, cols] ^ grid[rows, cols]
    total = tables.TOTAL_CODEWORDS[version]
    codewords = np.packbits(bits[: total * 8]).tobytes()

    ec_len = tables.ECC_CODEWORDS_PER_BLOCK[ec_level.ordinal][version]
    data = bytearray()
    for block in _deinterleave(codewords, version, ec_level):
        corrected, _ = rs_decode(block, ec_len)
        data.extend(corrected)

    stream = np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8))
    mode = int(np.packbits(stream[:4])[0]) >> 4
    if mode != tables.MODE_BYTE:
        raise StructureMismatch(f"expected byte mode, found mode {mode:#x}")
    cc_bits = tables.char_count_bits(version)
    count = int.from_bytes(np.packbits(stream[4 : 4 + cc_bits]).tobytes(), "big")
    start = 4 + cc_bits
    if start + 8 * count > stream.size:
        raise StructureMismatch(
            f"length field claims {count} bytes but only "
            f"{(stream.size - start) // 8} remain"
        )
    return np.packbits(stream[start : start + 8 * count]).tobytes()


def qr_decode(img: ModuleImage) -> bytes:
    """Decode the payload of the one QR symbol in the image."""
    return decode_matrix(locate_symbol(img))
