"""Module-level bitmap images and the plain PBM interchange format.

A ModuleImage is a rectangular grid of dark/light cells, one cell per
QR module (times any integer scale). Files are plain-text PBM ("P1"),
dark module = 1: bit-exact, diffable, and readable by any netpbm-aware
viewer without imaging libraries.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import IoFailure, MalformedImageFile

_MAX_DIM = 100_000


@dataclass(frozen=True)
class ModuleImage:
    """Immutable dark/light cell grid; ``bits[row, col]`` True means dark."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        arr = np.asarray(self.bits, dtype=bool)
        arr.setflags(write=False)
        object.__setattr__(self, "bits", arr)
        if arr.ndim != 2:
            raise ValueError("ModuleImage needs a 2-D bit grid")

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ModuleImage):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(
            np.array_equal(self.bits, other.bits)
        )

    def __hash__(self) -> int:
        return hash((self.bits.shape, self.bits.tobytes()))


def write_pbm(img: ModuleImage, path) -> None:
    """Write a plain PBM ("P1") file, dark cell = 1."""
    rows = []
    for row in np.asarray(img.bits, dtype=np.uint8):
        line = "".join("1" if b else "0" for b in row)
        # plain PBM advises lines of at most 70 characters
        rows.extend(line[i : i + 70] for i in range(0, len(line), 70))
    text = f"P1\n{img.width} {img.height}\n" + "\n".join(rows) + "\n"
    try:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc}") from exc


def read_pbm(path) -> ModuleImage:
    """Exact inverse of :func:`write_pbm`; accepts any plain PBM."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise IoFailure(f"cannot read {path}: {exc}") from exc
    return parse_pbm(raw, name=str(path))


def parse_pbm(raw: bytes, name: str = "<bytes>") -> ModuleImage:
    """Parse plain PBM bytes. '#' comments and packed bit rows allowed."""
    # strip comments: '#' to end of line, wherever whitespace may appear
    lines = raw.split(b"\n")
    clean = b"\n".join(line.split(b"#", 1)[0] for line in lines)

    pos = 0

    def next_token() -> bytes:
        nonlocal pos
        while pos < len(clean) and clean[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(clean) and not clean[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise MalformedImageFile(f"{name}: truncated header")
        return clean[start:pos]

    if next_token() != b"P1":
        raise MalformedImageFile(f"{name}: not a plain PBM (P1) file")
    try:
        width = int(next_token())
        height = int(next_token())
    except (ValueError, MalformedImageFile) as exc:
        raise MalformedImageFile(f"{name}: bad dimensions") from exc
    if not (0 < width <= _MAX_DIM and 0 < height <= _MAX_DIM):
        raise MalformedImageFile(f"{name}: dimensions out of range")

    # bits may be packed or whitespace-separated; read digit characters
    bits = np.empty(width * height, dtype=bool)
    count = 0
    for ch in clean[pos:]:
        if ch in (0x30, 0x31):  # '0' / '1'
            if count >= bits.size:
                raise MalformedImageFile(f"{name}: more bits than width*height")
            bits[count] = ch == 0x31
            count += 1
        elif chr(ch).isspace():
            continue
        else:
            raise MalformedImageFile(f"{name}: unexpected character {chr(ch)!r}")
    if count != bits.size:
        raise MalformedImageFile(
            f"{name}: expected {bits.size} bits, found {count}"
        )
    return ModuleImage(bits.reshape(height, width))
