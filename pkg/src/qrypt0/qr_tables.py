"""Constant tables for QR model 2 symbols, versions 1 to 40.

All values are data from the published QR standard: codeword totals,
error-correction block structure per level, and alignment pattern
center coordinates. Index 0 of version-indexed tables is padding.
"""

from __future__ import annotations

MIN_VERSION = 1
MAX_VERSION = 40

MODE_BYTE = 0x4

# Total codewords (data + parity) a version holds, remainder bits discarded.
TOTAL_CODEWORDS = (
    0, 26, 44, 70, 100, 134, 172, 196, 242, 292, 346,
    404, 466, 532, 581, 655, 733, 815, 901, 991, 1085,
    1156, 1258, 1364, 1474, 1588, 1706, 1828, 1921, 2051, 2185,
    2323, 2465, 2611, 2761, 2876, 3034, 3196, 3362, 3532, 3706,
)

# Leftover placement bits after all codewords (0, 3, 4, or 7 per version).
REMAINDER_BITS = (
    0, 0, 7, 7, 7, 7, 7, 0, 0, 0, 0,
    0, 0, 0, 3, 3, 3, 3, 3, 3, 3,
    4, 4, 4, 4, 4, 4, 4, 3, 3, 3,
    3, 3, 3, 3, 0, 0, 0, 0, 0, 0,
)

# Parity codewords per block, rows in level order L, M, Q, H.
ECC_CODEWORDS_PER_BLOCK = (
    (0, 7, 10, 15, 20, 26, 18, 20, 24, 30, 18,
     20, 24, 26, 30, 22, 24, 28, 30, 28, 28,
     28, 28, 30, 30, 26, 28, 30, 30, 30, 30,
     30, 30, 30, 30, 30, 30, 30, 30, 30, 30),
    (0, 10, 16, 26, 18, 24, 16, 18, 22, 22, 26,
     30, 22, 22, 24, 24, 28, 28, 26, 26, 26,
     26, 28, 28, 28, 28, 28, 28, 28, 28, 28,
     28, 28, 28, 28, 28, 28, 28, 28, 28, 28),
    (0, 13, 22, 18, 26, 18, 24, 18, 22, 20, 24,
     28, 26, 24, 20, 30, 24, 28, 28, 26, 30,
     28, 30, 30, 30, 30, 28, 30, 30, 30, 30,
     30, 30, 30, 30, 30, 30, 30, 30, 30, 30),
    (0, 17, 28, 22, 16, 22, 28, 26, 26, 24, 28,
     24, 28, 22, 24, 24, 30, 28, 28, 26, 28,
     30, 24, 30, 30, 30, 30, 30, 30, 30, 30,
     30, 30, 30, 30, 30, 30, 30, 30, 30, 30),
)

# Error-correction block count, rows in level order L, M, Q, H.
NUM_BLOCKS = (
    (0, 1, 1, 1, 1, 1, 2, 2, 2, 2, 4,
     4, 4, 4, 4, 6, 6, 6, 6, 7, 8,
     8, 9, 9, 10, 12, 12, 12, 13, 14, 15,
     16, 17, 18, 19, 19, 20, 21, 22, 24, 25),
    (0, 1, 1, 1, 2, 2, 4, 4, 4, 5, 5,
     5, 8, 9, 9, 10, 10, 11, 13, 14, 16,
     17, 17, 18, 20, 21, 23, 25, 26, 28, 29,
     31, 33, 35, 37, 38, 40, 43, 45, 47, 49),
    (0, 1, 1, 2, 2, 4, 4, 6, 6, 8, 8,
     8, 10, 12, 16, 12, 17, 16, 18, 21, 20,
     23, 23, 25, 27, 29, 34, 34, 35, 38, 40,
     43, 45, 48, 51, 53, 56, 59, 62, 65, 68),
    (0, 1, 1, 2, 4, 4, 4, 5, 6, 8, 8,
     11, 11, 16, 16, 18, 16, 19, 21, 25, 25,
     25, 34, 30, 32, 35, 37, 40, 42, 45, 48,
     51, 54, 57, 60, 63, 66, 70, 74, 77, 81),
)

# Alignment pattern center coordinates (used on both axes).
ALIGNMENT_POSITIONS = (
    (),
    (), (6, 18), (6, 22), (6, 26), (6, 30),
    (6, 34), (6, 22, 38), (6, 24, 42), (6, 26, 46), (6, 28, 50),
    (6, 30, 54), (6, 32, 58), (6, 34, 62), (6, 26, 46, 66), (6, 26, 48, 70),
    (6, 26, 50, 74), (6, 30, 54, 78), (6, 30, 56, 82), (6, 30, 58, 86), (6, 34, 62, 90),
    (6, 28, 50, 72, 94), (6, 26, 50, 74, 98), (6, 30, 54, 78, 102), (6, 28, 54, 80, 106),
    (6, 32, 58, 84, 110), (6, 30, 58, 86, 114), (6, 34, 62, 90, 118), (6, 26, 50, 74, 98, 122),
    (6, 30, 54, 78, 102, 126), (6, 26, 52, 78, 104, 130), (6, 30, 56, 82, 108, 134),
    (6, 34, 60, 86, 112, 138), (6, 30, 58, 86, 114, 142), (6, 34, 62, 90, 118, 146),
    (6, 30, 54, 78, 102, 126, 150), (6, 24, 50, 76, 102, 128, 154), (6, 28, 54, 80, 106, 132, 158),
    (6, 32, 58, 84, 110, 136, 162), (6, 26, 54, 82, 110, 138, 166), (6, 30, 58, 86, 114, 142, 170),
)


def check_version(version: int) -> int:
    if not MIN_VERSION <= version <= MAX_VERSION:
        raise ValueError(f"version must be 1..40, got {version}")
    return version


def symbol_side(version: int) -> int:
    """Modules per side: 17 + 4 * version."""
    return 17 + 4 * check_version(version)


def char_count_bits(version: int) -> int:
    """Width of the byte-mode character count field."""
    return 8 if check_version(version) <= 9 else 16


def data_codewords(version: int, level_ordinal: int) -> int:
    """Codewords left for data after per-block parity."""
    check_version(version)
    return (
        TOTAL_CODEWORDS[version]
        - ECC_CODEWORDS_PER_BLOCK[level_ordinal][version]
        * NUM_BLOCKS[level_ordinal][version]
    )


def byte_capacity(version: int, level_ordinal: int) -> int:
    """Maximum byte-mode payload for (version, level)."""
    bits = data_codewords(version, level_ordinal) * 8
    return (bits - 4 - char_count_bits(version)) // 8


def block_structure(version: int, level_ordinal: int) -> list[tuple[int, int]]:
    """(data_len, ec_len) per block, short blocks first."""
    check_version(version)
    total = TOTAL_CODEWORDS[version]
    nblocks = NUM_BLOCKS[level_ordinal][version]
    ec_len = ECC_CODEWORDS_PER_BLOCK[level_ordinal][version]
    short_len = total // nblocks - ec_len
    num_long = total % nblocks
    return [(short_len, ec_len)] * (nblocks - num_long) + [
        (short_len + 1, ec_len)
    ] * num_long
