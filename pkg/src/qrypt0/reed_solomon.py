"""GF(256) arithmetic and Reed-Solomon coding over the QR polynomial.

Field: GF(2^8) reduced by 0x11D with generator element 2. Codewords are
byte sequences, highest-degree coefficient first (transmission order).
The generator polynomial has roots alpha^0 .. alpha^(ec_len-1), the QR
convention, so a codeword of n bytes with ec_len parity bytes corrects
up to floor(ec_len / 2) byte errors.

Multiplication is table-driven (exp/log); the test suite checks it
exhaustively against a bitwise shift-and-reduce routine.
"""

from __future__ import annotations

from functools import lru_cache

from .errors import TooManyErrors

REDUCING_POLY = 0x11D
GENERATOR = 2

# exp table doubled so products of two logs index without a mod 255.
GF_EXP = [0] * 512
GF_LOG = [0] * 256
_x = 1
for _i in range(255):
    GF_EXP[_i] = _x
    GF_LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= REDUCING_POLY
for _i in range(255, 512):
    GF_EXP[_i] = GF_EXP[_i - 255]
del _x, _i


def gf_mul(a: int, b: int) -> int:
    """Field product of two bytes."""
    if a == 0 or b == 0:
        return 0
    return GF_EXP[GF_LOG[a] + GF_LOG[b]]


def gf_inv(a: int) -> int:
    """Multiplicative inverse; undefined for zero."""
    if a == 0:
        raise ZeroDivisionError("zero has no inverse in GF(256)")
    return GF_EXP[255 - GF_LOG[a]]


def gf_pow(base: int, exponent: int) -> int:
    """base**exponent with base != 0, any integer exponent."""
    if base == 0:
        raise ValueError("gf_pow base must be nonzero")
    return GF_EXP[(GF_LOG[base] * exponent) % 255]


@lru_cache(maxsize=None)
def generator_poly(ec_len: int) -> tuple[int, ...]:
    """prod_{i=0}^{ec_len-1} (x - alpha^i), highest-degree first, monic."""
    g = [1]
    for i in range(ec_len):
        root = GF_EXP[i]
        # multiply g by (x - alpha^i); subtraction is XOR
        nxt = [0] * (len(g) + 1)
        for j, c in enumerate(g):
            nxt[j] ^= c
            nxt[j + 1] ^= gf_mul(c, root)
        g = nxt
    return tuple(g)


def rs_encode(data: bytes, ec_len: int) -> bytes:
    """Parity bytes: remainder of data * x^ec_len divided by the generator.

    Appending the result to ``data`` yields a codeword whose syndromes
    are all zero.
    """
    if ec_len < 1:
        raise ValueError("ec_len must be at least 1")
    if not data:
        raise ValueError("data must not be empty")
    if len(data) + ec_len > 255:
        raise ValueError("codeword longer than 255 bytes")
    gen = generator_poly(ec_len)
    rem = [0] * ec_len
    for byte in data:
        factor = byte ^ rem[0]
        rem = rem[1:] + [0]
        if factor:
            flog = GF_LOG[factor]
            for i in range(ec_len):
                g = gen[i + 1]
                if g:
                    rem[i] ^= GF_EXP[GF_LOG[g] + flog]
    return bytes(rem)


def _syndromes(codeword: bytes, ec_len: int) -> list[int]:
    """S_j = C(alpha^j) for j in 0..ec_len-1 (Horner over the codeword)."""
    synd = []
    for j in range(ec_len):
        x = GF_EXP[j]
        acc = 0
        for byte in codeword:
            acc = gf_mul(acc, x) ^ byte
        synd.append(acc)
    return synd


def _berlekamp_massey(synd: list[int]) -> list[int]:
    """Error locator polynomial, lowest-degree coefficient first."""
    loc = [1]
    prev = [1]
    prev_disc = 1
    shift = 1
    errors = 0
    for i, s in enumerate(synd):
        disc = s
        for j in range(1, errors + 1):
            disc ^= gf_mul(loc[j], synd[i - j])
        if disc == 0:
            shift += 1
            continue
        scaled = [0] * shift + [gf_mul(gf_mul(disc, gf_inv(prev_disc)), c) for c in prev]
        if 2 * errors <= i:
            prev, prev_disc = list(loc), disc
            errors = i + 1 - errors
            shift = 1
        else:
            shift += 1
        width = max(len(loc), len(scaled))
        loc = [
            (loc[k] if k < len(loc) else 0) ^ (scaled[k] if k < len(scaled) else 0)
            for k in range(width)
        ]
    while len(loc) > 1 and loc[-1] == 0:
        loc.pop()
    if len(loc) - 1 != errors:
        raise TooManyErrors("error locator degree mismatch")
    return loc


def _eval_low(poly: list[int], x: int) -> int:
    """Evaluate a lowest-first polynomial at x."""
    acc = 0
    for c in reversed(poly):
        acc = gf_mul(acc, x) ^ c
    return acc


def rs_decode(codeword: bytes, ec_len: int) -> tuple[bytes, int]:
    """Correct a codeword in place and strip the parity.

    Returns (data, errors_corrected). Raises TooManyErrors when the
    damage exceeds floor(ec_len / 2) correctable byte errors; heavier
    corruption may rarely slip through as a miscorrection, which is
    inherent to the code, never a crash.
    """
    n = len(codeword)
    if n <= ec_len:
        raise ValueError("codeword must be longer than its parity")
    if n > 255:
        raise ValueError("codeword longer than 255 bytes")
    synd = _syndromes(codeword, ec_len)
    if not any(synd):
        return codeword[:-ec_len], 0

    loc = _berlekamp_massey(synd)
    num_errors = len(loc) - 1
    if num_errors > ec_len // 2:
        raise TooManyErrors(f"{num_errors} errors exceed capacity {ec_len // 2}")

    # Chien search: error at degree p iff loc(alpha^-p) == 0.
    error_degrees = [
        p for p in range(n) if _eval_low(loc, GF_EXP[(255 - p) % 255]) == 0
    ]
    if len(error_degrees) != num_errors:
        raise TooManyErrors("error locator root count mismatch")

    # Forney: evaluator = synd * loc mod x^ec_len, then
    # magnitude_p = X_p * omega(X_p^-1) / loc'(X_p^-1) with X_p = alpha^p.
    omega = [0] * ec_len
    for i, s in enumerate(synd):
        if s == 0:
            continue
        for j, c in enumerate(loc):
            if i + j < ec_len and c:
                omega[i + j] ^= gf_mul(s, c)
    # Formal derivative over GF(2): even terms vanish, so
    # loc'(x) = sum of odd coefficients times x^(k-1), a polynomial in x^2.
    deriv = [loc[k] for k in range(1, len(loc), 2)]

    fixed = bytearray(codeword)
    for p in error_degrees:
        x_inv = GF_EXP[(255 - p) % 255]
        den = _eval_low(deriv, gf_mul(x_inv, x_inv))
        if den == 0:
            raise TooManyErrors("Forney denominator vanished")
        magnitude = gf_mul(gf_mul(GF_EXP[p], _eval_low(omega, x_inv)), gf_inv(den))
        fixed[n - 1 - p] ^= magnitude

    if any(_syndromes(bytes(fixed), ec_len)):
        raise TooManyErrors("correction failed to zero the syndromes")
    return bytes(fixed[:-ec_len]), num_errors
