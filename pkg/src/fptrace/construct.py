"""Code generators and noise-parameter conversions.

``random_code`` samples the i.i.d. Bernoulli(1/2) ensemble used in the
existence argument; ``bch_parity_matrix`` gives the explicit noiseless
construction of rate ``1/t``.
"""

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._rng import SplitMix64
from .core import BinaryCode

# bitmask of a primitive polynomial of degree m, bit l = coefficient of x^l
PRIMITIVE_POLYS = {
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
    9: 0x211,
    10: 0x409,
    11: 0x805,
    12: 0x1053,
    13: 0x201B,
    14: 0x4443,
    15: 0x8003,
    16: 0x1100B,
}


def random_code(n, M, seed=0):
    """``n x M`` matrix of fair bits drawn from SplitMix64.

    Entries are taken in row-major order, 64 per output word, least
    significant bit first.
    """
    if n < 1 or M < 1:
        raise ValueError(f"need n >= 1 and M >= 1, got n={n}, M={M}")
    bits = SplitMix64(seed).bits(n * M)
    return BinaryCode(bits.reshape(n, M))


class Gf2mField:
    """GF(2^m) with log/antilog tables; alpha is the class of ``x``."""

    def __init__(self, m, primitive_poly=None):
        if not 2 <= m <= 16:
            raise ValueError(f"field degree m must be in [2, 16], got {m}")
        poly = PRIMITIVE_POLYS[m] if primitive_poly is None else int(primitive_poly)
        if poly.bit_length() != m + 1:
            raise ValueError(f"polynomial {poly:#b} does not have degree {m}")
        self.m = m
        self.primitive_poly = poly
        self.order = (1 << m) - 1
        antilog = np.zeros(self.order, dtype=np.int64)
        log = np.full(1 << m, -1, dtype=np.int64)
        x = 1
        for i in range(self.order):
            if log[x] != -1:
                raise ValueError(f"polynomial {poly:#b} is not primitive for m={m}")
            antilog[i] = x
            log[x] = i
            x <<= 1
            if x >> m:
                x ^= poly
        antilog.setflags(write=False)
        log.setflags(write=False)
        self.antilog = antilog
        self.log = log

    def power(self, e):
        """alpha ** e."""
        return int(self.antilog[e % self.order])

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        return int(self.antilog[(self.log[a] + self.log[b]) % self.order])


@lru_cache(maxsize=None)
def _field(m, poly):
    return Gf2mField(m, poly)


def bch_parity_matrix(m, t, primitive_poly=None):
    """Binary parity-check matrix of the narrow-sense BCH code of designed distance ``2t+1``.

    Row block ``i`` (odd ``i`` from 1 to ``2t-1``) holds ``alpha^(i*j)`` in
    column ``j = 0 .. 2^m-2``, each field element written as ``m`` bits,
    coefficient of ``x^0`` on top. The result has ``t*m`` rows and
    ``2^m - 1`` columns, so its rate ``log2(M+1)/n`` is exactly ``1/t``.
    """
    if not 2 <= m <= 16:
        raise ValueError(f"field degree m must be in [2, 16], got {m}")
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    length = (1 << m) - 1
    if 2 * t + 1 > length:
        raise ValueError(
            f"designed distance {2 * t + 1} exceeds code length {length} for m={m}"
        )
    field = _field(m, PRIMITIVE_POLYS[m] if primitive_poly is None else int(primitive_poly))
    cols = np.arange(length)
    shifts = np.arange(m)
    blocks = []
    for i in range(1, 2 * t, 2):
        elems = field.antilog[(i * cols) % length]
        blocks.append((elems[None, :] >> shifts[:, None]) & 1)
    return BinaryCode(np.vstack(blocks))


@dataclass(frozen=True)
class ConversionResult:
    t: int
    T: int
    delta_sq: Fraction


def delta_from_T(t, T):
    """Euclidean radius (squared) guaranteed by a Hamming ``(t, T)`` code.

    ``delta^2 = 2T / (2t(t-1))^2``; undefined for ``t = 1``.
    """
    if t < 2:
        raise ValueError(f"delta_from_T needs t >= 2 (t(t-1) vanishes), got t={t}")
    if T < 0:
        raise ValueError(f"T must be nonnegative, got {T}")
    return ConversionResult(t, T, Fraction(2 * T, 4 * t * t * (t - 1) ** 2))


def T_from_delta(delta_sq):
    """Hamming noise budget ``floor(2 delta^2)`` implied by a Euclidean radius."""
    delta_sq = Fraction(delta_sq)
    if delta_sq < 0:
        raise ValueError(f"delta_sq must be nonnegative, got {delta_sq}")
    return (2 * delta_sq.numerator) // delta_sq.denominator
