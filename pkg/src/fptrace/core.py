"""Exact domain types: binary codes, coalitions, averaged signatures.

Nothing in this module touches floating point. A signature keeps the integer
column sums together with the coalition size, and two signatures are compared
by cross-multiplication.
"""

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional, Tuple

import numpy as np


class CodeFormatError(ValueError):
    """Raised when a code file does not follow the ``n M`` + rows format."""


@dataclass(frozen=True, eq=False)
class BinaryCode:
    """An ``n x M`` binary matrix; column ``j`` is the fingerprint of user ``j``.

    Columns are addressed 1-based by the public API, rows are plain numpy
    rows.
    """

    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 2:
            raise ValueError(f"code must be a 2-d matrix, got shape {bits.shape}")
        if bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ValueError("code needs n >= 1 rows and M >= 1 columns")
        if not np.isin(bits, (0, 1)).all():
            raise ValueError("code entries must be 0 or 1")
        bits = bits.astype(np.uint8, copy=True)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def n(self):
        return self.bits.shape[0]

    @property
    def M(self):
        return self.bits.shape[1]

    def column(self, j):
        """Column ``j`` (1-based)."""
        if not 1 <= j <= self.M:
            raise IndexError(f"column index {j} outside [1, {self.M}]")
        return self.bits[:, j - 1]

    def __eq__(self, other):
        if not isinstance(other, BinaryCode):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash((self.bits.shape, self.bits.tobytes()))

    def __repr__(self):
        return f"BinaryCode(n={self.n}, M={self.M})"


@dataclass(frozen=True, order=False)
class Coalition:
    """A nonempty set of 1-based user indices, stored sorted."""

    indices: Tuple[int, ...]

    def __init__(self, indices):
        idx = tuple(int(i) for i in indices)
        if not idx:
            raise ValueError("coalition must be nonempty")
        if len(set(idx)) != len(idx):
            raise ValueError(f"duplicate indices in coalition {idx}")
        if min(idx) < 1:
            raise ValueError(f"coalition indices are 1-based, got {idx}")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def sort_key(self):
        """Canonical order: by size, then lexicographically by indices."""
        return (len(self.indices), self.indices)

    def __lt__(self, other):
        return self.sort_key() < other.sort_key()

    def __repr__(self):
        return "{" + ",".join(map(str, self.indices)) + "}"


def as_coalition(indices):
    return indices if isinstance(indices, Coalition) else Coalition(indices)


@dataclass(frozen=True, eq=False)
class Signature:
    """The averaging-attack output: ``counts / size`` coordinatewise."""

    counts: Tuple[int, ...]
    size: int

    def values(self):
        return [Fraction(c, self.size) for c in self.counts]

    def __eq__(self, other):
        if not isinstance(other, Signature):
            return NotImplemented
        return len(self.counts) == len(other.counts) and all(
            other.size * a == self.size * b for a, b in zip(self.counts, other.counts)
        )

    def __hash__(self):
        return hash(tuple(self.values()))

    def to_float(self):
        return np.asarray(self.counts, dtype=float) / self.size


@dataclass(frozen=True)
class DeltaStats:
    """Summary of the difference of two signatures."""

    support_size: int
    norm_sq: Fraction
    min_nonzero_abs: Optional[Fraction]


def _check_coalition(code, coalition):
    coalition = as_coalition(coalition)
    if coalition.indices[-1] > code.M:
        raise IndexError(f"coalition {coalition} has an index outside [1, {code.M}]")
    return coalition


def average_signature(code, coalition):
    """Column sum of ``code`` over ``coalition``, kept as exact counts."""
    coalition = _check_coalition(code, coalition)
    cols = [j - 1 for j in coalition.indices]
    counts = code.bits[:, cols].sum(axis=1, dtype=np.int64)
    return Signature(tuple(int(c) for c in counts), len(coalition))


def delta_stats(code, I1, I2):
    """Support, squared norm and smallest nonzero entry of ``sigma(I1) - sigma(I2)``."""
    I1 = _check_coalition(code, I1)
    I2 = _check_coalition(code, I2)
    if I1 == I2:
        raise ValueError(f"coalitions must differ, got {I1} twice")
    s1 = average_signature(code, I1)
    s2 = average_signature(code, I2)
    q, r = s1.size, s2.size
    # Delta_i = (r*c1 - q*c2) / (q*r)
    diffs = [r * a - q * b for a, b in zip(s1.counts, s2.counts)]
    nonzero = [abs(d) for d in diffs if d != 0]
    den = q * r
    norm_sq = Fraction(sum(d * d for d in nonzero), den * den)
    min_abs = Fraction(min(nonzero), den) if nonzero else None
    return DeltaStats(len(nonzero), norm_sq, min_abs)


def binary_entropy(x):
    """``h(x) = -x log2 x - (1-x) log2 (1-x)`` with ``0 log 0 = 0``."""
    x = float(x)
    if not 0.0 <= x <= 1.0 or math.isnan(x):
        raise ValueError(f"binary entropy needs 0 <= x <= 1, got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


_HEADER = re.compile(r"([1-9][0-9]*) ([1-9][0-9]*)")


def parse_code(text):
    """Parse the text code format; see :func:`load_code`."""
    if not text.endswith("\n"):
        raise CodeFormatError("code file must end with a newline")
    lines = text[:-1].split("\n")
    m = _HEADER.fullmatch(lines[0])
    if m is None:
        raise CodeFormatError(f"malformed header {lines[0]!r}, expected 'n M'")
    n, M = int(m.group(1)), int(m.group(2))
    rows = lines[1:]
    if len(rows) != n:
        raise CodeFormatError(f"header declares {n} rows, found {len(rows)}")
    bits = np.zeros((n, M), dtype=np.uint8)
    for i, row in enumerate(rows, start=1):
        if len(row) != M:
            raise CodeFormatError(f"row {i} has length {len(row)}, expected {M}")
        bad = set(row) - {"0", "1"}
        if bad:
            raise CodeFormatError(f"row {i} has illegal character {sorted(bad)[0]!r}")
        bits[i - 1] = np.frombuffer(row.encode("ascii"), dtype=np.uint8) - ord("0")
    return BinaryCode(bits)


def format_code(code):
    rows = ["".join("1" if b else "0" for b in row) for row in code.bits]
    return f"{code.n} {code.M}\n" + "".join(r + "\n" for r in rows)


def load_code(path):
    """Read a code file: header ``"n M"`` then ``n`` rows of ``M`` chars in {0,1}."""
    data = Path(path).read_bytes()
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError as exc:
        raise CodeFormatError(f"{path}: non-ASCII content") from exc
    return parse_code(text)


def save_code(code, path):
    Path(path).write_bytes(format_code(code).encode("ascii"))


def format_rational(x):
    """Always ``p/q``, including integers (``2/1``)."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text):
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"cannot parse {text!r} as a rational number") from exc
