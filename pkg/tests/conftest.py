import itertools
import sys
from fractions import Fraction

import numpy as np
import pytest

from fptrace import BinaryCode

MASK = (1 << 64) - 1


def splitmix64_reference(seed, count):
    """Textbook scalar SplitMix64, written independently of the package."""
    out = []
    x = seed & MASK
    for _ in range(count):
        x = (x + 0x9E3779B97F4A7C15) & MASK
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


def naive_signatures(code, t):
    """Every coalition of size <= t with its signature as a tuple of reduced fractions."""
    bits = code.bits.tolist()
    sigs = []
    for size in range(1, t + 1):
        for c in itertools.combinations(range(1, code.M + 1), size):
            sig = tuple(Fraction(sum(row[j - 1] for j in c), size) for row in bits)
            sigs.append((c, sig))
    return sigs


def naive_violations(code, t, predicate):
    """All pairs (I1, I2), I1 before I2 in (size, lex) order, with ``predicate(diffs)`` true."""
    sigs = naive_signatures(code, t)
    out = []
    for (c1, s1), (c2, s2) in itertools.combinations(sigs, 2):
        diffs = [a - b for a, b in zip(s1, s2)]
        if predicate(diffs):
            out.append((c1, c2))
    return out


def naive_hamming(code, t, T):
    return naive_violations(code, t, lambda d: sum(x != 0 for x in d) <= 2 * T)


def naive_euclidean(code, t, delta_sq):
    return naive_violations(code, t, lambda d: sum(x * x for x in d) <= 4 * Fraction(delta_sq))


def fraction_rank(rows):
    """Rank by plain Gaussian elimination over Fractions."""
    m = [[Fraction(x) for x in r] for r in rows]
    rank = 0
    n_cols = len(m[0]) if m else 0
    for col in range(n_cols):
        piv = next((i for i in range(rank, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][col] != 0:
                f = m[i][col] / m[rank][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def brute_bad_row_prob(q, r, k):
    """Enumerate all 2^(q+r-k) assignments of the distinct columns' bits."""
    width = q + r - k
    hits = 0
    for bits in itertools.product((0, 1), repeat=width):
        shared, only1, only2 = bits[:k], bits[k:q], bits[q:]
        if Fraction(sum(shared) + sum(only1), q) == Fraction(sum(shared) + sum(only2), r):
            hits += 1
    return Fraction(hits, 2**width)


@pytest.fixture
def identity2():
    return BinaryCode(np.eye(2, dtype=np.uint8))


@pytest.fixture
def small_code():
    # columns h1=(1,0,1), h2=(1,1,0)
    return BinaryCode(np.array([[1, 1], [0, 1], [1, 0]]))


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
