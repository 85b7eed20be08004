"""Exhaustive, exact verification of traceability properties.

Coalitions of size at most ``t`` are enumerated in canonical order (by size,
then lexicographically) and every unordered pair is checked. The reported
witness is the first violating pair in that order, which makes reports
independent of how the pair space is split across worker threads.
"""

import itertools
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .core import Coalition, DeltaStats, delta_stats, format_rational
from .validation import check_code, check_nonnegative_int, check_t

HAMMING = "hamming_ltc"
EUCLIDEAN = "euclidean_ltc"
INDEPENDENCE = "independence_2t"

_INT64_SAFE = 1 << 62
# below this many pairs threading costs more than it saves
_PARALLEL_MIN_PAIRS = 200_000


@dataclass(frozen=True)
class VerificationReport:
    property: str
    t: int
    holds: bool
    pairs_checked: int
    T: Optional[int] = None
    delta_sq: Optional[Fraction] = None
    witness: Optional[tuple] = None
    witness_stats: Optional[DeltaStats] = None
    witness_rank: Optional[int] = None
    note: Optional[str] = None

    def to_dict(self):
        out = {"property": self.property, "t": self.t}
        if self.property == HAMMING:
            out["T"] = self.T
        elif self.property == EUCLIDEAN:
            out["delta_sq"] = format_rational(self.delta_sq)
        out["holds"] = self.holds
        out["pairs_checked"] = self.pairs_checked
        if self.witness is None:
            out["witness"] = None
        elif self.property == INDEPENDENCE:
            out["witness"] = {"columns": list(self.witness), "rank": self.witness_rank}
        else:
            I1, I2 = self.witness
            out["witness"] = {
                "I1": list(I1.indices),
                "I2": list(I2.indices),
                "support_size": self.witness_stats.support_size,
                "norm_sq": format_rational(self.witness_stats.norm_sq),
            }
        if self.note:
            out["note"] = self.note
        return out

    def to_json(self):
        return json.dumps(self.to_dict())


def enumerate_coalitions(M, t):
    """All coalitions of size 1..t over users 1..M, in canonical order."""
    return [
        Coalition(c)
        for size in range(1, t + 1)
        for c in itertools.combinations(range(1, M + 1), size)
    ]


def signature_table(code, coalitions):
    """Integer column sums (one row per coalition) and the coalition sizes."""
    bits = code.bits.astype(np.int64)
    counts = np.empty((len(coalitions), code.n), dtype=np.int64)
    for row, c in enumerate(coalitions):
        counts[row] = bits[:, [j - 1 for j in c.indices]].sum(axis=1)
    sizes = np.array([len(c) for c in coalitions], dtype=np.int64)
    return counts, sizes


def _resolve_threads(n_jobs):
    if n_jobs is None or n_jobs <= 0:
        return os.cpu_count() or 1
    return n_jobs


class _PairScanner:
    """Finds the first violating pair ``(a, b)``, ``a < b``, in a block of ``a`` values."""

    def __init__(self, counts, sizes, mode, T=None, delta_sq=None):
        self.counts = counts
        self.sizes = sizes
        self.mode = mode
        self.T = T
        self.delta_sq = delta_sq
        t = int(sizes.max())
        n = counts.shape[1]
        self.exact_objects = False
        if mode == EUCLIDEAN:
            num, den = delta_sq.numerator, delta_sq.denominator
            worst = max(n * t**4 * den, 4 * num * t**4)
            self.exact_objects = worst >= _INT64_SAFE
        elif n * t**4 >= _INT64_SAFE:
            self.exact_objects = True

    def violations(self, a):
        counts, sizes = self.counts, self.sizes
        # r*c1 - q*c2 is (q*r) times the coordinate difference of the averages
        cross = sizes[a + 1:, None] * counts[a] - sizes[a] * counts[a + 1:]
        if self.exact_objects:
            cross = cross.astype(object)
        if self.mode == HAMMING:
            return np.count_nonzero(cross, axis=1) <= 2 * self.T
        norm_num = (cross * cross).sum(axis=1)
        qr = sizes[a] * sizes[a + 1:]
        if self.exact_objects:
            qr = qr.astype(object)
        # ||Delta||^2 <= 4 delta^2  <=>  norm_num * den <= 4 * num * (qr)^2
        return norm_num * self.delta_sq.denominator <= 4 * self.delta_sq.numerator * qr * qr

    def first_in(self, a_values):
        for a in a_values:
            hits = np.flatnonzero(self.violations(a))
            if hits.size:
                return a, a + 1 + int(hits[0])
        return None


def _first_violation(scanner, n_coalitions, n_jobs):
    total_pairs = n_coalitions * (n_coalitions - 1) // 2
    threads = _resolve_threads(n_jobs)
    if threads == 1 or total_pairs < _PARALLEL_MIN_PAIRS:
        return scanner.first_in(range(n_coalitions))
    # interleaved blocks balance the triangular workload
    blocks = [range(k, n_coalitions, threads) for k in range(threads)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        found = [f for f in pool.map(scanner.first_in, blocks) if f is not None]
    return min(found) if found else None


def _pairs_before(a, b, C):
    # pairs (a', b') strictly preceding (a, b) in lexicographic order, plus (a, b) itself
    return a * (C - 1) - a * (a - 1) // 2 + (b - a)


def _pair_report(code, t, mode, n_jobs, **params):
    code = check_code(code)
    t = check_t(t, code.M)
    coalitions = enumerate_coalitions(code.M, t)
    C = len(coalitions)
    counts, sizes = signature_table(code, coalitions)
    scanner = _PairScanner(counts, sizes, mode, **params)
    found = _first_violation(scanner, C, n_jobs)
    if found is None:
        return VerificationReport(mode, t, True, C * (C - 1) // 2, **params)
    a, b = found
    I1, I2 = coalitions[a], coalitions[b]
    return VerificationReport(
        mode,
        t,
        False,
        _pairs_before(a, b, C),
        witness=(I1, I2),
        witness_stats=delta_stats(code, I1, I2),
        **params,
    )


def is_hamming_ltc(code, t, T, n_jobs=1):
    """Check that every two distinct coalitions of size <= t differ in more than 2T coordinates."""
    T = check_nonnegative_int(T, "T")
    return _pair_report(code, t, HAMMING, n_jobs, T=T)


def is_euclidean_ltc(code, t, delta_sq, n_jobs=1):
    """Check that every two distinct coalitions of size <= t are more than ``2*delta`` apart.

    ``delta_sq`` is the squared radius as an exact rational (a
    :class:`~fractions.Fraction`, int or ``"p/q"`` string).
    """
    delta_sq = Fraction(delta_sq)
    if delta_sq < 0:
        raise ValueError(f"delta_sq must be nonnegative, got {delta_sq}")
    return _pair_report(code, t, EUCLIDEAN, n_jobs, delta_sq=delta_sq)


def rational_rank(rows):
    """Rank over the rationals of an integer matrix, by fraction-free (Bareiss) elimination."""
    a = [list(map(int, r)) for r in rows]
    if not a:
        return 0
    n_rows, n_cols = len(a), len(a[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        pivot = next((i for i in range(rank, n_rows) if a[i][col] != 0), None)
        if pivot is None:
            continue
        a[rank], a[pivot] = a[pivot], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, n_rows):
            f = a[i][col]
            row_i, row_p = a[i], a[rank]
            for j in range(col + 1, n_cols):
                row_i[j] = (p * row_i[j] - f * row_p[j]) // prev
            row_i[col] = 0
        prev = p
        rank += 1
        if rank == n_rows:
            break
    return rank


def check_2t_independence(code, t):
    """Check that every ``2t`` columns are linearly independent over the rationals.

    This is the sufficient condition for noiseless complete traceability
    against any convex combination of at most ``t`` fingerprints. The
    witness is the first dependent column subset in lexicographic order.
    """
    code = check_code(code)
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    k = 2 * t
    if k > code.M:
        raise ValueError(f"2t={k} exceeds the number of columns M={code.M}")
    if k > code.n:
        first = tuple(range(1, k + 1))
        rank = rational_rank(code.bits[:, [j - 1 for j in first]].tolist())
        return VerificationReport(
            INDEPENDENCE,
            t,
            False,
            0,
            witness=first,
            witness_rank=rank,
            note=f"2t={k} exceeds n={code.n}: rank {k} is impossible",
        )
    columns = code.bits.T.astype(np.int64).tolist()
    checked = 0
    for subset in itertools.combinations(range(code.M), k):
        checked += 1
        # rank of the n x k submatrix equals that of its k x n transpose
        rank = rational_rank([columns[j] for j in subset])
        if rank < k:
            return VerificationReport(
                INDEPENDENCE,
                t,
                False,
                checked,
                witness=tuple(j + 1 for j in subset),
                witness_rank=rank,
            )
    return VerificationReport(INDEPENDENCE, t, True, checked)
