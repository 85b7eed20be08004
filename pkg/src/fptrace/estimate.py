"""Numerics of the random-coding existence argument.

A row of a random code is *bad* for two coalitions when both see the same
fraction of ones in it. This module computes that probability exactly and by
Monte Carlo, evaluates the rate bound and the expected number of bad coalition
pairs that it controls, and searches for codes by rejection sampling.
"""

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Dict, Optional

import numpy as np

from ._rng import SplitMix64
from .construct import random_code
from .core import binary_entropy
from .verify import is_hamming_ltc

CONSERVATIVE = "conservative"
ASYMPTOTIC = "asymptotic"
EMPIRICAL = "empirical"


def _check_triple(q, r, k):
    if not (isinstance(q, int) and isinstance(r, int) and isinstance(k, int)):
        raise TypeError("q, r, k must be integers")
    if not q >= r >= 1:
        raise ValueError(f"need q >= r >= 1, got q={q}, r={r}")
    if not 0 <= k <= r:
        raise ValueError(f"need 0 <= k <= r, got k={k}, r={r}")
    if q == r == k:
        raise ValueError("coalitions with q = r = k are identical")


@lru_cache(maxsize=None)
def exact_bad_row_prob(q, r, k):
    """Exact probability that a uniformly random row is bad.

    ``q = |I1|``, ``r = |I2|`` and ``k = |I1 & I2|``. With ``xs`` ones among the
    shared columns, ``x1`` among those only in ``I1`` and ``x2`` among those only
    in ``I2``, the row is bad iff ``r (xs + x1) == q (xs + x2)``.
    """
    _check_triple(q, r, k)
    hits = 0
    for xs in range(k + 1):
        ws = comb(k, xs)
        for x1 in range(q - k + 1):
            num = r * (xs + x1)
            if num % q:
                continue
            x2 = num // q - xs
            if 0 <= x2 <= r - k:
                hits += ws * comb(q - k, x1) * comb(r - k, x2)
    return Fraction(hits, 2 ** (q + r - k))


def mc_bad_row_prob(q, r, k, trials, seed=0):
    """Monte Carlo frequency of bad rows and its binomial standard error.

    Each trial consumes ``q + r - k`` fair bits (shared, only-``I1``,
    only-``I2``, in that order) from a SplitMix64 stream. When the observed
    frequency is 0 or 1 the variance is replaced by its maximum 1/4.
    """
    _check_triple(q, r, k)
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    width = q + r - k
    bits = SplitMix64(seed).bits(trials * width).reshape(trials, width)
    xs = bits[:, :k].sum(axis=1, dtype=np.int64)
    x1 = bits[:, k:q].sum(axis=1, dtype=np.int64)
    x2 = bits[:, q:].sum(axis=1, dtype=np.int64)
    hits = int(np.count_nonzero(r * (xs + x1) == q * (xs + x2)))
    freq = hits / trials
    var = freq * (1.0 - freq)
    if var == 0.0:
        var = 0.25
    return freq, math.sqrt(var / trials)


@lru_cache(maxsize=None)
def empirical_p(q):
    """Worst exact bad-row probability over all coalitions opposing one of size q.

    Returns ``(p, exceeded)`` where ``exceeded`` flags a raw maximum above 1/2
    (then clamped).
    """
    worst = Fraction(0)
    for r in range(1, q + 1):
        for k in range(r + 1):
            if q == r == k:
                continue
            worst = max(worst, exact_bad_row_prob(q, r, k))
    half = Fraction(1, 2)
    return min(worst, half), worst > half


@dataclass(frozen=True)
class PModel:
    """Upper bound ``p(q)`` on the bad-row probability for a coalition of size q."""

    kind: str = CONSERVATIVE
    table: Optional[Dict[int, float]] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in (CONSERVATIVE, ASYMPTOTIC, EMPIRICAL):
            raise ValueError(f"unknown p-model {self.kind!r}")

    def p(self, q):
        if q < 1:
            raise ValueError(f"coalition size must be positive, got {q}")
        if self.kind == CONSERVATIVE:
            return 0.5
        if self.kind == ASYMPTOTIC:
            return min(0.5, q ** (-1.0 / 3.0))
        if self.table is not None and q in self.table:
            return float(self.table[q])
        return float(empirical_p(q)[0])

    def clamped(self, q):
        """Whether the empirical maximum for ``q`` exceeded 1/2 and was clamped."""
        return self.kind == EMPIRICAL and empirical_p(q)[1]


def as_model(model):
    if isinstance(model, PModel):
        return model
    return PModel(model)


@dataclass(frozen=True)
class RateEstimate:
    r_hat: float
    argmin_q: int
    t: int
    tau: float
    model: PModel


def _rate_term(q, tau, p):
    h = binary_entropy(tau)
    return -(math.log2(p) + h + tau * math.log2((1.0 - p) / p)) / (2 * q)


def rate_lower_bound(t, tau, model=CONSERVATIVE):
    """Achievable rate ``min_q -(log2 p + h(tau) + tau log2((1-p)/p)) / (2q)`` over q in [1, t].

    Ties go to the smallest q.
    """
    model = as_model(model)
    if t < 1:
        raise ValueError(f"t must be at least 1, got {t}")
    if not 0 <= tau < 0.5:
        raise ValueError(f"tau must lie in [0, 1/2), got {tau}")
    best, best_q = math.inf, None
    for q in range(1, t + 1):
        p = model.p(q)
        if tau >= 1.0 - p:
            raise ValueError(
                f"bound is vacuous: tau={tau} >= 1 - p({q}) = {1.0 - p}"
            )
        value = _rate_term(q, tau, p)
        if value < best:
            best, best_q = value, q
    return RateEstimate(best, best_q, t, tau, model)


def _log2_comb(n, k):
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / math.log(2)


def expected_bad_pairs_log2(n, M, t, tau, model=CONSERVATIVE):
    """log2 of the union bound on the expected number of bad coalition pairs.

    Evaluates ``sum_q q M^(2q) T C(n,T) (1-p)^T p^(n-T)`` with ``T = floor(tau n)``
    entirely in log space. For ``T = 0`` the factor ``T`` is taken as 1 so the
    all-rows-bad term is kept.
    """
    model = as_model(model)
    if n < 1 or M < 1 or t < 1:
        raise ValueError("n, M and t must be positive")
    if not 0 <= tau < 0.5:
        raise ValueError(f"tau must lie in [0, 1/2), got {tau}")
    T = math.floor(tau * n)
    log2_M = math.log2(M)
    terms = []
    for q in range(1, t + 1):
        p = model.p(q)
        if T > (1.0 - p) * n:
            raise ValueError(f"T={T} exceeds (1 - p({q})) n = {(1.0 - p) * n}")
        term = (
            math.log2(q)
            + 2 * q * log2_M
            + math.log2(max(T, 1))
            + _log2_comb(n, T)
            + T * math.log2(1.0 - p)
            + (n - T) * math.log2(p)
        )
        terms.append(term)
    top = max(terms)
    return top + math.log2(sum(2.0 ** (x - top) for x in terms))


def find_code(n, M, t, T, max_attempts=1000, seed=0, n_jobs=1):
    """Draw ``random_code(n, M, seed ^ attempt)`` until one is a Hamming (t, T) code.

    Returns ``(code, attempts_used)`` or ``None`` when every attempt failed.
    With several workers, attempts run in batches and the lowest successful
    attempt index wins, so the result does not depend on ``n_jobs``.
    """
    if n < 1 or M < 1 or t < 1 or T < 0 or max_attempts < 1:
        raise ValueError("n, M, t and max_attempts must be positive and T nonnegative")
    if t > M:
        raise ValueError(f"t={t} exceeds M={M}")

    def attempt(i):
        code = random_code(n, M, seed ^ i)
        return code if is_hamming_ltc(code, t, T).holds else None

    workers = n_jobs if n_jobs and n_jobs > 0 else (os.cpu_count() or 1)
    if workers == 1:
        for i in range(max_attempts):
            code = attempt(i)
            if code is not None:
                return code, i + 1
        return None
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for start in range(0, max_attempts, workers):
            batch = range(start, min(start + workers, max_attempts))
            for i, code in zip(batch, pool.map(attempt, batch)):
                if code is not None:
                    return code, i + 1
    return None


def bad_row_table(max_q, trials=0, seed=0):
    """Rows ``(q, r, k, exact, mc_freq, mc_stderr)`` for every admissible triple with q <= max_q."""
    rows = []
    for q in range(1, max_q + 1):
        for r in range(1, q + 1):
            for k in range(r + 1):
                if q == r == k:
                    continue
                exact = exact_bad_row_prob(q, r, k)
                freq = err = None
                if trials:
                    freq, err = mc_bad_row_prob(q, r, k, trials, seed)
                rows.append((q, r, k, exact, freq, err))
    return rows


def bad_row_csv(rows, trials):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["q", "r", "k", "exact_num", "exact_den", "mc_freq", "mc_stderr", "trials"])
    for q, r, k, exact, freq, err in rows:
        w.writerow([
            q, r, k, exact.numerator, exact.denominator,
            "" if freq is None else repr(freq),
            "" if err is None else repr(err),
            trials,
        ])
    return buf.getvalue()


def rate_csv(estimates):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(["t", "tau", "model", "r_hat", "argmin_q"])
    for est in estimates:
        w.writerow([est.t, repr(est.tau), est.model.kind, repr(est.r_hat), est.argmin_q])
    return buf.getvalue()
