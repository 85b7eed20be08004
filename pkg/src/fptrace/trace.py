"""Coalition recovery by exhaustive search over all coalitions of size <= t.

Two decoders are provided. The Euclidean one returns the coalition whose
averaged signature is nearest to the syndrome; the Hamming one returns the
coalition whose signature agrees with the syndrome (up to ``match_tol``) on
the most coordinates. Ties are reported, never silently resolved.
"""

import json
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .core import Coalition
from .validation import check_code, check_syndromes, check_t
from .verify import enumerate_coalitions, signature_table

EUCLIDEAN = "euclidean"
HAMMING = "hamming"


@dataclass(frozen=True)
class TraceResult:
    coalition: Coalition
    score: float
    runner_up: Optional[Coalition]
    runner_up_score: Optional[float]
    margin: float
    ambiguous: bool
    metric: str
    candidates: int

    def to_dict(self):
        return {
            "coalition": list(self.coalition.indices),
            "score": float(self.score),
            "margin": None if math.isinf(self.margin) else float(self.margin),
            "ambiguous": self.ambiguous,
            "metric": self.metric,
            "candidates": self.candidates,
        }

    def to_json(self):
        return json.dumps(self.to_dict())


def _gap_scale(t):
    # nonzero coordinate gaps between signatures are >= 1/(t(t-1)), or 1 when t = 1
    return max(t * (t - 1), 1)


def default_match_tol(t):
    """A quarter of the minimum gap between two signature values."""
    return 1.0 / (4 * _gap_scale(t))


def _check_match_tol(match_tol, t):
    if match_tol is None:
        return default_match_tol(t)
    half_gap = 1.0 / (2 * _gap_scale(t))
    if not match_tol > 0:
        raise ValueError(f"match_tol must be positive, got {match_tol}")
    if match_tol >= half_gap:
        raise ValueError(
            f"match_tol={match_tol} is not below half the minimum signature gap "
            f"({half_gap:.6g} for t={t}); two distinct signature values could both match"
        )
    return float(match_tol)


class _CandidateTable:
    """Float averaged signatures of every coalition of size <= t, canonical order."""

    def __init__(self, code, t):
        self.coalitions = enumerate_coalitions(code.M, t)
        counts, sizes = signature_table(code, self.coalitions)
        self.sigma = counts / sizes[:, None]

    def __len__(self):
        return len(self.coalitions)

    def scores(self, S, metric, match_tol):
        """Score matrix of shape (n_syndromes, n_candidates)."""
        if metric == EUCLIDEAN:
            diff = S[:, None, :] - self.sigma[None, :, :]
            return np.einsum("ijk,ijk->ij", diff, diff)
        return (np.abs(S[:, None, :] - self.sigma[None, :, :]) <= match_tol).sum(axis=2)

    def result(self, row, metric):
        # best = smallest key; np.argmin returns the first hit, i.e. canonical tie-break
        keys = (row if metric == EUCLIDEAN else -row).astype(float)
        best = int(np.argmin(keys))
        runner, runner_score, margin, ambiguous = None, None, math.inf, False
        if len(keys) > 1:
            rest = keys.copy()
            rest[best] = np.inf
            second = int(np.argmin(rest))
            runner = self.coalitions[second]
            runner_score = row[second].item()
            margin = abs(row[best].item() - runner_score)
            ambiguous = bool(keys[second] == keys[best])
        return TraceResult(
            self.coalitions[best],
            row[best].item(),
            runner,
            runner_score,
            margin,
            ambiguous,
            metric,
            len(self.coalitions),
        )


def _trace(code, s, t, metric, match_tol=None):
    tracer = CoalitionTracer(code, t, metric, match_tol).fit()
    return tracer.decode(getattr(s, "s", s))[0]


def trace_euclidean(code, s, t):
    """Coalition of size <= t whose averaged signature is nearest to ``s``.

    ``score`` is the squared distance.
    """
    return _trace(code, s, t, EUCLIDEAN)


def trace_hamming(code, s, t, match_tol=None):
    """Coalition of size <= t agreeing with ``s`` on the most coordinates.

    A coordinate agrees when ``|s_k - sigma_k| <= match_tol``; ``score`` is the
    number of agreeing coordinates. The default tolerance is a quarter of the
    smallest possible gap ``1/(t(t-1))`` between signature values.
    """
    return _trace(code, s, t, HAMMING, match_tol)


class CoalitionTracer(BaseEstimator):
    """Estimator wrapper around the exhaustive decoders.

    The code is a constructor parameter (like a fixed dictionary), so
    ``fit`` only validates and tabulates candidate signatures; ``predict``
    maps syndromes, one per row, to coalitions.

    Parameters
    ----------
    code : BinaryCode or array-like of shape (n, M)
    t : int
        Largest coalition size searched.
    metric : {"hamming", "euclidean"}
    match_tol : float or None
        Agreement tolerance for the Hamming metric; ``None`` uses
        :func:`default_match_tol`.
    """

    def __init__(self, code, t=2, metric=HAMMING, match_tol=None):
        self.code = code
        self.t = t
        self.metric = metric
        self.match_tol = match_tol

    def fit(self, X=None, y=None):
        code = check_code(self.code)
        t = check_t(self.t, code.M)
        if self.metric not in (HAMMING, EUCLIDEAN):
            raise ValueError(f"metric must be 'hamming' or 'euclidean', got {self.metric!r}")
        self.match_tol_ = (
            _check_match_tol(self.match_tol, t) if self.metric == HAMMING else None
        )
        self.code_ = code
        self.table_ = _CandidateTable(code, t)
        self.n_features_in_ = code.n
        return self

    def decode(self, S):
        """One :class:`TraceResult` per syndrome row."""
        check_is_fitted(self, "table_")
        S = check_syndromes(S, self.code_.n)
        scores = self.table_.scores(S, self.metric, self.match_tol_)
        dtype = float if self.metric == EUCLIDEAN else np.int64
        return [self.table_.result(row.astype(dtype), self.metric) for row in scores]

    def predict(self, S):
        """Recovered coalitions as tuples of 1-based user indices."""
        results = self.decode(S)
        out = np.empty(len(results), dtype=object)
        for i, res in enumerate(results):
            out[i] = res.coalition.indices
        return out

    def score(self, S, y):
        """Fraction of syndromes traced to exactly the true coalition."""
        pred = self.predict(S)
        truth = [Coalition(c).indices for c in y]
        return float(np.mean([p == q for p, q in zip(pred, truth)]))
