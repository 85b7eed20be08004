"""Simulation of the watermarking channel.

The dealer spreads each user's fingerprint over ``n`` orthonormal carriers,
a coalition averages its copies and adds noise, and the dealer projects the
forged copy back onto the carriers to get a syndrome.
"""

import json
import re
import warnings
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._rng import SplitMix64
from .validation import check_code, check_coalition, check_vector

ORTHO_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class CarrierBasis:
    """``n`` orthonormal carrier vectors of length ``N``, stored as rows."""

    vectors: np.ndarray

    @property
    def n(self):
        return self.vectors.shape[0]

    @property
    def N(self):
        return self.vectors.shape[1]

    def gram(self):
        return self.vectors @ self.vectors.T

    def is_orthonormal(self, tol=ORTHO_TOL):
        return bool(np.abs(self.gram() - np.eye(self.n)).max() <= tol)


@dataclass(frozen=True)
class NoiseSpec:
    """Adversarial noise model: ``none``, a Euclidean ball, or sparse support."""

    kind: str = "none"
    delta: float = 0.0
    T: int = 0
    magnitude: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("none", "ball", "sparse"):
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.delta < 0:
            raise ValueError(f"ball radius must be nonnegative, got {self.delta}")
        if self.T < 0:
            raise ValueError(f"sparse support bound must be nonnegative, got {self.T}")
        if self.kind == "sparse" and not self.magnitude > 0:
            raise ValueError(f"sparse magnitude must be positive, got {self.magnitude}")

    @classmethod
    def parse(cls, text, seed=0):
        """Parse ``none``, ``ball:delta=<float>`` or ``sparse:T=<int>[,mag=<float>]``."""
        text = text.strip()
        if text == "none":
            return cls("none", seed=seed)
        m = re.fullmatch(r"ball:delta=([^,]+)", text)
        if m:
            return cls("ball", delta=float(m.group(1)), seed=seed)
        m = re.fullmatch(r"sparse:T=(\d+)(?:,mag=([^,]+))?", text)
        if m:
            mag = float(m.group(2)) if m.group(2) is not None else 1.0
            return cls("sparse", T=int(m.group(1)), magnitude=mag, seed=seed)
        raise ValueError(
            f"bad noise spec {text!r}; expected none | ball:delta=<float> | "
            "sparse:T=<int>[,mag=<float>]"
        )

    def __str__(self):
        if self.kind == "ball":
            return f"ball:delta={self.delta!r}"
        if self.kind == "sparse":
            return f"sparse:T={self.T},mag={self.magnitude!r}"
        return "none"


@dataclass(frozen=True, eq=False)
class Syndrome:
    s: np.ndarray

    @property
    def n(self):
        return self.s.shape[0]

    def to_json(self):
        return json.dumps({"n": self.n, "s": [float(v) for v in self.s]})

    @classmethod
    def from_json(cls, text):
        doc = json.loads(text)
        s = np.asarray(doc["s"], dtype=float)
        if s.ndim != 1 or s.shape[0] != doc["n"]:
            raise ValueError(f"syndrome declares n={doc['n']} but has {s.size} entries")
        return cls(s)


def make_carriers(n, N, seed=0):
    """Orthonormal carriers from seeded Gaussian rows.

    Rows are orthonormalised by modified Gram-Schmidt with a second
    re-orthogonalisation pass.
    """
    if n < 1:
        raise ValueError(f"need at least one carrier, got n={n}")
    if N < n:
        raise ValueError(f"cannot fit {n} orthonormal vectors in dimension N={N}")
    F = SplitMix64(seed).gaussian(n * N).reshape(n, N)
    for i in range(n):
        v = F[i]
        for _ in range(2):
            for j in range(i):
                v -= (F[j] @ v) * F[j]
        norm = np.linalg.norm(v)
        if norm < 1e-8:
            raise ValueError("degenerate Gaussian draw; try another seed")
        F[i] = v / norm
    F.setflags(write=False)
    return CarrierBasis(F)


def make_host(N, n, seed=0):
    """Seeded Gaussian host signal with norm ``100 * sqrt(n)``."""
    x = SplitMix64(seed).gaussian(N)
    return x * (100.0 * np.sqrt(n) / np.linalg.norm(x))


def _check_dims(host, carriers, code=None):
    host = check_vector(host, carriers.N, "host")
    if code is not None and code.n != carriers.n:
        raise ValueError(f"code has {code.n} rows but there are {carriers.n} carriers")
    return host


def watermark(carriers, code, user):
    """``w_user = sum_j h_{j,user} f_j``."""
    code = check_code(code)
    return code.column(user).astype(float) @ carriers.vectors


def embed(host, carriers, code, user):
    """The copy sold to ``user`` (1-based): ``host + w_user``."""
    code = check_code(code)
    host = _check_dims(host, carriers, code)
    return host + watermark(carriers, code, user)


def noise_coefficients(noise, n):
    """Carrier-space coefficients of the noise vector (its exact syndrome image)."""
    rng = SplitMix64(noise.seed)
    e = np.zeros(n)
    if noise.kind == "ball":
        direction = rng.gaussian(n)
        norm = np.linalg.norm(direction)
        u = 1.0 - rng.random()  # (0, 1]
        e = direction * (noise.delta * u / norm)
    elif noise.kind == "sparse":
        T = noise.T
        if T > n:
            warnings.warn(f"sparse noise support T={T} exceeds n={n}; clamped to {n}")
            T = n
        # partial Fisher-Yates picks T distinct carriers
        order = list(range(n))
        for i in range(T):
            j = i + rng.below(n - i)
            order[i], order[j] = order[j], order[i]
        picked = order[:T]
        e[picked] = (2.0 * rng.uniform(T) - 1.0) * noise.magnitude
    return e


def forge(code, coalition, host, carriers, noise=None):
    """Averaging attack: ``host + mean_{i in I} w_i + eps`` with ``eps`` in the carrier span."""
    code = check_code(code)
    coalition = check_coalition(coalition, code.M)
    host = _check_dims(host, carriers, code)
    noise = noise or NoiseSpec()
    cols = [j - 1 for j in coalition.indices]
    avg = code.bits[:, cols].mean(axis=1)
    e = noise_coefficients(noise, code.n)
    return host + (avg + e) @ carriers.vectors


def extract_syndrome(y, host, carriers):
    """``s_k = <y - host, f_k>``."""
    host = _check_dims(host, carriers)
    y = check_vector(y, carriers.N, "forged copy")
    return Syndrome(carriers.vectors @ (y - host))


class SyndromeExtractor(TransformerMixin, BaseEstimator):
    """Transformer mapping forged copies (rows of ``Y``) to syndromes.

    Stateless given its ``host`` and ``carriers``, so it composes with
    :class:`~fptrace.trace.CoalitionTracer` in a pipeline.
    """

    def __init__(self, host, carriers):
        self.host = host
        self.carriers = carriers

    def fit(self, Y=None, y=None):
        self.host_ = _check_dims(self.host, self.carriers)
        self.n_features_in_ = self.carriers.N
        return self

    def transform(self, Y):
        check_is_fitted(self, "host_")
        Y = np.asarray(Y, dtype=float)
        if Y.ndim == 1:
            Y = Y[None, :]
        if Y.shape[1] != self.carriers.N:
            raise ValueError(f"copies must have length {self.carriers.N}, got {Y.shape[1]}")
        return (Y - self.host_) @ self.carriers.vectors.T
