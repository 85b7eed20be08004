"""Input validation helpers shared by the public functions and estimators."""

import numbers

import numpy as np

from .core import BinaryCode, as_coalition


def check_code(code):
    """Return ``code`` as a :class:`BinaryCode`, accepting any 0/1 array-like."""
    if isinstance(code, BinaryCode):
        return code
    return BinaryCode(np.asarray(code))


def check_coalition(coalition, M):
    coalition = as_coalition(coalition)
    if coalition.indices[-1] > M:
        raise IndexError(f"coalition {coalition} has an index outside [1, {M}]")
    return coalition


def check_t(t, M):
    if not isinstance(t, numbers.Integral) or t < 1:
        raise ValueError(f"coalition bound t must be a positive integer, got {t!r}")
    if t > M:
        raise ValueError(f"coalition bound t={t} exceeds the number of users M={M}")
    return int(t)


def check_nonnegative_int(value, name):
    if not isinstance(value, numbers.Integral) or value < 0:
        raise ValueError(f"{name} must be a nonnegative integer, got {value!r}")
    return int(value)


def check_vector(v, length, name):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or v.shape[0] != length:
        raise ValueError(f"{name} must be a vector of length {length}, got shape {v.shape}")
    return v


def check_syndromes(S, n):
    """2-d float array of syndromes, one per row; a single vector is promoted."""
    S = np.asarray(S, dtype=float)
    if S.ndim == 1:
        S = S[None, :]
    if S.ndim != 2 or S.shape[1] != n:
        raise ValueError(f"syndromes must have {n} coordinates, got shape {S.shape}")
    return S


__all__ = [
    "check_code",
    "check_coalition",
    "check_t",
    "check_nonnegative_int",
    "check_vector",
    "check_syndromes",
]
