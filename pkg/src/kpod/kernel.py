"""Kernel functions, Gram matrix assembly and kernel centering statistics.

Feature vectors are either dense (anything ``np.asarray`` accepts) or sparse
mappings ``{index: value}`` where an absent index means zero. Bulk routines
(:func:`gram`, :func:`cross_kernel`, :func:`kernel_vector`) work on dense
row-stacked matrices; sparse inputs are densified first.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InputError

__all__ = [
    "FAMILIES",
    "KernelSpec",
    "CenteringStats",
    "eval_kernel",
    "gram",
    "cross_kernel",
    "kernel_vector",
    "kernel_diag",
    "centering_stats",
    "as_rows",
]

FAMILIES = ("rbf", "linear", "polynomial")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family and hyperparameters.

    rbf:        ``exp(-|x - y|^2 / (2 sigma^2))``
    linear:     ``<x, y>``
    polynomial: ``(<x, y> + coef0) ** degree``
    """

    family: str = "rbf"
    sigma: float = 1.0
    degree: int = 2
    coef0: float = 0.0

    def __post_init__(self):
        family = {"poly": "polynomial"}.get(self.family, self.family)
        object.__setattr__(self, "family", family)
        if family not in FAMILIES:
            raise InputError(f"unknown kernel family {self.family!r}")
        if family == "rbf" and not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise InputError(f"rbf sigma must be positive, got {self.sigma}")
        if family == "polynomial" and (int(self.degree) != self.degree or self.degree < 1):
            raise InputError(f"polynomial degree must be an integer >= 1, got {self.degree}")
        if not math.isfinite(self.coef0):
            raise InputError("coef0 must be finite")

    @classmethod
    def rbf_from_gamma(cls, gamma: float) -> "KernelSpec":
        """LIBSVM-style ``exp(-gamma |x-y|^2)``, i.e. ``sigma = 1/sqrt(2 gamma)``."""
        if not gamma > 0:
            raise InputError(f"gamma must be positive, got {gamma}")
        return cls("rbf", sigma=1.0 / math.sqrt(2.0 * gamma))

    @property
    def gamma(self) -> float:
        return 1.0 / (2.0 * self.sigma**2)

    def to_dict(self) -> dict:
        return {"family": self.family, "sigma": self.sigma,
                "degree": int(self.degree), "coef0": self.coef0}

    @classmethod
    def from_dict(cls, d: Mapping) -> "KernelSpec":
        return cls(d["family"], float(d["sigma"]), int(d["degree"]), float(d["coef0"]))


@dataclass(frozen=True)
class CenteringStats:
    """Row means and grand mean of a Gram matrix."""

    row_means: np.ndarray
    total_mean: float


def _check_finite(values):
    if not np.all(np.isfinite(values)):
        raise InputError("feature vector contains a non-finite value")


def _sparse_items(x: Mapping):
    items = sorted((int(k), float(v)) for k, v in x.items())
    _check_finite([v for _, v in items])
    return items


def _sparse_dot_and_sqdist(x: Mapping, y: Mapping):
    # merged traversal over sorted indices; absent index contributes 0
    a, b = _sparse_items(x), _sparse_items(y)
    i = j = 0
    dot = sq = 0.0
    while i < len(a) or j < len(b):
        if j == len(b) or (i < len(a) and a[i][0] < b[j][0]):
            sq += a[i][1] ** 2
            i += 1
        elif i == len(a) or b[j][0] < a[i][0]:
            sq += b[j][1] ** 2
            j += 1
        else:
            dot += a[i][1] * b[j][1]
            sq += (a[i][1] - b[j][1]) ** 2
            i += 1
            j += 1
    return dot, sq


def _from_dot_sqdist(spec: KernelSpec, dot, sq):
    if spec.family == "rbf":
        return np.exp(-sq / (2.0 * spec.sigma**2))
    if spec.family == "linear":
        return dot
    return (dot + spec.coef0) ** int(spec.degree)


def eval_kernel(spec: KernelSpec, x, y) -> float:
    """Evaluate ``K(x, y)`` for one pair of feature vectors."""
    if isinstance(x, Mapping) and isinstance(y, Mapping):
        dot, sq = _sparse_dot_and_sqdist(x, y)
        return float(_from_dot_sqdist(spec, dot, sq))
    if isinstance(x, Mapping) or isinstance(y, Mapping):
        x, y = as_rows([x, y])
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if x.shape != y.shape:
        raise InputError(f"feature vectors differ in length: {x.size} vs {y.size}")
    _check_finite(x)
    _check_finite(y)
    diff = x - y
    return float(_from_dot_sqdist(spec, float(x @ y), float(diff @ diff)))


def as_rows(samples, n_features: int | None = None) -> np.ndarray:
    """Stack feature vectors into a dense ``(n, d)`` float matrix.

    Sparse mappings use 1-based indices (LIBSVM convention), so index ``i``
    lands in column ``i - 1``.
    """
    if isinstance(samples, np.ndarray):
        X = np.atleast_2d(np.asarray(samples, dtype=float))
        _check_finite(X)
        return X
    samples = list(samples)
    if not samples:
        return np.zeros((0, n_features or 0))
    if any(isinstance(s, Mapping) for s in samples):
        width = max((int(k) for s in samples if isinstance(s, Mapping) for k in s),
                    default=0)
        width = max([width] + [np.size(s) for s in samples if not isinstance(s, Mapping)])
        if n_features is not None:
            width = max(width, n_features)
        X = np.zeros((len(samples), width))
        for r, s in enumerate(samples):
            if isinstance(s, Mapping):
                for k, v in s.items():
                    X[r, int(k) - 1] = v
            else:
                s = np.ravel(s)
                X[r, : s.size] = s
    else:
        X = np.array([np.ravel(np.asarray(s, dtype=float)) for s in samples], dtype=float)
        if X.ndim == 1:
            X = X.reshape(len(samples), -1)
    _check_finite(X)
    return X


def cross_kernel(spec: KernelSpec, X, Y) -> np.ndarray:
    """Kernel matrix ``out[i, j] = K(X[i], Y[j])`` between two sample sets."""
    X = as_rows(X)
    Y = as_rows(Y)
    if X.shape[1] != Y.shape[1]:
        # sparse inputs may disagree on trailing zero columns
        d = max(X.shape[1], Y.shape[1])
        X = np.pad(X, ((0, 0), (0, d - X.shape[1])))
        Y = np.pad(Y, ((0, 0), (0, d - Y.shape[1])))
    if spec.family == "rbf":
        return np.exp(cdist(X, Y, "sqeuclidean") / (-2.0 * spec.sigma**2))
    dots = X @ Y.T
    if spec.family == "linear":
        return dots
    return (dots + spec.coef0) ** int(spec.degree)


def gram(spec: KernelSpec, samples) -> np.ndarray:
    """Symmetric Gram matrix of ``samples``.

    Only the upper triangle is kept from the kernel evaluation; the lower
    triangle is its mirror, so the result is bit-exactly symmetric.
    """
    X = as_rows(samples)
    if X.shape[0] == 0:
        raise InputError("cannot build a Gram matrix from an empty sample list")
    K = np.triu(cross_kernel(spec, X, X))
    K += np.triu(K, 1).T
    if spec.family == "rbf":
        np.fill_diagonal(K, 1.0)
    return K


def kernel_vector(spec: KernelSpec, samples, x) -> np.ndarray:
    """``v[k] = K(samples[k], x)``."""
    X = as_rows(samples)
    if X.shape[0] == 0:
        raise InputError("empty sample list")
    if isinstance(x, Mapping):
        x = as_rows([x], n_features=X.shape[1])
    return cross_kernel(spec, X, np.reshape(np.asarray(x, dtype=float), (1, -1)))[:, 0]


def kernel_diag(spec: KernelSpec, X) -> np.ndarray:
    """``K(x, x)`` for every row of ``X``."""
    X = as_rows(X)
    if spec.family == "rbf":
        return np.ones(X.shape[0])
    sq = np.einsum("ij,ij->i", X, X)
    if spec.family == "linear":
        return sq
    return (sq + spec.coef0) ** int(spec.degree)


def centering_stats(K: np.ndarray) -> CenteringStats:
    K = np.asarray(K, dtype=float)
    row_means = K.mean(axis=0)
    return CenteringStats(row_means, float(row_means.mean()))
