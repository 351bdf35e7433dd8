"""POD subspace of one class subset in feature space.

The subspace is spanned by the mapped training samples ``phi(X_k)``. Its
orthonormal modes are ``psi_i = sum_k coeffs[i, k] phi(X_k)`` with
``coeffs[i] = V^i / sqrt(lambda_i)``, where ``(lambda_i, V^i)`` are the leading
eigenpairs of the (optionally double-centered) Gram matrix. Coordinates and
distances of a query only need kernel evaluations against the stored samples.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from . import kernel as kern
from .eig import TruncationPolicy, sym_eigen, truncate
from .errors import DegenerateClassError, NumericalError
from .kernel import CenteringStats, KernelSpec

__all__ = ["SubspaceModel", "fit", "coordinates", "distance", "residual_distance"]

#: Radicands down to ``-CLAMP_RTOL`` times the size of their terms are rounding noise.
CLAMP_RTOL = 1e-8

_CHUNK = 2048


@dataclass(frozen=True, eq=False)
class SubspaceModel:
    kernel: KernelSpec
    class_label: Any
    subset_index: int
    samples: np.ndarray
    coeffs: np.ndarray
    eigenvalues: np.ndarray
    centered: bool = False
    stats: CenteringStats | None = field(default=None)

    @property
    def n_modes(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    def truncated(self, p: int) -> "SubspaceModel":
        """Same subspace restricted to its ``p`` leading modes."""
        return replace(self, coeffs=self.coeffs[:p], eigenvalues=self.eigenvalues[:p])

    def project(self, X):
        """Squared feature-space norms and POD coordinates of the rows of ``X``.

        Returns ``(norm2, alpha)`` with ``norm2`` of shape ``(m,)`` and ``alpha``
        of shape ``(p, m)``. For a centered model, ``norm2`` is the squared
        distance to the class mean and ``alpha`` the centered coordinates.
        """
        norm2, alpha, _ = self.project_terms(X)
        return norm2, alpha

    def project_terms(self, X):
        """Like :meth:`project`, plus the magnitude of the kernel terms in ``norm2``."""
        X = kern.as_rows(X)
        Kq = kern.cross_kernel(self.kernel, self.samples, X)
        kxx = kern.kernel_diag(self.kernel, X)
        norm2, scale = kxx, np.abs(kxx)
        if self.centered:
            col_means = Kq.mean(axis=0)
            Kq = Kq - self.stats.row_means[:, None] - col_means[None, :] + self.stats.total_mean
            norm2 = kxx - 2.0 * col_means + self.stats.total_mean
            scale = scale + 2.0 * np.abs(col_means) + abs(self.stats.total_mean)
        return norm2, self.coeffs @ Kq, scale

    def coordinates(self, X) -> np.ndarray:
        """POD coordinates, shape ``(m, p)`` (or ``(p,)`` for a single vector)."""
        single = _is_single(X)
        alpha = self.project(_as_batch(X))[1].T
        return alpha[0] if single else alpha

    def distance(self, X):
        """Feature-space distance from each query to the subspace."""
        single = _is_single(X)
        X = kern.as_rows(_as_batch(X))
        out = np.empty(X.shape[0])
        for start in range(0, X.shape[0], _CHUNK):
            chunk = X[start:start + _CHUNK]
            norm2, alpha, scale = self.project_terms(chunk)
            out[start:start + _CHUNK] = residual_distance(norm2, np.sum(alpha * alpha, axis=0), scale)
        return float(out[0]) if single else out

    def mode_gram(self) -> np.ndarray:
        """Feature-space Gram matrix of the modes; the identity up to rounding."""
        K = kern.gram(self.kernel, self.samples)
        if self.centered:
            K = _double_center(K, self.stats)
        return self.coeffs @ K @ self.coeffs.T


def _is_single(X):
    if isinstance(X, dict):
        return True
    return np.ndim(X) == 1


def _as_batch(X):
    if _is_single(X):
        return [X]
    return X


def _double_center(K, stats):
    return K - stats.row_means[:, None] - stats.row_means[None, :] + stats.total_mean


def residual_distance(norm2, proj2, scale):
    """``sqrt(norm2 - proj2)`` with the negative-radicand clamp.

    ``scale`` is the magnitude of the kernel terms that make up ``norm2``
    (``K(x, x)`` for a non-centered model); the clamp tolerance is
    ``CLAMP_RTOL * max(scale, proj2)``.
    """
    rad = np.asarray(norm2 - proj2, dtype=float)
    eps = CLAMP_RTOL * np.maximum(np.abs(scale), proj2)
    bad = rad < -eps
    if np.any(bad):
        worst = float(rad[bad].min())
        raise NumericalError(f"negative squared distance {worst:.3e}; modes are not orthonormal")
    return np.sqrt(np.maximum(rad, 0.0))


def fit(spec: KernelSpec, samples, policy: TruncationPolicy = TruncationPolicy(),
        centered: bool = False, label=None, subset_index: int = 0,
        method: str = "auto") -> SubspaceModel:
    """Fit the POD subspace spanned by the mapped ``samples``.

    Raises :class:`DegenerateClassError` when the (centered) Gram matrix has
    no positive eigenvalue, e.g. a single sample under centering.
    """
    X = kern.as_rows(samples)
    K = kern.gram(spec, X)
    stats = None
    if centered:
        stats = kern.centering_stats(K)
        K = _double_center(K, stats)
        K = np.triu(K) + np.triu(K, 1).T
    scale = np.abs(K).max()
    try:
        d = sym_eigen(K, method=method)
        if d.values[0] <= K.shape[0] * np.finfo(float).eps * scale:
            raise DegenerateClassError("Gram matrix has no positive eigenvalue")
        p = truncate(d, policy)
    except DegenerateClassError as exc:
        raise DegenerateClassError(str(exc), label=label) from None
    except NumericalError as exc:
        raise NumericalError(f"class {label!r}: {exc}") from None
    lam = d.values[:p]
    coeffs = (d.vectors[:, :p] / np.sqrt(lam)).T
    return SubspaceModel(spec, label, subset_index, X, np.ascontiguousarray(coeffs),
                         lam.copy(), centered, stats)


def coordinates(m: SubspaceModel, x) -> np.ndarray:
    return m.coordinates(x)


def distance(m: SubspaceModel, x):
    return m.distance(x)
