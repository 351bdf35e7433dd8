"""Brute-force reference computations for testing.

Nothing here goes through the kernel trick or the Jacobi solver: distances are
measured in an explicitly constructed feature space with modified Gram-Schmidt
(or an SVD when only the top modes are wanted), and POD optimality is checked
by random search over unit vectors.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import InputError
from .kernel import KernelSpec

__all__ = ["ExplicitMap", "explicit_distance", "gram_schmidt", "pod_objective",
           "brute_force_pod_max"]


class ExplicitMap:
    """Finite feature map ``phi`` with ``<phi(x), phi(y)> = K(x, y)``.

    Available for the linear kernel and for polynomial kernels of degree 1
    or 2 with ``coef0 >= 0``. The degree-2 map is the monomial embedding

        x_i^2,  sqrt(2) x_i x_j (i < j),  sqrt(2 c) x_i,  c

    which for ``c = 0`` and two inputs reduces to ``(x1^2, sqrt(2) x1 x2, x2^2)``
    up to the trailing zero entries.
    """

    def __init__(self, spec: KernelSpec):
        if spec.family == "rbf":
            raise InputError("the rbf kernel has no finite explicit feature map")
        if spec.family == "polynomial":
            if spec.degree not in (1, 2):
                raise InputError("explicit maps cover polynomial degree 1 and 2 only")
            if spec.coef0 < 0:
                raise InputError("explicit polynomial map needs coef0 >= 0")
        self.spec = spec

    def __call__(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        spec = self.spec
        if spec.family == "linear":
            return X.copy()
        c = spec.coef0
        n, d = X.shape
        if spec.degree == 1:
            return np.hstack([X, np.full((n, 1), math.sqrt(c))])
        cols = [X[:, i] ** 2 for i in range(d)]
        cols += [math.sqrt(2.0) * X[:, i] * X[:, j] for i, j in itertools.combinations(range(d), 2)]
        cols += [math.sqrt(2.0 * c) * X[:, i] for i in range(d)]
        cols.append(np.full(n, c))
        return np.column_stack(cols)


def gram_schmidt(vectors, rtol=1e-10) -> np.ndarray:
    """Orthonormal basis (rows) of the span of ``vectors`` (rows).

    Modified Gram-Schmidt with one re-orthogonalisation pass; a vector whose
    remainder is below ``rtol`` times the largest input norm is dropped as
    dependent.
    """
    V = np.atleast_2d(np.asarray(vectors, dtype=float))
    scale = max(np.linalg.norm(V, axis=1).max(initial=0.0), np.finfo(float).tiny)
    basis = []
    for v in V:
        w = v.copy()
        for _ in range(2):
            for q in basis:
                w -= (q @ w) * q
        norm = np.linalg.norm(w)
        if norm > rtol * scale:
            basis.append(w / norm)
    return np.array(basis).reshape(len(basis), V.shape[1])


def explicit_distance(fmap: ExplicitMap, samples, x, p: int | None = None,
                      centered: bool = False) -> float:
    """Euclidean distance from ``phi(x)`` to the span of ``phi(samples)``.

    With ``p`` smaller than the rank, the subspace is that of the top ``p``
    left singular vectors of the mapped samples. ``centered`` subtracts the
    mean of the mapped samples from everything first (affine subspace).
    """
    Phi = fmap(samples)
    y = fmap(np.reshape(np.asarray(x, dtype=float), (1, -1)))[0]
    if centered:
        mean = Phi.mean(axis=0)
        Phi = Phi - mean
        y = y - mean
    basis = gram_schmidt(Phi)
    if p is not None and p < basis.shape[0]:
        U, _, _ = np.linalg.svd(Phi.T, full_matrices=False)
        basis = U[:, :p].T
    r = y - basis.T @ (basis @ y)
    return float(np.linalg.norm(r))


def pod_objective(a, w) -> np.ndarray:
    """``sum_i <w, a[:, i]>^2`` for each column of ``w`` (or for one vector)."""
    a = np.asarray(a, dtype=float)
    return np.sum((np.asarray(w, dtype=float).T @ a) ** 2, axis=-1)


def brute_force_pod_max(a, trials: int = 100_000, seed: int = 0, chunk: int = 20_000) -> float:
    """Largest POD objective found over ``trials`` random unit vectors.

    ``a`` is the ``m x n`` data matrix whose columns are the snapshots; the
    vectors are drawn uniformly on the unit sphere of ``R^m``.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    rng = np.random.default_rng(seed)
    best = -np.inf
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        W = rng.standard_normal((a.shape[0], k))
        W /= np.linalg.norm(W, axis=0)
        best = max(best, float(pod_objective(a, W).max()))
        done += k
    return best
