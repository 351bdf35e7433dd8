"""Symmetric eigendecomposition and spectrum truncation.

The POD basis of a sample set is given by the leading eigenvectors of its
correlation (Gram) matrix; :func:`sym_eigen` computes the full spectrum with
a cyclic Jacobi method and :func:`truncate` picks how many leading modes to
keep.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np
import scipy.linalg

from .errors import DegenerateClassError, InputError, NumericalError

__all__ = [
    "EigenDecomposition",
    "TruncationPolicy",
    "JACOBI_MAX_N",
    "jacobi_eigh",
    "sym_eigen",
    "truncate",
]

#: Largest matrix handled by Jacobi under ``method="auto"``; above it LAPACK is used.
JACOBI_MAX_N = 256

_SYMMETRY_RTOL = 1e-12
_NEGATIVE_RTOL = 1e-8


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in non-increasing order; ``vectors[:, i]`` pairs with ``values[i]``."""

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True)
class TruncationPolicy:
    energy_threshold: float = 0.999
    rank_floor_ratio: float = 1e-8

    def __post_init__(self):
        if not 0.0 < self.energy_threshold <= 1.0:
            raise InputError(f"energy threshold must lie in (0, 1], got {self.energy_threshold}")
        if not 0.0 <= self.rank_floor_ratio < 1.0:
            raise InputError(f"rank floor ratio must lie in [0, 1), got {self.rank_floor_ratio}")

    def to_dict(self):
        return {"energy_threshold": self.energy_threshold,
                "rank_floor_ratio": self.rank_floor_ratio}

    @classmethod
    def from_dict(cls, d):
        return cls(float(d["energy_threshold"]), float(d["rank_floor_ratio"]))


@numba.njit(cache=True)
def _jacobi_sweeps(A, tol, max_sweeps):
    # A is symmetric and rotated in place; rows of Vt accumulate eigenvectors
    n = A.shape[0]
    Vt = np.eye(n)
    target = tol * np.sqrt((A * A).sum())
    polished = False
    for sweep in range(max_sweeps + 2):
        off = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                off += 2.0 * A[i, j] * A[i, j]
        if np.sqrt(off) <= target:
            # one more sweep: convergence is quadratic, so this takes the
            # remaining rotations down to rounding level
            if polished or off == 0.0:
                return np.diag(A).copy(), Vt.T.copy(), True
            polished = True
        elif sweep >= max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app = A[p, p]
                aqq = A[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # rows p, q of J^T A J off the 2x2 block; columns by symmetry
                for k in range(n):
                    apk = A[p, k]
                    aqk = A[q, k]
                    A[p, k] = c * apk - s * aqk
                    A[q, k] = s * apk + c * aqk
                for k in range(n):
                    A[k, p] = A[p, k]
                    A[k, q] = A[q, k]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = 0.0
                A[q, p] = 0.0
                for k in range(n):
                    vpk = Vt[p, k]
                    vqk = Vt[q, k]
                    Vt[p, k] = c * vpk - s * vqk
                    Vt[q, k] = s * vpk + c * vqk
    return np.diag(A).copy(), Vt.T.copy(), False


def jacobi_eigh(a, tol=1e-12, max_sweeps=50):
    """Cyclic Jacobi eigensolver for a real symmetric matrix.

    Each sweep visits every off-diagonal pair (p, q), p < q, in row order and
    annihilates it with a plane rotation.

    Parameters
    ----------
    a : (n, n) array_like
        Symmetric matrix.
    tol : float
        Converged once the off-diagonal Frobenius norm is at most
        ``tol * |a|_F``; one further sweep then polishes the result.
    max_sweeps : int
        Raise :class:`NumericalError` if not converged after this many sweeps.

    Returns
    -------
    values : (n,) ndarray
        Unsorted eigenvalues (the final diagonal).
    vectors : (n, n) ndarray
        Orthonormal eigenvectors as columns.
    """
    A = np.array(a, dtype=float, order="C")
    values, vectors, converged = _jacobi_sweeps(A, float(tol), int(max_sweeps))
    if not converged:
        raise NumericalError(f"Jacobi did not converge in {max_sweeps} sweeps")
    return values, vectors


def sym_eigen(a, method="auto") -> EigenDecomposition:
    """Full eigendecomposition of a symmetric positive semi-definite matrix.

    Eigenvalues come back sorted non-increasing. Small negative eigenvalues
    (down to ``-1e-8 * lambda_1``) are rounding noise and are clamped to 0;
    anything more negative means the input was not PSD and raises
    :class:`NumericalError`.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    :data:`JACOBI_MAX_N` rows).
    """
    A = np.asarray(a, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InputError(f"expected a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n == 0:
        raise InputError("empty matrix")
    if not np.all(np.isfinite(A)):
        raise InputError("matrix contains non-finite entries")
    scale = np.abs(A).max()
    if np.abs(A - A.T).max() > _SYMMETRY_RTOL * scale:
        raise InputError("matrix is not symmetric")

    if method == "auto":
        method = "jacobi" if n <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        values, vectors = jacobi_eigh(A)
    elif method == "lapack":
        values, vectors = scipy.linalg.eigh(A)
    else:
        raise InputError(f"unknown eigensolver {method!r}")

    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]

    # backward error of either solver is O(n eps |A|); below that a sign is noise
    noise = n * np.finfo(float).eps * scale
    floor = _NEGATIVE_RTOL * max(values[0], 0.0) + noise
    if values[-1] < -floor:
        raise NumericalError(
            f"matrix is not positive semi-definite (eigenvalue {values[-1]:.3e}, largest {values[0]:.3e})"
        )
    values = np.where(values < 0.0, 0.0, values)
    return EigenDecomposition(values, vectors)


def truncate(d: EigenDecomposition, policy: TruncationPolicy = TruncationPolicy()) -> int:
    """Number of leading modes to retain.

    Eigenvalues below ``rank_floor_ratio * lambda_1`` are dropped first; of the
    rest, keep the shortest prefix whose share of the (remaining) total reaches
    ``energy_threshold``.
    """
    values = np.asarray(d.values, dtype=float)
    if values.size == 0 or values[0] <= 0.0:
        raise DegenerateClassError("all eigenvalues are zero")
    kept = values[values >= policy.rank_floor_ratio * values[0]]
    kept = kept[kept > 0.0]
    cum = np.cumsum(kept) / kept.sum()
    # 1e-12 slack so that thresholds hit exactly by the partial sums are not missed
    return int(np.argmax(cum >= policy.energy_threshold - 1e-12)) + 1
