"""Hyperparameter search by k-fold cross-validation.

For each kernel width and fold the class subspaces are fitted once with every
mode above the rank floor; each energy threshold then only selects a prefix of
those modes, so the eigendecompositions are shared across thresholds.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial.distance import pdist

from .classifier import TrainConfig, train
from .data import sort_labels
from .eig import EigenDecomposition, TruncationPolicy, truncate
from .kernel import KernelSpec, as_rows
from .subspace import residual_distance

__all__ = ["SearchResult", "stratified_folds", "sigma_grid", "grid_search"]


@dataclass(frozen=True)
class SearchResult:
    sigma: float
    energy: float
    accuracy: float
    table: list  # (sigma, energy, cv accuracy) for every setting tried

    def to_dict(self):
        return {"sigma": self.sigma, "energy": self.energy, "cv_accuracy": self.accuracy,
                "table": [{"sigma": s, "energy": e, "cv_accuracy": a} for s, e, a in self.table]}


def stratified_folds(y, k: int = 5, seed: int = 0) -> np.ndarray:
    """Fold index per sample; each class is shuffled and dealt out round-robin."""
    y = np.asarray(y)
    rng = np.random.default_rng(seed)
    folds = np.empty(len(y), dtype=int)
    for label in sort_labels(y):
        idx = np.flatnonzero(y == label)
        idx = idx[rng.permutation(idx.size)]
        folds[idx] = np.arange(idx.size) % k
    return folds


def sigma_grid(X, exponents, base="sqrtd") -> list[float]:
    """``2**k * base`` for each exponent.

    ``base`` is a number, ``"sqrtd"`` (square root of the feature count) or
    ``"median"`` (median pairwise Euclidean distance of the rows of ``X``).
    """
    X = as_rows(X)
    if base == "sqrtd":
        b = math.sqrt(X.shape[1])
    elif base == "median":
        rows = X if X.shape[0] <= 2000 else X[np.linspace(0, X.shape[0] - 1, 2000).astype(int)]
        b = float(np.median(pdist(rows)))
    else:
        b = float(base)
    return [float(2.0**k * b) for k in exponents]


def _fold_accuracies(config, X, y, train_mask, energies):
    full = replace(config, policy=TruncationPolicy(1.0, config.policy.rank_floor_ratio))
    model = train(X[train_mask], y[train_mask], full)
    Xv, yv = X[~train_mask], y[~train_mask]
    labels = list(model.labels)
    owners = [labels.index(m.class_label) for m in model.subspaces]
    projections = []
    for m in model.subspaces:
        norm2, alpha, scale = m.project_terms(Xv)
        projections.append((norm2, np.cumsum(alpha * alpha, axis=0), scale, m.eigenvalues))
    accs = []
    for e in energies:
        policy = TruncationPolicy(e, config.policy.rank_floor_ratio)
        C = np.full((Xv.shape[0], len(labels)), np.inf)
        for owner, (norm2, cum, scale, lam) in zip(owners, projections):
            p = truncate(EigenDecomposition(lam, None), policy)
            d = residual_distance(norm2, cum[p - 1], scale)
            C[:, owner] = np.minimum(C[:, owner], d)
        pred = np.asarray(labels)[np.argmin(C, axis=1)]
        accs.append(float(np.mean(pred == yv)))
    return accs


def grid_search(X, y, sigmas, energies=(0.999,), config: TrainConfig = TrainConfig(),
                k: int = 5, seed: int = 0) -> SearchResult:
    """Cross-validated accuracy of every (sigma, energy) pair with an rbf kernel.

    The best setting maximises mean fold accuracy; ties go to the earlier
    sigma, then the earlier energy, in the order given.
    """
    X = as_rows(X)
    y = np.asarray(y)
    folds = stratified_folds(y, k, seed)
    table = []
    for sigma in sigmas:
        cfg = replace(config, kernel=KernelSpec("rbf", sigma=float(sigma)))
        per_fold = [_fold_accuracies(cfg, X, y, folds != f, energies) for f in range(k)]
        for j, e in enumerate(energies):
            table.append((float(sigma), float(e), float(np.mean([a[j] for a in per_fold]))))
    best = max(table, key=lambda row: row[2])  # max keeps the first of equal rows
    return SearchResult(best[0], best[1], best[2], table)
