"""Minimum-distance-to-subspace classifier.

Each class (or, for oversized classes, each of its subsets) gets its own POD
subspace in feature space; a query is assigned to the class owning the
nearest subspace. Subspaces are fitted independently, so classes can be
added or removed without touching the others.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

from . import subspace
from .data import sort_labels
from .eig import TruncationPolicy
from .errors import InputError
from .kernel import KernelSpec, as_rows
from .subspace import SubspaceModel

__all__ = [
    "TrainConfig",
    "Classifier",
    "Prediction",
    "Metrics",
    "split_class",
    "train",
    "predict",
    "add_class",
    "remove_class",
    "evaluate",
]


@dataclass(frozen=True)
class TrainConfig:
    kernel: KernelSpec = field(default_factory=KernelSpec)
    policy: TruncationPolicy = field(default_factory=TruncationPolicy)
    centered: bool = False
    balance: bool = False
    balance_factor: float = 2.0
    seed: int = 0  # reserved: splitting is deterministic

    def __post_init__(self):
        if not self.balance_factor >= 2:
            raise InputError(f"balance_factor must be >= 2, got {self.balance_factor}")

    def to_dict(self):
        return {
            "kernel": self.kernel.to_dict(),
            "policy": self.policy.to_dict(),
            "centered": self.centered,
            "balance": self.balance,
            "balance_factor": self.balance_factor,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(KernelSpec.from_dict(d["kernel"]), TruncationPolicy.from_dict(d["policy"]),
                   bool(d["centered"]), bool(d["balance"]), float(d["balance_factor"]),
                   int(d["seed"]))


@dataclass(frozen=True)
class Prediction:
    label: Any
    distances: np.ndarray
    class_distances: np.ndarray


@dataclass(frozen=True)
class Metrics:
    labels: list
    accuracy: float
    recall: dict
    confusion: np.ndarray  # [true, predicted] in label order
    n: int

    def to_dict(self):
        return {
            "labels": list(self.labels),
            "accuracy": self.accuracy,
            "n": self.n,
            "recall": [self.recall[l] for l in self.labels],
            "confusion": self.confusion.tolist(),
        }


def split_class(samples, reference: int, balance_factor: float = 2.0) -> list:
    """Split an oversized class into round-robin subsets near ``reference`` size.

    A class of ``n >= balance_factor * reference`` samples becomes
    ``q = round(n / reference)`` subsets (round half to even); subset ``k``
    takes samples ``k, k + q, k + 2q, ...``. Smaller classes stay whole.
    """
    X = as_rows(samples) if not isinstance(samples, np.ndarray) else np.atleast_2d(samples)
    n = X.shape[0]
    if n == 0:
        raise InputError("cannot split an empty class")
    if reference < 1:
        raise InputError(f"reference size must be >= 1, got {reference}")
    if n < balance_factor * reference:
        return [X]
    q = round(n / reference)
    return [X[k::q] for k in range(q)]


def _label_key(label):
    return label.item() if isinstance(label, np.generic) else label


class Classifier:
    """Trained collection of class subspaces.

    Instances are not mutated by the library; :meth:`add_class` and :meth:`remove_class`
    return new classifiers that share the untouched :class:`SubspaceModel`
    objects.
    """

    def __init__(self, config: TrainConfig, subspaces: Sequence[SubspaceModel],
                 reference_size: int, scaling=None):
        self.config = config
        # feature scaling fitted on the training data; callers apply it to queries
        self.scaling = scaling
        self.subspaces = tuple(sorted(
            subspaces, key=lambda m: ((isinstance(m.class_label, str), m.class_label), m.subset_index)))
        self.labels = tuple(sort_labels(m.class_label for m in self.subspaces))
        self.reference_size = int(reference_size)
        index = {l: i for i, l in enumerate(self.labels)}
        self._owner = np.array([index[m.class_label] for m in self.subspaces], dtype=int)

    def __repr__(self):
        return (f"Classifier(labels={list(self.labels)}, subspaces={len(self.subspaces)}, "
                f"kernel={self.config.kernel})")

    @property
    def n_features(self) -> int:
        return self.subspaces[0].samples.shape[1]

    def subspace_distances(self, X) -> np.ndarray:
        """Distances of every query row to every subspace, shape ``(m, n_subspaces)``."""
        X = as_rows(X)
        return np.column_stack([m.distance(X) for m in self.subspaces])

    def class_distances(self, X, subspace_dist=None) -> np.ndarray:
        """Per-class minimum over each class's subspaces, shape ``(m, n_labels)``."""
        D = self.subspace_distances(X) if subspace_dist is None else subspace_dist
        out = np.full((D.shape[0], len(self.labels)), np.inf)
        for j, owner in enumerate(self._owner):
            np.minimum(out[:, owner], D[:, j], out=out[:, owner])
        return out

    def predict(self, X) -> np.ndarray:
        """Predicted labels for the rows of ``X``."""
        C = self.class_distances(X)
        # argmin returns the first minimum: ties go to the earlier label
        return np.asarray(self.labels, dtype=object if any(isinstance(l, str) for l in self.labels)
                          else None)[np.argmin(C, axis=1)]

    def predict_one(self, x) -> Prediction:
        D = self.subspace_distances(np.reshape(as_rows([x]), (1, -1)))
        C = self.class_distances(None, subspace_dist=D)
        return Prediction(self.labels[int(np.argmin(C[0]))], D[0], C[0])

    def evaluate(self, X, y) -> Metrics:
        return evaluate(self, X, y)

    def add_class(self, label, samples) -> "Classifier":
        return add_class(self, label, samples)

    def remove_class(self, label) -> "Classifier":
        return remove_class(self, label)


def _fit_class(config, label, X, reference, method):
    parts = split_class(X, reference, config.balance_factor) if config.balance else [X]
    return [
        subspace.fit(config.kernel, part, config.policy, config.centered, label, k, method)
        for k, part in enumerate(parts)
    ]


def train(X, y, config: TrainConfig = TrainConfig(), n_jobs: int = 1,
          method: str = "auto") -> Classifier:
    """Fit one subspace per class (or per subset of an oversized class).

    The reference size for splitting is the smallest class size. Classes are
    fitted independently; ``n_jobs > 1`` fits them on a thread pool with the
    same result as sequential fitting.
    """
    X = as_rows(X)
    y = np.asarray(y)
    if X.shape[0] != y.shape[0]:
        raise InputError(f"{X.shape[0]} samples but {y.shape[0]} labels")
    rows = {}
    for i, v in enumerate(y):
        rows.setdefault(_label_key(v), []).append(i)
    labels = sort_labels(rows)
    if len(labels) < 2:
        raise InputError("training needs at least two distinct class labels")
    groups = {l: X[rows[l]] for l in labels}
    reference = min(g.shape[0] for g in groups.values())

    jobs = [(config, l, groups[l], reference, method) for l in labels]
    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            fitted = list(pool.map(lambda a: _fit_class(*a), jobs))
    else:
        fitted = [_fit_class(*a) for a in jobs]
    return Classifier(config, [m for ms in fitted for m in ms], reference)


def predict(c: Classifier, x) -> Prediction:
    return c.predict_one(x)


def add_class(c: Classifier, label, samples, method: str = "auto") -> Classifier:
    """New classifier with one more class; existing subspaces are reused as is.

    The new class is split against ``min(c.reference_size, len(samples))``;
    existing classes are not re-split even if that reference shrinks.
    """
    label = _label_key(label)
    if label in c.labels:
        raise InputError(f"class {label!r} already present")
    X = as_rows(samples)
    if X.shape[0] == 0:
        raise InputError(f"class {label!r} has no samples")
    reference = min(c.reference_size, X.shape[0])
    new = _fit_class(c.config, label, X, reference, method)
    return Classifier(c.config, list(c.subspaces) + new, reference, c.scaling)


def remove_class(c: Classifier, label) -> Classifier:
    label = _label_key(label)
    if label not in c.labels:
        raise InputError(f"unknown class {label!r}")
    if len(c.labels) - 1 < 2:
        raise InputError("removing this class would leave fewer than two classes")
    kept = [m for m in c.subspaces if m.class_label != label]
    return Classifier(c.config, kept, c.reference_size, c.scaling)


def evaluate(c: Classifier, X, y) -> Metrics:
    y = [_label_key(v) for v in np.asarray(y)]
    if not y:
        raise InputError("empty test set")
    unknown = sorted(set(y) - set(c.labels), key=lambda l: (isinstance(l, str), l))
    if unknown:
        raise InputError(f"test labels not seen in training: {unknown}")
    pred = [_label_key(v) for v in c.predict(X)]
    index = {l: i for i, l in enumerate(c.labels)}
    k = len(c.labels)
    confusion = np.zeros((k, k), dtype=int)
    for t, p in zip(y, pred):
        confusion[index[t], index[p]] += 1
    support = confusion.sum(axis=1)
    recall = {l: (float(confusion[i, i] / support[i]) if support[i] else math.nan)
              for i, l in enumerate(c.labels)}
    return Metrics(list(c.labels), float(np.trace(confusion) / len(y)), recall, confusion, len(y))
