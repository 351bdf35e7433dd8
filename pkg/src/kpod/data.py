"""Dataset ingestion, feature scaling and synthetic 2D generators.

LIBSVM text format, one sample per line::

    <label> <index>:<value> <index>:<value> ... [# comment]

Indices are 1-based and strictly increasing; absent indices are zero.
"""
from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np

from .errors import InputError, ParseError

__all__ = [
    "Sample",
    "parse_label",
    "parse_libsvm",
    "read_libsvm",
    "format_libsvm",
    "write_libsvm",
    "to_arrays",
    "from_arrays",
    "ScalingParams",
    "fit_scaling",
    "apply_scaling",
    "SplitMix64",
    "GEN2D_CASES",
    "gen2d",
    "sort_labels",
]


@dataclass
class Sample:
    label: object
    features: dict = field(default_factory=dict)


def parse_label(tok: str):
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        val = float(tok)
    except ValueError:
        return tok
    return val if math.isfinite(val) else tok


def parse_libsvm(stream) -> list[Sample]:
    """Parse LIBSVM text from a string or an iterable of lines."""
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    samples = []
    for lineno, line in enumerate(stream, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        features = {}
        last = 0
        for tok in tokens[1:]:
            idx, sep, val = tok.partition(":")
            if not sep or not idx or not val:
                raise ParseError(f"malformed feature {tok!r}", lineno)
            try:
                idx = int(idx)
            except ValueError:
                raise ParseError(f"non-integer index in {tok!r}", lineno) from None
            try:
                val = float(val)
            except ValueError:
                raise ParseError(f"non-numeric value in {tok!r}", lineno) from None
            if not math.isfinite(val):
                raise ParseError(f"non-finite value in {tok!r}", lineno)
            if idx < 1:
                raise ParseError(f"index must be >= 1 in {tok!r}", lineno)
            if idx == last:
                raise ParseError(f"duplicate index {idx}", lineno)
            if idx < last:
                raise ParseError(f"index {idx} follows {last}; indices must increase", lineno)
            features[idx] = val
            last = idx
        samples.append(Sample(parse_label(tokens[0]), features))
    return samples


def read_libsvm(path) -> list[Sample]:
    with open(path) as fh:
        return parse_libsvm(fh)


def _format_label(label):
    if isinstance(label, float) and label.is_integer():
        return repr(label)
    return str(label)


def format_libsvm(samples: Iterable[Sample]) -> str:
    """Canonical text: sorted indices, shortest round-tripping float repr."""
    lines = []
    for s in samples:
        parts = [_format_label(s.label)]
        parts += [f"{i}:{float(v)!r}" for i, v in sorted(s.features.items())]
        lines.append(" ".join(parts))
    return "".join(line + "\n" for line in lines)


def write_libsvm(samples: Iterable[Sample], stream: TextIO | str) -> None:
    text = format_libsvm(samples)
    if isinstance(stream, str):
        with open(stream, "w") as fh:
            fh.write(text)
    else:
        stream.write(text)


def to_arrays(samples: list[Sample], n_features: int | None = None):
    """Dense ``(n, d)`` feature matrix and label array.

    ``d`` is the largest index seen (or ``n_features`` if larger).
    """
    width = max((max(s.features) for s in samples if s.features), default=0)
    if n_features is not None:
        width = max(width, n_features)
    X = np.zeros((len(samples), width))
    for r, s in enumerate(samples):
        for i, v in s.features.items():
            X[r, i - 1] = v
    labels = [s.label for s in samples]
    y = np.array(labels, dtype=object if any(isinstance(l, str) for l in labels) else None)
    return X, y


def from_arrays(X, y) -> list[Sample]:
    """Inverse of :func:`to_arrays`; zero features are dropped."""
    X = np.asarray(X, dtype=float)
    out = []
    for row, label in zip(X, y):
        nz = np.flatnonzero(row)
        label = label.item() if isinstance(label, np.generic) else label
        out.append(Sample(label, {int(i) + 1: float(row[i]) for i in nz}))
    return out


def sort_labels(labels) -> list:
    """Distinct labels in ascending order; numbers sort before strings."""
    uniq = set(l.item() if isinstance(l, np.generic) else l for l in labels)
    return sorted(uniq, key=lambda l: (isinstance(l, str), l))


# Feature scaling ============================================================
@dataclass(frozen=True)
class ScalingParams:
    mode: str
    lo: np.ndarray
    hi: np.ndarray

    def to_dict(self):
        return {"mode": self.mode, "min": self.lo.tolist(), "max": self.hi.tolist()}

    @classmethod
    def from_dict(cls, d):
        return cls(d["mode"], np.asarray(d["min"], dtype=float), np.asarray(d["max"], dtype=float))


def fit_scaling(X, mode: str = "minmax01") -> ScalingParams:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if mode not in ("minmax01", "none"):
        raise InputError(f"unknown scaling mode {mode!r}")
    if X.shape[0] == 0:
        raise InputError("cannot fit scaling on an empty training set")
    return ScalingParams(mode, X.min(axis=0), X.max(axis=0))


def apply_scaling(params: ScalingParams, X) -> np.ndarray:
    """Affine map of every feature onto [0, 1] by its training range.

    Values outside the training range extrapolate linearly; constant features
    map to 0. Columns beyond the training width pass through unchanged.
    """
    X = np.array(np.atleast_2d(X), dtype=float)
    if params.mode == "none":
        return X
    d = min(X.shape[1], params.lo.size)
    lo, span = params.lo[:d], (params.hi - params.lo)[:d]
    const = span == 0.0
    cols = X[:, :d]
    X[:, :d] = np.where(const, 0.0, (cols - lo) / np.where(const, 1.0, span))
    return X


# Synthetic 2D data ==========================================================
class SplitMix64:
    """SplitMix64 pseudo-random generator.

    state += 0x9E3779B97F4A7C15; z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    return z ^ (z >> 31)                       (all arithmetic mod 2**64)

    ``uniform()`` takes the top 53 bits as a float in [0, 1); ``normal()`` uses
    the Box-Muller cosine branch with ``u1 = 1 - uniform()`` so the log never
    sees zero. Each normal draw consumes exactly two uniforms.
    """

    _MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = int(seed) & self._MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self._MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self._MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self._MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53

    def normal(self) -> float:
        u1 = 1.0 - self.uniform()
        u2 = self.uniform()
        return math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2)


GEN2D_CASES = ("connected", "nonconnected", "spiral")

_BLOB_SD = 0.6
_SPIRAL_T_MAX = 3.0 * math.pi


def _blob(rng, center, sd, rivals):
    # rejection sampling: keep the draw only inside its center's Voronoi cell
    while True:
        x, y = center[0] + sd * rng.normal(), center[1] + sd * rng.normal()
        d2 = (x - center[0]) ** 2 + (y - center[1]) ** 2
        if all(d2 < (x - cx) ** 2 + (y - cy) ** 2 for cx, cy in rivals):
            return x, y


def gen2d(case: str, n_per_class: int = 200, noise: float = 0.02, seed: int = 0):
    """Seeded two-class 2D point sets.

    connected
        Blobs of standard deviation 0.6 centered at (-1, 0) (label 0) and
        (1, 0) (label 1).
    nonconnected
        Label 0 is one blob at (0, 0); label 1 is split between blobs at
        (-2.5, 0) and (2.5, 0), alternating.

    Blob draws are rejected until they fall closer to their own center than
    to any center of the other class, so the classes are separable before
    noise is added.
    spiral
        Two Archimedean arms ``r = 0.4 + 0.12 t``, ``theta = t + k pi`` with
        ``k`` the label and ``t`` uniform on ``[0, 3 pi]``.

    Every point also gets isotropic Gaussian noise of standard deviation
    ``noise``. Points are emitted class by class.

    Returns
    -------
    X : (2 * n_per_class, 2) ndarray
    y : (2 * n_per_class,) int ndarray
    """
    if case not in GEN2D_CASES:
        raise InputError(f"unknown 2D case {case!r}; expected one of {GEN2D_CASES}")
    if n_per_class < 1:
        raise InputError("n_per_class must be >= 1")
    if noise < 0:
        raise InputError("noise must be non-negative")
    rng = SplitMix64(seed)
    pts, labels = [], []
    for label in (0, 1):
        for i in range(n_per_class):
            if case == "connected":
                cx = -1.0 if label == 0 else 1.0
                x, y = _blob(rng, (cx, 0.0), _BLOB_SD, [(-cx, 0.0)])
            elif case == "nonconnected":
                cx = 0.0 if label == 0 else (-2.5 if i % 2 == 0 else 2.5)
                rivals = [(0.0, 0.0)] if label == 1 else [(-2.5, 0.0), (2.5, 0.0)]
                x, y = _blob(rng, (cx, 0.0), _BLOB_SD, rivals)
            else:
                t = _SPIRAL_T_MAX * rng.uniform()
                r = 0.4 + 0.12 * t
                theta = t + label * math.pi
                x, y = r * math.cos(theta), r * math.sin(theta)
            if noise > 0:
                x += noise * rng.normal()
                y += noise * rng.normal()
            pts.append((x, y))
            labels.append(label)
    return np.array(pts), np.array(labels)
