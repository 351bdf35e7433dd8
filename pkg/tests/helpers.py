"""Shared instance generators for the oracle and acceptance tests."""
import numpy as np

from kpod import subspace
from kpod.eig import TruncationPolicy
from kpod.errors import DegenerateClassError
from kpod.kernel import KernelSpec
from kpod.oracle import ExplicitMap, explicit_distance


def explicit_dim(spec, d, centered=False):
    """Dimension of the space spanned by the explicit feature map.

    Centering removes the constant coordinate that ``coef0 > 0`` adds.
    """
    const = int(spec.family == "polynomial" and spec.coef0 > 0 and not centered)
    if spec.family == "linear":
        return d
    if spec.degree == 1:
        return d + const
    if spec.coef0 > 0:
        return (d + 1) * (d + 2) // 2 - 1 + const
    return d * (d + 1) // 2


def random_spec(rng):
    kind = rng.integers(4)
    if kind == 0:
        return KernelSpec("linear")
    if kind == 1:
        return KernelSpec("polynomial", degree=2, coef0=0.0)
    if kind == 2:
        return KernelSpec("polynomial", degree=2, coef0=float(rng.uniform(0.1, 2.0)))
    return KernelSpec("polynomial", degree=1, coef0=float(rng.uniform(0.1, 2.0)))


def oracle_case(seed):
    """One randomized kernel-trick vs explicit-space comparison.

    Returns ``None`` for degenerate draws (a centered class with no spread),
    otherwise a dict with both distances and whether the query can lie in
    the retained subspace (``p`` equal to the explicit dimension).
    """
    rng = np.random.default_rng(seed)
    spec = random_spec(rng)
    d = int(rng.integers(1, 4))
    n = int(rng.integers(1, 11))
    X = rng.normal(size=(n, d))
    x = rng.normal(size=d)
    centered = bool(rng.random() < 0.3)
    energy = 1.0 if rng.random() < 0.5 else float(rng.uniform(0.5, 1.0))
    try:
        m = subspace.fit(spec, X, TruncationPolicy(energy), centered)
    except DegenerateClassError:
        return None
    got = m.distance(x)
    want = explicit_distance(ExplicitMap(spec), X, x, p=m.n_modes, centered=centered)
    return {"spec": spec, "n": n, "d": d, "p": m.n_modes, "centered": centered,
            "energy": energy, "kernel": got, "explicit": want,
            "in_span": m.n_modes >= explicit_dim(spec, d, centered)}
