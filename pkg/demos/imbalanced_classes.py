"""Splitting an oversized class into subsets near the smallest class size.

With ``balance=True`` a class at least ``balance_factor`` times the smallest
one is dealt round-robin into ``round(n / reference)`` subsets, each with its
own subspace; the class distance is the minimum over its subsets.
"""
import numpy as np

from kpod import KernelSpec, TrainConfig, TruncationPolicy, split_class, train

# the rule on its own
for n, ref in [(20, 10), (25, 10), (27, 11), (100, 10)]:
    parts = split_class(np.zeros((n, 1)), ref)
    print(f"{n} samples, reference {ref}: subsets of {[len(p) for p in parts]}")

rng = np.random.default_rng(3)
big = rng.uniform(0, 40, size=(100, 2))
small = rng.uniform(60, 70, size=(10, 2))
X = np.vstack([big, small])
y = np.array([0] * 100 + [1] * 10)

for balance in (False, True):
    cfg = TrainConfig(KernelSpec("rbf", sigma=1.2), TruncationPolicy(1.0), balance=balance)
    model = train(X, y, cfg)
    layout = [(m.class_label, m.subset_index, m.n_samples) for m in model.subspaces]
    print(f"\nbalance={balance}: {len(model.subspaces)} subspaces")
    print(layout)
    d = model.class_distances(big)[:, 0]
    print(f"largest distance of a class-0 training sample to its class: {d.max():.2e}")
