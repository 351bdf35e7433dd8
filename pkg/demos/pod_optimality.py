"""The leading eigenvector of the snapshot Gram matrix gives the best direction.

For snapshots a_1..a_n (columns of A), the unit vector w maximising
sum_i <w, a_i>^2 is the leading POD mode, and the maximum is the largest
eigenvalue of A^T A. Random search never beats it.
"""
import numpy as np

from kpod.eig import sym_eigen
from kpod.oracle import brute_force_pod_max, pod_objective

rng = np.random.default_rng(5)
A = rng.normal(size=(3, 8))

d = sym_eigen(A.T @ A)
lam1 = d.values[0]
w = A @ d.vectors[:, 0] / np.sqrt(lam1)  # mode built from the Gram eigenvector

print(f"lambda_1                 {lam1:.12f}")
print(f"objective at the mode    {float(pod_objective(A, w)):.12f}")
for trials in (100, 10_000, 100_000):
    print(f"best of {trials:>6} random   {brute_force_pod_max(A, trials=trials):.12f}")
