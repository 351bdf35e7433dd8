"""Choosing the RBF width and energy threshold by cross-validation.

The search fits each fold once with all modes and then evaluates every energy
threshold from the same eigendecomposition.
"""
from kpod import TrainConfig, gen2d, train
from kpod.eig import TruncationPolicy
from kpod.kernel import KernelSpec
from kpod.search import grid_search, sigma_grid

X, y = gen2d("spiral", 150, noise=0.05, seed=11)
Xt, yt = gen2d("spiral", 150, noise=0.05, seed=12)

sigmas = sigma_grid(X, range(-4, 3))  # 2^k * sqrt(2)
result = grid_search(X, y, sigmas, energies=(0.99, 0.999, 1.0), k=5, seed=0)

print(" sigma    energy  cv accuracy")
for s, e, acc in result.table:
    mark = "  <- best" if (s, e) == (result.sigma, result.energy) else ""
    print(f"{s:7.4f}  {e:6.3f}  {acc:.4f}{mark}")

best = train(X, y, TrainConfig(KernelSpec("rbf", sigma=result.sigma),
                               TruncationPolicy(result.energy)))
print(f"\ntest accuracy at the chosen setting: {best.evaluate(Xt, yt).accuracy:.4f}")
