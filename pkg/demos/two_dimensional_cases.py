"""Three synthetic 2D problems classified with one RBF width.

Each class gets its own subspace in feature space; a point goes to the class
whose subspace is closest. Run from the repository root:

    python3 demos/two_dimensional_cases.py
"""
import numpy as np

from kpod import KernelSpec, TrainConfig, TruncationPolicy, gen2d, train

SIGMA = 1.2

# keep every mode: the distance is then exactly the residual of the
# projection onto the span of each class's mapped samples
config = TrainConfig(KernelSpec("rbf", sigma=SIGMA), TruncationPolicy(1.0))


def ascii_map(model, lim=2.5, cols=60, rows=24):
    xs = np.linspace(-lim, lim, cols)
    ys = np.linspace(lim, -lim, rows)
    gx, gy = np.meshgrid(xs, ys)
    labels = model.predict(np.column_stack([gx.ravel(), gy.ravel()])).reshape(rows, cols)
    return "\n".join("".join(".#"[v] for v in row) for row in labels)


for case in ("connected", "nonconnected", "spiral"):
    X, y = gen2d(case, n_per_class=200, seed=1)
    Xt, yt = gen2d(case, n_per_class=200, seed=2)  # same distribution, fresh draw
    model = train(X, y, config)

    modes = [m.n_modes for m in model.subspaces]
    print(f"== {case}: modes per class {modes}")
    print(f"train accuracy {model.evaluate(X, y).accuracy:.4f}, "
          f"test accuracy {model.evaluate(Xt, yt).accuracy:.4f}")
    lim = 3.6 if case == "nonconnected" else 2.0
    print(ascii_map(model, lim=lim))
    print()

# The same decision map as CSV, for plotting elsewhere:
#   kpod gen2d --case spiral --out spiral.txt
#   kpod train --train spiral.txt --model spiral.json --sigma 1.2 --energy 1.0
#   kpod grid --model spiral.json --out spiral_map.csv --xmin -2 --xmax 2 --ymin -2 --ymax 2
