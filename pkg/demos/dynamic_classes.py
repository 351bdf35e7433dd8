"""Adding and removing classes without retraining the others.

Subspaces are fitted per class, so a new class costs one more fit and the
existing subspaces are reused as they are.
"""
import numpy as np

from kpod import KernelSpec, TrainConfig, add_class, remove_class, train
from kpod.serialize import dumps

rng = np.random.default_rng(0)
centers = {"north": (0.0, 2.0), "east": (2.0, 0.0), "west": (-2.0, 0.0)}
data = {name: rng.normal(c, 0.5, size=(60, 2)) for name, c in centers.items()}

config = TrainConfig(KernelSpec("rbf", sigma=1.0))

# two classes first
X = np.vstack([data["east"], data["west"]])
y = ["east"] * 60 + ["west"] * 60
two = train(X, y, config)
print(two)

# then a third one; only its subspace is computed
three = add_class(two, "north", data["north"])
print(three)
east, north, west = three.subspaces  # sorted by label
print("reused:", east is two.subspaces[0] and west is two.subspaces[1])

# same answers as training on all three at once
X_all = np.vstack([data["east"], data["north"], data["west"]])
y_all = ["east"] * 60 + ["north"] * 60 + ["west"] * 60
batch = train(X_all, y_all, config)
probe = rng.uniform(-4, 4, size=(1000, 2))
print("identical predictions:", np.array_equal(three.predict(probe), batch.predict(probe)))

# in the saved model, the untouched records keep their bytes
before = dumps(two).splitlines()[1:-1]
after = dumps(three).splitlines()[1:-1]
print("east/west records unchanged:",
      [b.rstrip(",") for b in before] == [after[0].rstrip(","), after[2].rstrip(",")])

# and removal gives back the original model
back = remove_class(three, "north")
print("round trip:", dumps(back) == dumps(two))
