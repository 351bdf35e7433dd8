"""Kernel POD classification by minimum distance to class subspaces."""
from .classifier import (Classifier, Metrics, Prediction, TrainConfig, add_class, evaluate,
                         predict, remove_class, split_class, train)
from .data import gen2d, parse_libsvm, read_libsvm, write_libsvm
from .eig import TruncationPolicy, sym_eigen, truncate
from .errors import (DegenerateClassError, FormatVersionError, InputError, KpodError,
                     NumericalError, ParseError)
from .kernel import KernelSpec, eval_kernel, gram
from .serialize import load, save
from .subspace import SubspaceModel, coordinates, distance, fit

__version__ = "0.1.0"

__all__ = [
    "Classifier", "Metrics", "Prediction", "TrainConfig", "add_class", "evaluate", "predict",
    "remove_class", "split_class", "train", "gen2d", "parse_libsvm", "read_libsvm",
    "write_libsvm", "TruncationPolicy", "sym_eigen", "truncate", "DegenerateClassError",
    "FormatVersionError", "InputError", "KpodError", "NumericalError", "ParseError",
    "KernelSpec", "eval_kernel", "gram", "load", "save", "SubspaceModel", "coordinates",
    "distance", "fit",
]
