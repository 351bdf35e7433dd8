"""Command line front end.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical error.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from dataclasses import replace

import numpy as np

from . import serialize
from .classifier import TrainConfig, train
from .data import (GEN2D_CASES, parse_label, apply_scaling, fit_scaling, from_arrays, gen2d,
                   read_libsvm, to_arrays, write_libsvm)
from .eig import TruncationPolicy
from .errors import InputError, KpodError, NumericalError
from .kernel import KernelSpec
from .search import grid_search, sigma_grid

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _int_range(text):
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected KMIN:KMAX, got {text!r}") from None
    return list(range(lo, hi + 1))


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def _add_kernel_flags(p):
    g = p.add_argument_group("kernel")
    g.add_argument("--kernel", choices=["rbf", "linear", "poly"], default="rbf")
    g.add_argument("--sigma", type=float, default=1.0, help="rbf width (default 1.0)")
    g.add_argument("--gamma", type=float, help="LIBSVM-style rbf gamma; sets sigma = 1/sqrt(2 gamma)")
    g.add_argument("--degree", type=_positive_int, default=2)
    g.add_argument("--coef0", type=float, default=0.0)


def _add_train_flags(p):
    g = p.add_argument_group("training")
    g.add_argument("--energy", type=float, default=0.999, help="retained energy fraction (default 0.999)")
    g.add_argument("--rank-floor", type=float, default=TruncationPolicy().rank_floor_ratio)
    g.add_argument("--centered", action="store_true", help="center each class in feature space")
    g.add_argument("--balance", action="store_true", help="split oversized classes")
    g.add_argument("--balance-factor", type=float, default=2.0)
    g.add_argument("--scale", choices=["minmax01", "none"], default="none")
    g.add_argument("--seed", type=int, default=0)


class UsageError(InputError):
    """A flag value outside its allowed range."""


def _config(args, kernel=None):
    try:
        if kernel is None:
            if args.gamma is not None:
                if args.kernel != "rbf":
                    raise InputError("--gamma only applies to the rbf kernel")
                kernel = KernelSpec.rbf_from_gamma(args.gamma)
            else:
                kernel = KernelSpec(args.kernel, args.sigma, args.degree, args.coef0)
        for e in getattr(args, "energies", None) or []:
            TruncationPolicy(e, args.rank_floor)
        if getattr(args, "folds", 2) < 2:
            raise InputError("--folds must be at least 2")
        return TrainConfig(kernel, TruncationPolicy(args.energy, args.rank_floor),
                           args.centered, args.balance, args.balance_factor, args.seed)
    except InputError as exc:
        raise UsageError(str(exc)) from None


def _load_xy(path, n_features=None):
    samples = read_libsvm(path)
    if not samples:
        raise InputError(f"{path}: no samples")
    return to_arrays(samples, n_features)


def _prepare(model, X):
    if model.scaling is not None:
        X = apply_scaling(model.scaling, X)
    return X


def _emit(args, payload, lines):
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


def _label_text(label):
    return str(label)


# Commands ====================================================================
def cmd_train(args):
    config = _config(args)
    X, y = _load_xy(args.train)
    scaling = fit_scaling(X, args.scale)
    X = apply_scaling(scaling, X)
    t0 = time.perf_counter()
    model = train(X, y, config, n_jobs=args.jobs)
    if args.scale != "none":
        model.scaling = scaling
    elapsed = time.perf_counter() - t0
    serialize.save(model, args.model)
    sizes = {l: int(np.sum(y == l)) for l in model.labels}
    subspaces = [{"label": m.class_label, "subset": m.subset_index, "samples": m.n_samples,
                  "modes": m.n_modes} for m in model.subspaces]
    lines = [f"class {l}: {n} samples" for l, n in sizes.items()]
    lines.append(f"subspaces: {len(model.subspaces)}")
    lines += [f"subspace {s['label']}/{s['subset']}: {s['samples']} samples, {s['modes']} modes"
              for s in subspaces]
    lines.append(f"wall time: {elapsed:.3f} s")
    _emit(args, {"class_sizes": [[l, n] for l, n in sizes.items()], "subspaces": subspaces,
                 "wall_time": elapsed, "model": args.model}, lines)


def cmd_predict(args):
    model = serialize.load(args.model)
    X, _ = _load_xy(args.data, model.n_features)
    X = _prepare(model, X)
    D = model.subspace_distances(X)
    C = model.class_distances(None, subspace_dist=D)
    labels = np.asarray(model.labels, dtype=object)[np.argmin(C, axis=1)]
    with open(args.out, "w", newline="") as fh:
        if args.distances:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["label"] + [f"d_{l}" for l in model.labels])
            for lab, row in zip(labels, C):
                w.writerow([_label_text(lab)] + [repr(float(v)) for v in row])
        else:
            fh.writelines(f"{_label_text(l)}\n" for l in labels)
    _emit(args, {"predictions": len(labels), "out": args.out},
          [f"wrote {len(labels)} predictions to {args.out}"])


def _confusion_lines(metrics):
    names = [_label_text(l) for l in metrics.labels]
    first = max(len("true\\pred"), *map(len, names)) + 2
    width = max(*map(len, names), len(str(metrics.confusion.max()))) + 2
    head = "true\\pred".ljust(first) + "".join(n.rjust(width) for n in names)
    rows = [n.ljust(first) + "".join(str(v).rjust(width) for v in row)
            for n, row in zip(names, metrics.confusion)]
    return [head] + rows


def cmd_eval(args):
    model = serialize.load(args.model)
    X, y = _load_xy(args.data, model.n_features)
    metrics = model.evaluate(_prepare(model, X), y)
    payload = metrics.to_dict()
    lines = [f"accuracy: {metrics.accuracy:.4f} ({int(np.trace(metrics.confusion))}/{metrics.n})"]
    lines += [f"recall {l}: {metrics.recall[l]:.4f}" for l in metrics.labels]
    lines += _confusion_lines(metrics)
    if args.baseline:
        with open(args.baseline) as fh:
            base = [parse_label(line.split(",")[0].strip()) for line in fh if line.strip()]
        if base and base[0] == "label":
            base = base[1:]
        if len(base) != len(y):
            raise InputError(f"{args.baseline}: {len(base)} predictions for {len(y)} samples")
        acc = float(np.mean([b == t for b, t in zip(base, y.tolist())]))
        payload["baseline_accuracy"] = acc
        lines.append(f"baseline accuracy: {acc:.4f}")
    _emit(args, payload, lines)


def cmd_gen2d(args):
    X, y = gen2d(args.case, args.n, args.noise, args.seed)
    write_libsvm(from_arrays(X, y), args.out)
    _emit(args, {"samples": len(y), "out": args.out},
          [f"wrote {len(y)} samples ({args.case}) to {args.out}"])


def cmd_grid(args):
    if not (args.xmin < args.xmax and args.ymin < args.ymax):
        raise UsageError("grid bounds need xmin < xmax and ymin < ymax")
    model = serialize.load(args.model)
    if model.n_features != 2:
        raise InputError(f"decision maps need a 2-feature model, this one has {model.n_features}")
    xs = np.linspace(args.xmin, args.xmax, args.resolution)
    ys = np.linspace(args.ymin, args.ymax, args.resolution)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    C = model.class_distances(_prepare(model, pts))
    idx = np.argmin(C, axis=1)
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y", "predicted_label", "min_distance"])
        for (px, py), i, row in zip(pts, idx, C):
            w.writerow([repr(float(px)), repr(float(py)), _label_text(model.labels[i]),
                        repr(float(row[i]))])
    _emit(args, {"rows": len(pts), "out": args.out}, [f"wrote {len(pts)} grid points to {args.out}"])


def cmd_search(args):
    base_config = _config(args, KernelSpec("rbf"))
    X, y = _load_xy(args.train)
    scaling = fit_scaling(X, args.scale)
    X = apply_scaling(scaling, X)
    if args.sigmas:
        sigmas = args.sigmas
    else:
        base = args.sigma_base
        if base not in ("sqrtd", "median"):
            try:
                base = float(base)
            except ValueError:
                raise UsageError("--sigma-base must be a number, 'sqrtd' or 'median'") from None
        sigmas = sigma_grid(X, args.sigma_pow2, base)
    if not sigmas or not all(s > 0 for s in sigmas):
        raise UsageError(f"sigma values must be positive, got {sigmas}")
    t0 = time.perf_counter()
    result = grid_search(X, y, sigmas, args.energies, base_config,
                         k=args.folds, seed=args.seed)
    payload = result.to_dict()
    lines = [f"sigma={s:.6g} energy={e:g} cv_accuracy={a:.4f}" for s, e, a in result.table]
    lines.append(f"best: sigma={result.sigma:.6g} energy={result.energy:g} "
                 f"cv_accuracy={result.accuracy:.4f}")
    if args.model or args.test:
        cfg = replace(base_config, kernel=KernelSpec("rbf", sigma=result.sigma),
                      policy=TruncationPolicy(result.energy, args.rank_floor))
        model = train(X, y, cfg)
        if args.scale != "none":
            model.scaling = scaling
        if args.model:
            serialize.save(model, args.model)
            payload["model"] = args.model
        if args.test:
            Xt, yt = _load_xy(args.test, model.n_features)
            metrics = model.evaluate(_prepare(model, Xt), yt)
            payload["test_accuracy"] = metrics.accuracy
            lines.append(f"test accuracy: {metrics.accuracy:.4f} "
                         f"({int(np.trace(metrics.confusion))}/{metrics.n})")
    elapsed = time.perf_counter() - t0
    payload["wall_time"] = elapsed
    lines.append(f"wall time: {elapsed:.3f} s")
    _emit(args, payload, lines)


def cmd_addclass(args):
    model = serialize.load(args.model)
    X, y = _load_xy(args.data, model.n_features)
    labels = sorted(set(y.tolist()), key=lambda l: (isinstance(l, str), l))
    if args.label is not None:
        label = parse_label(args.label)
        X = X[np.array([v == label for v in y.tolist()])]
        if X.shape[0] == 0:
            raise InputError(f"{args.data}: no samples labelled {label!r}")
    elif len(labels) == 1:
        label = labels[0]
    else:
        raise InputError(f"{args.data} holds several labels {labels}; choose one with --label")
    updated = model.add_class(label, _prepare(model, X))
    serialize.save(updated, args.out or args.model)
    new = [m for m in updated.subspaces if m.class_label == label]
    lines = [f"computed subspace {label}/{m.subset_index}: {m.n_samples} samples, {m.n_modes} modes"
             for m in new]
    lines.append(f"reused {len(model.subspaces)} existing subspaces unchanged")
    _emit(args, {"computed": [[label, m.subset_index] for m in new],
                 "reused": len(model.subspaces)}, lines)


def cmd_rmclass(args):
    model = serialize.load(args.model)
    label = parse_label(args.label)
    updated = model.remove_class(label)
    serialize.save(updated, args.out or args.model)
    dropped = len(model.subspaces) - len(updated.subspaces)
    _emit(args, {"removed": label, "dropped_subspaces": dropped, "computed": []},
          [f"removed class {label}: dropped {dropped} subspaces, computed none"])


# Parser ======================================================================
def build_parser():
    parser = _Parser(prog="kpod", description="Kernel POD minimum-distance subspace classifier.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="fit a model on a LIBSVM file")
    p.add_argument("--train", required=True)
    p.add_argument("--model", required=True, help="output model JSON")
    p.add_argument("--jobs", type=_positive_int, default=1, help="fit classes on this many threads")
    _add_kernel_flags(p)
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="write one predicted label per line")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--distances", action="store_true", help="CSV with per-class distances")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("eval", help="accuracy and confusion matrix on a labelled file")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--baseline", help="external predictions (one label per line) to compare")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("gen2d", help="write a synthetic 2D dataset")
    p.add_argument("--case", choices=GEN2D_CASES, required=True)
    p.add_argument("--n", type=_positive_int, default=200, help="samples per class")
    p.add_argument("--noise", type=float, default=0.02)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen2d)

    p = sub.add_parser("grid", help="decision map of a 2-feature model as CSV")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--xmin", type=float, default=-3.0)
    p.add_argument("--xmax", type=float, default=3.0)
    p.add_argument("--ymin", type=float, default=-3.0)
    p.add_argument("--ymax", type=float, default=3.0)
    p.add_argument("--resolution", type=_positive_int, default=100)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("search", help="cross-validated grid search over rbf sigma and energy")
    p.add_argument("--train", required=True)
    p.add_argument("--test", help="report test accuracy of the best setting")
    p.add_argument("--model", help="save the best model here")
    p.add_argument("--sigmas", type=_float_list, help="explicit comma-separated sigma list")
    p.add_argument("--sigma-pow2", type=_int_range, default=list(range(-3, 4)),
                   help="exponents KMIN:KMAX of sigma = 2^k * base (default -3:3)")
    p.add_argument("--sigma-base", default="sqrtd", help="number, 'sqrtd' or 'median'")
    p.add_argument("--energies", type=_float_list, default=[0.999])
    p.add_argument("--folds", type=int, default=5)
    _add_train_flags(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("addclass", help="add a class to a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--label", help="class to take from the data file")
    p.add_argument("--out", help="output model (default: overwrite --model)")
    p.set_defaults(func=cmd_addclass)

    p = sub.add_parser("rmclass", help="remove a class from a trained model")
    p.add_argument("--model", required=True)
    p.add_argument("--label", required=True)
    p.add_argument("--out", help="output model (default: overwrite --model)")
    p.set_defaults(func=cmd_rmclass)

    for p in sub.choices.values():
        p.add_argument("--json", action="store_true", help="print one JSON document")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except UsageError as exc:
        print(f"kpod: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"kpod: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (KpodError, OSError) as exc:
        print(f"kpod: {exc}", file=sys.stderr)
        return EXIT_DATA
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
