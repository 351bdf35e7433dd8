"""Model persistence as a single self-describing JSON document.

Layout (one subspace record per line, so untouched records keep their exact
bytes when classes are added or removed)::

    {"format": "kpod-model", "format_version": 1,
     "config": {...}, "labels": [...], "reference_size": N, "scaling": null,
     "subspaces": [
      {record},
      {record}
     ]}

Floats are written with ``repr``, which round-trips exactly.
"""
from __future__ import annotations

import json

import numpy as np

from .classifier import Classifier, TrainConfig
from .data import ScalingParams
from .errors import FormatVersionError, InputError
from .kernel import CenteringStats
from .subspace import SubspaceModel

__all__ = ["FORMAT_VERSION", "subspace_record", "dumps", "loads", "save", "load"]

FORMAT_NAME = "kpod-model"
FORMAT_VERSION = 1


def subspace_record(m: SubspaceModel) -> str:
    rec = {
        "label": m.class_label,
        "subset_index": m.subset_index,
        "centered": m.centered,
        "samples": m.samples.tolist(),
        "coeffs": m.coeffs.tolist(),
        "eigenvalues": m.eigenvalues.tolist(),
        "stats": None if m.stats is None else {
            "row_means": m.stats.row_means.tolist(),
            "total_mean": m.stats.total_mean,
        },
    }
    return json.dumps(rec, sort_keys=True, allow_nan=False)


def dumps(c: Classifier) -> str:
    head = {
        "format": FORMAT_NAME,
        "format_version": FORMAT_VERSION,
        "config": c.config.to_dict(),
        "labels": list(c.labels),
        "reference_size": c.reference_size,
        "scaling": None if c.scaling is None else c.scaling.to_dict(),
    }
    head_text = json.dumps(head, sort_keys=True)[:-1]
    records = ",\n".join(" " + subspace_record(m) for m in c.subspaces)
    return f'{head_text}, "subspaces": [\n{records}\n]}}\n'


def _subspace(rec, config) -> SubspaceModel:
    stats = rec["stats"]
    if stats is not None:
        stats = CenteringStats(np.asarray(stats["row_means"], dtype=float),
                               float(stats["total_mean"]))
    samples = np.asarray(rec["samples"], dtype=float)
    coeffs = np.asarray(rec["coeffs"], dtype=float).reshape(-1, samples.shape[0])
    return SubspaceModel(config.kernel, rec["label"], int(rec["subset_index"]), samples,
                         coeffs, np.asarray(rec["eigenvalues"], dtype=float),
                         bool(rec["centered"]), stats)


def loads(text: str) -> Classifier:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != FORMAT_NAME:
        raise InputError("not a kpod model file")
    if doc.get("format_version") != FORMAT_VERSION:
        raise FormatVersionError(
            f"model format version {doc.get('format_version')!r} is not supported "
            f"(expected {FORMAT_VERSION})")
    try:
        config = TrainConfig.from_dict(doc["config"])
        subspaces = [_subspace(r, config) for r in doc["subspaces"]]
        scaling = doc.get("scaling")
        if scaling is not None:
            scaling = ScalingParams.from_dict(scaling)
        return Classifier(config, subspaces, doc["reference_size"], scaling)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"malformed model file: {exc!r}") from None


def save(c: Classifier, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(c))


def load(path) -> Classifier:
    with open(path) as fh:
        return loads(fh.read())
