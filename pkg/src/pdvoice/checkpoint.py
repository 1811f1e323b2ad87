"""Versioned JSON checkpoints for trained models.

Layout (format "pdvoice-checkpoint", version 1): the estimator kind, its
hyperparameter snapshot, the feature count, the standardisation statistics
the model expects its inputs to be transformed with, and the learned state.
Neural models store every parameter as name, shape, and row-major float
values plus any norm-layer running buffers; the boosted-tree model stores
the initial prediction and per-tree node arrays. Floats go through JSON's
shortest round-trip representation, so save followed by load reproduces the
values bit for bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .boosting import GbmClassifier, RegressionTree
from .dataio import StandardizationStats
from .estimators import AttentiveClassifier, MlpClassifier, SaintClassifier
from .exceptions import ConfigError
from .seeding import substream

FORMAT = "pdvoice-checkpoint"
VERSION = 1

ESTIMATOR_CLASSES = {
    "mlp": MlpClassifier,
    "attentive": AttentiveClassifier,
    "saint": SaintClassifier,
    "gbm": GbmClassifier,
}


def _array_entry(name: str, arr: np.ndarray) -> dict:
    return {"name": name, "shape": list(arr.shape),
            "data": np.asarray(arr, dtype=np.float64).reshape(-1).tolist()}


def _entry_array(entry: dict) -> np.ndarray:
    return np.array(entry["data"], dtype=np.float64).reshape(entry["shape"])


def _params_to_json(params: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}


def _kind_of(model) -> str:
    kind = getattr(model, "kind", None)
    if kind not in ESTIMATOR_CLASSES:
        raise ValueError(f"cannot checkpoint object of type {type(model).__name__}")
    return kind


def save_checkpoint(model, stats: StandardizationStats | None, path) -> None:
    """Write a fitted model (and the stats its inputs were standardised
    with) to ``path``."""
    kind = _kind_of(model)
    doc = {
        "format": FORMAT,
        "version": VERSION,
        "kind": kind,
        "params": _params_to_json(model.get_params()),
        "n_features": int(model.n_features_in_),
        "standardization": None if stats is None else {
            "mean": stats.mean.tolist(), "std": stats.std.tolist()},
    }
    if kind == "gbm":
        doc["initial_prediction"] = model.initial_prediction_
        doc["trees"] = [
            {
                "feature": tree.feature.tolist(),
                "threshold": tree.threshold.tolist(),
                "left": tree.left.tolist(),
                "right": tree.right.tolist(),
                "value": tree.value.tolist(),
            }
            for tree in model.trees_
        ]
    else:
        doc["parameters"] = [_array_entry(p.name, p.value)
                             for p in model.network_.parameters()]
        doc["buffers"] = [_array_entry(name, arr)
                          for name, arr in sorted(model.network_.buffers().items())]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_checkpoint(path):
    """Rebuild the estimator saved at ``path``.

    Returns ``(model, stats)`` where stats is None when the checkpoint was
    saved without standardisation statistics.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT:
        raise ConfigError(f"{path}: not a {FORMAT} file")
    if doc.get("version") != VERSION:
        raise ConfigError(f"{path}: unsupported checkpoint version {doc.get('version')}")
    kind = doc["kind"]
    if kind not in ESTIMATOR_CLASSES:
        raise ConfigError(f"{path}: unknown model kind {kind!r}")

    cls = ESTIMATOR_CLASSES[kind]
    params = dict(doc["params"])
    for key, value in params.items():
        if isinstance(value, list):
            params[key] = tuple(value)
    model = cls(**params)
    n_features = int(doc["n_features"])

    if kind == "gbm":
        model.initial_prediction_ = float(doc["initial_prediction"])
        model.trees_ = [
            RegressionTree(
                feature=np.array(t["feature"], dtype=np.int64),
                threshold=np.array(t["threshold"], dtype=np.float64),
                left=np.array(t["left"], dtype=np.int64),
                right=np.array(t["right"], dtype=np.int64),
                value=np.array(t["value"], dtype=np.float64),
                max_depth=model.max_depth,
            )
            for t in doc["trees"]
        ]
    else:
        rng = substream(model.seed, f"init.{kind}")
        model.network_ = model._build_network(n_features, rng)
        stored = {e["name"]: _entry_array(e) for e in doc["parameters"]}
        for p in model.network_.parameters():
            if p.name not in stored:
                raise ConfigError(f"{path}: checkpoint is missing parameter {p.name!r}")
            if stored[p.name].shape != p.value.shape:
                raise ConfigError(
                    f"{path}: parameter {p.name!r} has shape {stored[p.name].shape}, "
                    f"expected {p.value.shape}")
            p.value = stored[p.name]
        buffers = {e["name"]: _entry_array(e) for e in doc.get("buffers", [])}
        if buffers:
            model.network_.load_buffers(buffers)

    model.n_features_in_ = n_features
    model.classes_ = np.array([0, 1])
    stats_doc = doc.get("standardization")
    stats = None
    if stats_doc is not None:
        stats = StandardizationStats(
            mean=np.array(stats_doc["mean"], dtype=np.float64),
            std=np.array(stats_doc["std"], dtype=np.float64),
        )
    return model, stats
