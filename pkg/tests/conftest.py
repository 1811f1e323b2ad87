"""Shared fixtures.

The data-dependent tests run against the original UCI voice file when it is
available (either at data/parkinsons.data or via the PARKINSONS_DATA
environment variable) and otherwise against the bundled synthetic look-alike,
which has the same schema, class balance, and dependency structure.
"""

import os
from pathlib import Path

import pytest

from pdvoice.dataio import (SplitSpec, load_csv, standardize_apply,
                            standardize_fit, stratified_split)

REPO_ROOT = Path(__file__).resolve().parent.parent
SURROGATE_PATH = REPO_ROOT / "data" / "synthetic_parkinsons.csv"


def resolve_dataset_path() -> tuple[Path, bool]:
    env = os.environ.get("PARKINSONS_DATA")
    if env:
        candidate = Path(env)
        if candidate.exists():
            return candidate, True
    real = REPO_ROOT / "data" / "parkinsons.data"
    if real.exists():
        return real, True
    return SURROGATE_PATH, False


@pytest.fixture(scope="session")
def dataset_path():
    path, _ = resolve_dataset_path()
    return path


@pytest.fixture(scope="session")
def dataset_is_real():
    _, is_real = resolve_dataset_path()
    return is_real


@pytest.fixture(scope="session")
def voice_dataset(dataset_path):
    return load_csv(dataset_path)


@pytest.fixture(scope="session")
def standardized_split(voice_dataset):
    """(train, test) folds of the default 80/20 seed-42 split, standardised
    with statistics fit on the training fold."""
    train, test = stratified_split(voice_dataset, SplitSpec())
    stats = standardize_fit(train)
    return standardize_apply(train, stats), standardize_apply(test, stats)
