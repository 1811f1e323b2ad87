"""Ingestion, standardisation, splitting, and exploratory summaries for the
UCI Parkinson's voice CSV (195 recordings, 22 acoustic features, binary
status label)."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .exceptions import DataParseError, IngestionError, SchemaError, SplitError
from .seeding import substream
from .validation import check_matrix

STD_FLOOR = 1e-12

FEATURE_COLUMNS = (
    "MDVP:Fo(Hz)",
    "MDVP:Fhi(Hz)",
    "MDVP:Flo(Hz)",
    "MDVP:Jitter(%)",
    "MDVP:Jitter(Abs)",
    "MDVP:RAP",
    "MDVP:PPQ",
    "Jitter:DDP",
    "MDVP:Shimmer",
    "MDVP:Shimmer(dB)",
    "Shimmer:APQ3",
    "Shimmer:APQ5",
    "MDVP:APQ",
    "Shimmer:DDA",
    "NHR",
    "HNR",
    "RPDE",
    "DFA",
    "spread1",
    "spread2",
    "D2",
    "PPE",
)


@dataclass(frozen=True)
class RecordSchema:
    """Column layout of the voice CSV: one identifier column, 22 numeric
    features, one binary label."""

    name_column: str = "name"
    feature_columns: tuple[str, ...] = FEATURE_COLUMNS
    label_column: str = "status"


PARKINSONS_SCHEMA = RecordSchema()


@dataclass(frozen=True)
class VoiceDataset:
    """Feature matrix, labels, and provenance of each row.

    ``row_ids`` are the 0-based positions in the original file and ``names``
    the identifier-column strings, index-aligned with the rows of ``X``.
    """

    X: np.ndarray
    y: np.ndarray
    row_ids: np.ndarray
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if self.X.shape[0] != self.y.shape[0] or self.X.shape[0] != self.row_ids.shape[0]:
            raise ValueError(
                f"inconsistent dataset sizes: X {self.X.shape}, y {self.y.shape}, "
                f"row_ids {self.row_ids.shape}"
            )

    @property
    def n_rows(self) -> int:
        return self.X.shape[0]

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    def class_counts(self) -> dict[int, int]:
        labels, counts = np.unique(self.y, return_counts=True)
        return {int(l): int(c) for l, c in zip(labels, counts)}

    def take(self, indices: np.ndarray) -> "VoiceDataset":
        names = tuple(self.names[i] for i in indices) if self.names else ()
        return VoiceDataset(self.X[indices], self.y[indices], self.row_ids[indices], names)


def load_csv(path, schema: RecordSchema = PARKINSONS_SCHEMA) -> VoiceDataset:
    """Read the CSV at ``path`` into a :class:`VoiceDataset`.

    The header is matched against the schema order-insensitively (exact
    string compare after trimming). Rows keep file order; the identifier
    column survives only in the names/row_ids mapping.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestionError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise IngestionError(f"{path}: file is empty") from None
        header = [h.strip() for h in header]
        expected = {schema.name_column, schema.label_column, *schema.feature_columns}
        missing = expected.difference(header)
        if missing:
            raise SchemaError(f"{path}: missing column(s) {sorted(missing)}")
        col_of = {name: header.index(name) for name in expected}

        names: list[str] = []
        rows: list[list[float]] = []
        labels: list[int] = []
        for row_number, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            if len(row) != len(header):
                raise DataParseError(
                    f"{path}: row {row_number} has {len(row)} cells, header has {len(header)}"
                )
            values = []
            for column in schema.feature_columns:
                cell = row[col_of[column]].strip()
                try:
                    values.append(float(cell))
                except ValueError:
                    raise DataParseError(
                        f"{path}: row {row_number}, column {column!r}: "
                        f"cannot parse {cell!r} as a number"
                    ) from None
            label_cell = row[col_of[schema.label_column]].strip()
            try:
                label = int(float(label_cell))
            except ValueError:
                raise DataParseError(
                    f"{path}: row {row_number}, column {schema.label_column!r}: "
                    f"cannot parse {label_cell!r} as a label"
                ) from None
            if label not in (0, 1):
                raise DataParseError(
                    f"{path}: row {row_number}: label must be 0 or 1, got {label}"
                )
            names.append(row[col_of[schema.name_column]].strip())
            rows.append(values)
            labels.append(label)

    if not rows:
        raise IngestionError(f"{path}: no data rows after the header")
    X = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(X)):
        bad = np.argwhere(~np.isfinite(X))[0]
        raise DataParseError(
            f"{path}: non-finite value in data row {int(bad[0]) + 1}, "
            f"column {schema.feature_columns[int(bad[1])]!r}"
        )
    y = np.array(labels, dtype=np.int64)
    row_ids = np.arange(len(rows), dtype=np.int64)
    return VoiceDataset(X=X, y=y, row_ids=row_ids, names=tuple(names))


# ---------------------------------------------------------------------------
# Standardisation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StandardizationStats:
    """Per-feature mean and population std, fit on training rows only.

    Stds are floored at 1e-12 so constant features standardise to zero
    instead of dividing by zero.
    """

    mean: np.ndarray
    std: np.ndarray


def standardize_fit(train: VoiceDataset) -> StandardizationStats:
    if train.n_rows < 2:
        raise ValueError(f"need at least 2 rows to fit standardisation, got {train.n_rows}")
    mean = train.X.mean(axis=0)
    std = train.X.std(axis=0)
    return StandardizationStats(mean=mean, std=np.maximum(std, STD_FLOOR))


def standardize_apply(data: VoiceDataset, stats: StandardizationStats) -> VoiceDataset:
    if data.n_features != stats.mean.shape[0]:
        raise ValueError(
            f"feature count mismatch: data has {data.n_features}, stats have {stats.mean.shape[0]}"
        )
    X = (data.X - stats.mean) / stats.std
    return VoiceDataset(X=X, y=data.y, row_ids=data.row_ids, names=data.names)


class FeatureStandardizer(TransformerMixin, BaseEstimator):
    """Z-score transformer over plain arrays, composable in sklearn pipelines.

    Wraps the same fit-on-train statistics used by the experiment pipeline.
    """

    def fit(self, X, y=None):
        X = check_matrix(X)
        if X.shape[0] < 2:
            raise ValueError(f"need at least 2 rows to fit, got {X.shape[0]}")
        self.mean_ = X.mean(axis=0)
        self.std_ = np.maximum(X.std(axis=0), STD_FLOOR)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        X = check_matrix(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"feature count mismatch: fitted on {self.n_features_in_}, got {X.shape[1]}"
            )
        return (X - self.mean_) / self.std_

    def inverse_transform(self, X):
        X = check_matrix(X)
        return X * self.std_ + self.mean_

    def stats(self) -> StandardizationStats:
        return StandardizationStats(mean=self.mean_.copy(), std=self.std_.copy())


# ---------------------------------------------------------------------------
# Stratified splitting
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitSpec:
    """Holdout split settings: per-class test counts use largest-remainder
    rounding of class_count * test_fraction so the total is exact."""

    test_fraction: float = 0.2
    seed: int = 42
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise ValueError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")


def _largest_remainder_counts(class_sizes: dict[int, int], fraction: float) -> dict[int, int]:
    total_target = int(math.floor(sum(class_sizes.values()) * fraction + 0.5))
    quotas = {label: size * fraction for label, size in class_sizes.items()}
    base = {label: int(math.floor(q)) for label, q in quotas.items()}
    shortfall = total_target - sum(base.values())
    # Distribute leftovers by largest fractional remainder, ties to the lower label.
    order = sorted(class_sizes, key=lambda l: (-(quotas[l] - base[l]), l))
    for label in order[:shortfall]:
        base[label] += 1
    return base


def stratified_split(data: VoiceDataset, spec: SplitSpec = SplitSpec()) -> tuple[VoiceDataset, VoiceDataset]:
    """Deterministic stratified holdout split.

    Within each class the row positions are shuffled by the PCG64 sub-stream
    named "split" (classes processed in ascending label order), the first
    quota rows go to test, and both sides are re-sorted into original file
    order. Identical (data, spec) inputs give bit-identical partitions.
    """
    sizes = data.class_counts()
    if len(sizes) < 2:
        raise SplitError(f"stratified split needs both classes, got labels {sorted(sizes)}")
    if not spec.stratified:
        raise SplitError("only stratified splitting is supported")
    counts = _largest_remainder_counts(sizes, spec.test_fraction)
    if any(c < 1 for c in counts.values()) or any(counts[l] >= sizes[l] for l in sizes):
        raise SplitError(
            f"test_fraction {spec.test_fraction} leaves an empty side for some class: "
            f"test counts {counts} of sizes {sizes}"
        )
    rng = substream(spec.seed, "split")
    test_positions: list[np.ndarray] = []
    for label in sorted(sizes):
        positions = np.flatnonzero(data.y == label)
        shuffled = positions[rng.permutation(positions.size)]
        test_positions.append(shuffled[: counts[label]])
    test_mask = np.zeros(data.n_rows, dtype=bool)
    test_mask[np.concatenate(test_positions)] = True
    test_idx = np.flatnonzero(test_mask)
    train_idx = np.flatnonzero(~test_mask)
    return data.take(train_idx), data.take(test_idx)


# ---------------------------------------------------------------------------
# Exploratory summaries
# ---------------------------------------------------------------------------


def pearson_correlation_matrix(data: VoiceDataset) -> np.ndarray:
    """Pairwise Pearson correlations of the feature columns.

    Constant columns correlate 0 against everything else by convention; the
    diagonal is exactly 1 and the matrix is exactly symmetric.
    """
    if data.n_rows < 2:
        raise ValueError(f"need at least 2 rows for correlations, got {data.n_rows}")
    X = data.X
    centered = X - X.mean(axis=0)
    norms = np.sqrt((centered * centered).sum(axis=0))
    safe = np.where(norms > 0.0, norms, 1.0)
    R = (centered / safe).T @ (centered / safe)
    R[norms == 0.0, :] = 0.0
    R[:, norms == 0.0] = 0.0
    R = np.clip((R + R.T) / 2.0, -1.0, 1.0)
    np.fill_diagonal(R, 1.0)
    return R


@dataclass(frozen=True)
class FeatureClassSummary:
    feature: str
    class_label: int
    minimum: float
    maximum: float
    mean: float
    std: float
    histogram: np.ndarray  # counts over HISTOGRAM_BINS uniform bins


HISTOGRAM_BINS = 20


def feature_summary(data: VoiceDataset,
                    feature_names: tuple[str, ...] = FEATURE_COLUMNS) -> list[FeatureClassSummary]:
    """Per-feature, per-class stats with a shared 20-bin histogram.

    Bin edges span the feature's overall min..max so both classes share the
    same axis; a constant feature puts all mass in bin 0.
    """
    if data.n_rows < 1:
        raise ValueError("feature_summary needs at least one row")
    if len(feature_names) != data.n_features:
        raise ValueError(
            f"got {len(feature_names)} names for {data.n_features} features"
        )
    out: list[FeatureClassSummary] = []
    for j, name in enumerate(feature_names):
        column = data.X[:, j]
        lo, hi = float(column.min()), float(column.max())
        for label in sorted(set(int(v) for v in np.unique(data.y))):
            values = column[data.y == label]
            if hi > lo:
                edges = np.linspace(lo, hi, HISTOGRAM_BINS + 1)
                counts, _ = np.histogram(values, bins=edges)
            else:
                counts = np.zeros(HISTOGRAM_BINS, dtype=np.int64)
                counts[0] = values.size
            out.append(FeatureClassSummary(
                feature=name,
                class_label=label,
                minimum=float(values.min()),
                maximum=float(values.max()),
                mean=float(values.mean()),
                std=float(values.std()),
                histogram=counts.astype(np.int64),
            ))
    return out


def write_correlation_csv(path, data: VoiceDataset,
                          feature_names: tuple[str, ...] = FEATURE_COLUMNS) -> None:
    """Emit the correlation matrix: row label plus 22 values, 6 decimals."""
    R = pearson_correlation_matrix(data)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("feature," + ",".join(feature_names) + "\n")
        for name, row in zip(feature_names, R):
            fh.write(name + "," + ",".join(f"{v:.6f}" for v in row) + "\n")


def write_summary_csv(path, data: VoiceDataset,
                      feature_names: tuple[str, ...] = FEATURE_COLUMNS) -> None:
    """Emit per-feature, per-class stats and histogram counts."""
    summaries = feature_summary(data, feature_names)
    bin_headers = ",".join(f"bin{k:02d}" for k in range(HISTOGRAM_BINS))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"feature,class,min,max,mean,std,{bin_headers}\n")
        for s in summaries:
            stats = f"{s.minimum:.6f},{s.maximum:.6f},{s.mean:.6f},{s.std:.6f}"
            fh.write(f"{s.feature},{s.class_label},{stats},"
                     + ",".join(str(int(c)) for c in s.histogram) + "\n")
