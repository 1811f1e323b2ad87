"""End-to-end experiment driver.

``run_experiment`` walks the whole pipeline (load, stratified split,
standardise on the training fold, train every requested model, evaluate on
the holdout) and only then serialises all artifacts through a single writer,
finishing with a sha256 manifest. Identical configurations produce
byte-identical files. A failure in any stage raises :class:`StageFailure`
tagged with the stage name; files already written are removed so no partial
output survives.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .boosting import GbmClassifier
from .checkpoint import save_checkpoint
from .config import ExperimentConfig, neural_estimator_kwargs
from .dataio import (SplitSpec, StandardizationStats, VoiceDataset, load_csv,
                     standardize_apply, standardize_fit, stratified_split,
                     write_correlation_csv, write_summary_csv)
from .estimators import AttentiveClassifier, MlpClassifier, SaintClassifier
from .exceptions import PdvoiceError
from .metrics import EvaluationReport, full_report

MODEL_ORDER = ("mlp", "gbm", "attentive", "saint")


class StageFailure(PdvoiceError):
    """Wraps the failing stage's name around the original exception."""

    def __init__(self, stage: str, cause: Exception):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage}: {cause}")


@dataclass(frozen=True)
class RunArtifacts:
    output_dir: Path
    files: tuple[str, ...]
    reports: dict[str, EvaluationReport]
    manifest_path: Path


def _build_estimator(config: ExperimentConfig, kind: str):
    if kind == "gbm":
        return GbmClassifier(**{k: v for k, v in vars(config.gbm).items()})
    cls = {"mlp": MlpClassifier, "attentive": AttentiveClassifier,
           "saint": SaintClassifier}[kind]
    return cls(**neural_estimator_kwargs(config, kind))


def _loss_curve(model) -> np.ndarray:
    if hasattr(model, "loss_curve_"):
        return model.loss_curve_
    return model.stage_mse_curve_


def run_experiment(config: ExperimentConfig) -> RunArtifacts:
    """Execute the full pipeline and emit every artifact under
    ``config.output_dir``."""

    def stage(name, fn):
        try:
            return fn()
        except StageFailure:
            raise
        except Exception as exc:
            raise StageFailure(name, exc) from exc

    data = stage("load", lambda: load_csv(config.data_path))
    train, test = stage("split", lambda: _split(data, config))
    stats, train_std, test_std = stage("standardize", lambda: _standardize(train, test))

    kinds = tuple(k for k in MODEL_ORDER if k in config.models)
    fitted = {}
    reports = {}
    for kind in kinds:
        model = stage(f"train.{kind}", lambda k=kind: _fit(config, k, train_std))
        report = stage(f"evaluate.{kind}",
                       lambda m=model, k=kind: full_report(
                           test_std.y, m.predict_proba(test_std.X), kind=k))
        fitted[kind] = model
        reports[kind] = report

    return stage("emit", lambda: _emit(config, kinds, fitted, reports, stats))


def _split(data: VoiceDataset, config: ExperimentConfig):
    spec = SplitSpec(test_fraction=config.test_fraction, seed=config.seed)
    return stratified_split(data, spec)


def _standardize(train: VoiceDataset, test: VoiceDataset):
    stats = standardize_fit(train)
    return stats, standardize_apply(train, stats), standardize_apply(test, stats)


def _fit(config: ExperimentConfig, kind: str, train_std: VoiceDataset):
    return _build_estimator(config, kind).fit(train_std.X, train_std.y)


def compare_table(reports: list[EvaluationReport]) -> list[dict]:
    """One row per model sorted by MCC descending, AUC breaking ties, model
    name keeping the order stable beyond that."""
    if not reports:
        raise ValueError("compare_table needs at least one report")
    rows = [
        {
            "model": r.kind,
            "weighted_precision": r.weighted_precision,
            "weighted_recall": r.weighted_recall,
            "weighted_f1": r.weighted_f1,
            "mcc": r.mcc,
            "auc": r.roc.auc,
        }
        for r in reports
    ]
    rows.sort(key=lambda row: (-row["mcc"], -row["auc"], row["model"]))
    return rows


# ---------------------------------------------------------------------------
# Artifact emission
# ---------------------------------------------------------------------------


class _Writer:
    """Tracks written files so a failure can remove partial output."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: list[Path] = []

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        self.written.append(p)
        return p

    def cleanup(self):
        for p in self.written:
            try:
                p.unlink()
            except OSError:
                pass


def _emit(config: ExperimentConfig, kinds, fitted, reports,
          stats: StandardizationStats) -> RunArtifacts:
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    writer = _Writer(out_dir)
    try:
        for kind in kinds:
            write_report_json(writer.path(f"report_{kind}.json"), reports[kind])
            write_roc_csv(writer.path(f"roc_{kind}.csv"), reports[kind])
            write_confusion_csv(writer.path(f"confusion_{kind}.csv"), reports[kind])
            write_loss_csv(writer.path(f"loss_{kind}.csv"), _loss_curve(fitted[kind]))
            save_checkpoint(fitted[kind], stats, writer.path(f"checkpoint_{kind}.json"))
        write_comparison_csv(writer.path("comparison.csv"),
                             compare_table([reports[k] for k in kinds]))
        manifest_path = out_dir / "manifest.json"
        write_manifest(manifest_path, writer.written)
        writer.written.append(manifest_path)
    except Exception:
        writer.cleanup()
        raise
    names = tuple(sorted(p.name for p in writer.written))
    return RunArtifacts(output_dir=out_dir, files=names, reports=dict(reports),
                        manifest_path=manifest_path)


def write_report_json(path: Path, report: EvaluationReport) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_roc_csv(path: Path, report: EvaluationReport) -> None:
    roc = report.roc
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("threshold,fpr,tpr\n")
        for t, f, r in zip(roc.thresholds, roc.fpr, roc.tpr):
            t_text = "inf" if np.isinf(t) else f"{t:.6f}"
            fh.write(f"{t_text},{f:.6f},{r:.6f}\n")


def write_confusion_csv(path: Path, report: EvaluationReport) -> None:
    cm = report.confusion
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",pred_0,pred_1\n")
        fh.write(f"true_0,{cm.tn},{cm.fp}\n")
        fh.write(f"true_1,{cm.fn},{cm.tp}\n")


def write_loss_csv(path: Path, curve: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("epoch,mean_loss\n")
        for epoch, value in enumerate(curve):
            fh.write(f"{epoch},{value:.10g}\n")


def write_comparison_csv(path: Path, rows: list[dict]) -> None:
    columns = ("model", "weighted_precision", "weighted_recall", "weighted_f1",
               "mcc", "auc")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            cells = [row["model"]] + [f"{row[c]:.4f}" for c in columns[1:]]
            fh.write(",".join(cells) + "\n")


def write_manifest(path: Path, files: list[Path]) -> None:
    entries = []
    for p in sorted(files, key=lambda q: q.name):
        data = p.read_bytes()
        entries.append({"name": p.name, "bytes": len(data),
                        "sha256": hashlib.sha256(data).hexdigest()})
    doc = {"format": "pdvoice-manifest", "version": 1, "files": entries}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_eda(data_path, output_dir) -> tuple[Path, Path]:
    """Emit correlation.csv and summary.csv for the data file."""
    data = load_csv(data_path)
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    correlation = out_dir / "correlation.csv"
    summary = out_dir / "summary.csv"
    write_correlation_csv(correlation, data)
    write_summary_csv(summary, data)
    return correlation, summary


def run_evaluate(checkpoint_path, data_path, output_dir) -> EvaluationReport:
    """Re-score a saved model on a data file and emit its report artifacts."""
    from .checkpoint import load_checkpoint

    model, stats = load_checkpoint(checkpoint_path)
    data = load_csv(data_path)
    X = data.X if stats is None else (data.X - stats.mean) / stats.std
    kind = getattr(model, "kind", "model")
    report = full_report(data.y, model.predict_proba(X), kind=kind)
    out_dir = Path(output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_report_json(out_dir / f"report_{kind}.json", report)
    write_roc_csv(out_dir / f"roc_{kind}.csv", report)
    write_confusion_csv(out_dir / f"confusion_{kind}.csv", report)
    return report
