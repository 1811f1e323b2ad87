"""Experiment configuration: dataclasses plus an INI-style file format.

The file is flat and human readable, one section per concern::

    [experiment]
    seed = 42
    test_fraction = 0.2
    models = mlp,gbm,attentive,saint

    [train]
    epochs = 100
    batch_size = 256
    learning_rate = 0.001

    [mlp]
    hidden_sizes = 64,32

    [attentive]
    head_hidden = 32
    virtual_batch = 128

    [saint]
    embed_dim = 16
    n_layers = 2
    n_heads = 2
    ff_multiplier = 2
    dropout = 0.1
    use_intersample = true

    [gbm]
    n_stages = 100
    learning_rate = 0.1
    max_depth = 3
    min_samples_leaf = 2

Every field defaults to the values above, so a bare ``run --data ...``
invocation reproduces the standard protocol (seed 42, 80/20 stratified
split, 100 epochs, batch 256). Unknown sections or keys raise
:class:`ConfigError` rather than being silently ignored.
"""

from __future__ import annotations

import configparser
from dataclasses import asdict, dataclass, field, fields

from .exceptions import ConfigError

MODEL_KINDS = ("mlp", "gbm", "attentive", "saint")


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 256
    learning_rate: float = 1e-3


@dataclass(frozen=True)
class MlpConfig:
    hidden_sizes: tuple[int, ...] = (64, 32)


@dataclass(frozen=True)
class AttentiveConfig:
    head_hidden: int = 32
    virtual_batch: int = 128


@dataclass(frozen=True)
class SaintConfig:
    embed_dim: int = 16
    n_layers: int = 2
    n_heads: int = 2
    ff_multiplier: int = 2
    dropout: float = 0.1
    use_intersample: bool = True


@dataclass(frozen=True)
class GbmConfig:
    n_stages: int = 100
    learning_rate: float = 0.1
    max_depth: int = 3
    min_samples_leaf: int = 2


@dataclass(frozen=True)
class ExperimentConfig:
    data_path: str
    output_dir: str
    seed: int = 42
    test_fraction: float = 0.2
    models: tuple[str, ...] = MODEL_KINDS
    train: TrainConfig = field(default_factory=TrainConfig)
    mlp: MlpConfig = field(default_factory=MlpConfig)
    attentive: AttentiveConfig = field(default_factory=AttentiveConfig)
    saint: SaintConfig = field(default_factory=SaintConfig)
    gbm: GbmConfig = field(default_factory=GbmConfig)

    def __post_init__(self):
        if not self.models:
            raise ConfigError("models_to_run must not be empty")
        unknown = [m for m in self.models if m not in MODEL_KINDS]
        if unknown:
            raise ConfigError(f"unknown model kind(s) {unknown}; choose from {MODEL_KINDS}")
        if not 0.0 < self.test_fraction < 1.0:
            raise ConfigError(f"test_fraction must lie in (0, 1), got {self.test_fraction}")


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part.strip()) for part in text.split(",") if part.strip())
    except ValueError:
        raise ConfigError(f"expected a comma-separated list of integers, got {text!r}") from None


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


_SECTION_SPECS: dict[str, dict] = {
    "experiment": {"seed": int, "test_fraction": float,
                   "models": lambda s: tuple(p.strip() for p in s.split(",") if p.strip())},
    "train": {"epochs": int, "batch_size": int, "learning_rate": float},
    "mlp": {"hidden_sizes": _parse_int_list},
    "attentive": {"head_hidden": int, "virtual_batch": int},
    "saint": {"embed_dim": int, "n_layers": int, "n_heads": int,
              "ff_multiplier": int, "dropout": float, "use_intersample": _parse_bool},
    "gbm": {"n_stages": int, "learning_rate": float, "max_depth": int,
            "min_samples_leaf": int},
}

_SECTION_CLASSES = {"train": TrainConfig, "mlp": MlpConfig, "attentive": AttentiveConfig,
                    "saint": SaintConfig, "gbm": GbmConfig}


def read_config_file(path) -> dict:
    """Parse an INI config file into keyword overrides for
    :func:`build_config`. Raises :class:`ConfigError` on anything unknown."""
    parser = configparser.ConfigParser()
    try:
        with open(path, "r", encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigError(f"malformed config file {path}: {exc}") from None

    overrides: dict = {}
    for section in parser.sections():
        if section not in _SECTION_SPECS:
            raise ConfigError(
                f"{path}: unknown section [{section}]; valid sections are "
                f"{sorted(_SECTION_SPECS)}")
        spec = _SECTION_SPECS[section]
        parsed = {}
        for key, raw in parser.items(section):
            if key not in spec:
                raise ConfigError(
                    f"{path}: unknown key {key!r} in [{section}]; valid keys are "
                    f"{sorted(spec)}")
            try:
                parsed[key] = spec[key](raw)
            except ConfigError:
                raise
            except ValueError:
                raise ConfigError(
                    f"{path}: cannot parse {key} = {raw!r} in [{section}]") from None
        if section == "experiment":
            overrides.update(parsed)
        else:
            overrides[section] = parsed
    return overrides


def build_config(data_path: str, output_dir: str, file_overrides: dict | None = None,
                 **cli_overrides) -> ExperimentConfig:
    """Merge defaults, config-file values, and CLI flags (highest priority)."""
    merged: dict = dict(file_overrides or {})
    for key, value in cli_overrides.items():
        if value is None:
            continue
        merged[key] = value
    sections = {}
    for name, cls in _SECTION_CLASSES.items():
        section_kwargs = merged.pop(name, {})
        valid = {f.name for f in fields(cls)}
        bad = set(section_kwargs) - valid
        if bad:
            raise ConfigError(f"unknown {name} option(s) {sorted(bad)}")
        sections[name] = cls(**section_kwargs)
    known = {"seed", "test_fraction", "models"}
    bad = set(merged) - known
    if bad:
        raise ConfigError(f"unknown experiment option(s) {sorted(bad)}")
    return ExperimentConfig(data_path=data_path, output_dir=output_dir,
                            **merged, **sections)


def neural_estimator_kwargs(config: ExperimentConfig, kind: str) -> dict:
    """Flatten the per-model and shared training sections into the keyword
    arguments of the matching estimator."""
    model_cfg = asdict(getattr(config, kind))
    if kind == "mlp":
        model_cfg["hidden_sizes"] = tuple(model_cfg["hidden_sizes"])
    return {**model_cfg, **asdict(config.train), "seed": config.seed}
