"""Run configuration: defaults, TOML file loading, and flag overrides."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field, fields
from pathlib import Path

import tomli

from ..ensemble import HyperParams
from ..features import CLASS_NAMES, PipelineConfig
from ..imaging import ToneMapParams


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    # data
    image_dir: str = ""
    labels_file: str = ""
    exclusion_file: str = ""
    features_file: str = ""
    output_dir: str = "out"
    # preprocessing
    resize_side: int = 512
    resize_method: str = "nearest"
    black_threshold: int = 0
    normalize_features: bool = False
    # tone mapping
    tone_operator: str = "exponential"
    tone_mode: str = "per_channel"
    tone_e: float = 1.0
    tone_q: float = 10.0
    tone_k: float = 1.0
    tone_s: float = 1.0
    # augmentation
    augment_classes: list[str] = field(default_factory=lambda: ["Mi", "Se", "Pr"])
    augment_angles: list[int] = field(default_factory=lambda: [90, 180, 270])
    # model
    n_estimators: int = 200
    max_features: str = "log2"
    bootstrap: bool = True
    n_min: int = 2
    # evaluation
    k_folds: int = 10
    group_augments: bool = True
    holdout_fraction: float = 0.3
    tune_grid: list[int] = field(default_factory=lambda: [10, 50, 100, 200])
    tune_modes: list[str] = field(default_factory=lambda: ["all", "sqrt", "log2"])
    # run
    seed: int = 0
    n_jobs: int = 1
    max_failure_fraction: float = 0.5
    svg: bool = False

    def validate(self) -> "RunConfig":
        try:
            self.tone_map_params()
            self.hyperparams()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.resize_side < 2:
            raise ConfigError("resize_side must be >= 2")
        if self.resize_method not in ("nearest", "bilinear"):
            raise ConfigError(f"unknown resize_method {self.resize_method!r}")
        if not 0 <= self.black_threshold <= 255:
            raise ConfigError("black_threshold must lie in [0, 255]")
        unknown = set(self.augment_classes) - set(CLASS_NAMES)
        if unknown:
            raise ConfigError(f"unknown augment classes {sorted(unknown)}")
        if set(self.augment_angles) - {90, 180, 270} or len(set(self.augment_angles)) != len(self.augment_angles):
            raise ConfigError("augment_angles must be distinct values from 90, 180, 270")
        if self.k_folds < 2:
            raise ConfigError("k_folds must be >= 2")
        if not 0 < self.holdout_fraction < 1:
            raise ConfigError("holdout_fraction must lie in (0, 1)")
        if not 0 <= self.max_failure_fraction <= 1:
            raise ConfigError("max_failure_fraction must lie in [0, 1]")
        return self

    def tone_map_params(self) -> ToneMapParams:
        return ToneMapParams(operator=self.tone_operator, e=self.tone_e, q=self.tone_q,
                             k=self.tone_k, mode=self.tone_mode, s=self.tone_s)

    def pipeline(self) -> PipelineConfig:
        return PipelineConfig(self.resize_side, self.resize_method, self.black_threshold, self.tone_map_params())

    def hyperparams(self) -> HyperParams:
        return HyperParams(n_estimators=self.n_estimators, max_features=self.max_features,
                           n_min=self.n_min, bootstrap=self.bootstrap, seed=self.seed)

    def augment_labels(self) -> set[int]:
        return {CLASS_NAMES.index(name) for name in self.augment_classes}

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def feature_cache_key(self) -> dict:
        keys = ("image_dir", "labels_file", "exclusion_file", "resize_side", "resize_method",
                "black_threshold", "tone_operator", "tone_mode", "tone_e", "tone_q", "tone_k",
                "tone_s", "augment_classes", "augment_angles")
        return {k: getattr(self, k) for k in keys}

    @property
    def cache_path(self) -> Path:
        return Path(self.features_file) if self.features_file else Path(self.output_dir) / "features.csv"


FIELD_TYPES = {f.name: f for f in fields(RunConfig)}


def _coerce(name: str, value):
    default = getattr(RunConfig(), name)
    try:
        if isinstance(default, bool):
            if isinstance(value, str):
                lowered = value.strip().lower()
                if lowered not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(value)
                return lowered in ("true", "1", "yes")
            return bool(value)
        if isinstance(default, list):
            items = value.split(",") if isinstance(value, str) else list(value)
            items = [v.strip() if isinstance(v, str) else v for v in items if v != ""]
            elem = type(default[0]) if default else str
            return [elem(v) for v in items]
        return type(default)(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad value for {name}: {value!r}") from exc


def load_config_file(path) -> dict:
    """Read a TOML file; sections only group keys, so they are flattened."""
    try:
        with open(path, "rb") as fh:
            data = tomli.load(fh)
    except (OSError, tomli.TOMLDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    flat = {}
    for key, value in data.items():
        items = value.items() if isinstance(value, dict) else [(key, value)]
        for k, v in items:
            if k not in FIELD_TYPES:
                raise ConfigError(f"unknown config key {k!r} in {path}")
            if k in flat:
                raise ConfigError(f"config key {k!r} given twice in {path}")
            flat[k] = v
    return flat


def resolve(config_file=None, overrides: dict | None = None) -> RunConfig:
    """Defaults, then the config file, then command-line overrides."""
    values = {}
    if config_file:
        values.update(load_config_file(config_file))
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    cfg = RunConfig(**{k: _coerce(k, v) for k, v in values.items()})
    return cfg.validate()
