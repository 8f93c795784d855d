from .config import ConfigError, RunConfig, load_config_file, resolve
from .dataset import (
    DataError,
    DatasetManifest,
    ManifestEntry,
    PipelineError,
    build_feature_cache,
    ingest,
    load_or_build,
    read_exclusions,
    run_pipeline,
)
from .main import main

__all__ = [
    "ConfigError",
    "DataError",
    "DatasetManifest",
    "ManifestEntry",
    "PipelineError",
    "RunConfig",
    "build_feature_cache",
    "ingest",
    "load_config_file",
    "load_or_build",
    "main",
    "read_exclusions",
    "resolve",
    "run_pipeline",
]
