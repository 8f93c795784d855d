"""Command-line entry point: ``retina-et <command> [options]``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .. import ensemble, evaluation, features
from ..evaluation import reports
from ..features import TableFormatError
from ..imaging import ImageLoadError
from .config import FIELD_TYPES, ConfigError, RunConfig, resolve
from .dataset import DataError, PipelineError, build_feature_cache, load_or_build

logger = logging.getLogger("retina_et")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_PIPELINE, EXIT_CACHE = 0, 2, 3, 4, 5

COMMANDS = {
    "extract": "build the feature cache from images and labels",
    "tune": "OOB error sweep over n_estimators x max_features",
    "train": "train on the whole table and save the model",
    "cv": "stratified k-fold cross-validation reports",
    "holdout": "single stratified train/test evaluation",
    "report": "print a summary of the artifacts in output_dir",
}


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    defaults = RunConfig()
    group = parser.add_argument_group("configuration (overrides the config file)")
    for name in FIELD_TYPES:
        default = getattr(defaults, name)
        flag = "--" + name.replace("_", "-")
        if isinstance(default, bool):
            group.add_argument(flag, dest=name, default=None, type=str, metavar="BOOL",
                               help=f"default {str(default).lower()}")
        elif isinstance(default, list):
            group.add_argument(flag, dest=name, default=None, metavar="A,B,...",
                               help=f"default {','.join(map(str, default))}")
        else:
            group.add_argument(flag, dest=name, default=None, metavar=type(default).__name__.upper(),
                               help=f"default {default!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="retina-et",
                                     description="Retinal image grading with extremely randomized trees.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        p = sub.add_parser(name, help=help_text, description=help_text)
        p.add_argument("--config", help="TOML configuration file")
        _add_config_flags(p)
    return parser


def _config_echo(cfg: RunConfig, command: str, n_features: int | None = None) -> dict:
    echo = {"command": command, **cfg.as_dict()}
    if n_features:
        echo["n_candidates"] = ensemble.n_candidates(cfg.max_features, n_features)
    echo["max_features_rule"] = "all=D, sqrt=round(sqrt(D)), log2=max(1, round(log2(D)))"
    echo["luminance_color"] = "channel = L_d * (channel / luminance) ** s"
    return echo


def _write_run_config(out: Path, echo: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / "run_config.json").write_text(json.dumps(echo, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def run(cfg: RunConfig, command: str) -> str:
    out = Path(cfg.output_dir)
    if command == "report":
        text = reports.summarize(out)
        if out.exists():
            (out / "report.txt").write_text(text + "\n", encoding="utf-8")
        return text

    table = build_feature_cache(cfg) if command == "extract" else load_or_build(cfg)
    n_features = features.N_FEATURES
    echo = _config_echo(cfg, command, n_features)
    _write_run_config(out, echo)

    if command == "extract":
        return f"wrote {cfg.cache_path} ({len(table)} rows, per class {table.class_counts()})"

    X, y = table.matrix(cfg.normalize_features), table.y
    if command == "tune":
        rows = evaluation.oob_sweep(X, y, cfg.tune_grid, cfg.tune_modes, seed=cfg.seed, n_min=cfg.n_min,
                                    n_jobs=cfg.n_jobs, n_classes=len(table.class_names))
        reports.write_sweep(rows, out / "oob_sweep.csv", echo, svg=cfg.svg)
        best = min(rows, key=lambda r: (r.oob_error, r.n_estimators))
        return f"wrote {out / 'oob_sweep.csv'} ({len(rows)} rows); lowest OOB error {best.oob_error:.4f} " \
               f"at n_estimators={best.n_estimators}, max_features={best.mode}"
    if command == "train":
        model = ensemble.train(X, y, cfg.hyperparams(), n_classes=len(table.class_names),
                               class_names=table.class_names, n_jobs=cfg.n_jobs)
        ensemble.save_model(model, out / "model.json")
        msg = f"wrote {out / 'model.json'}"
        if cfg.bootstrap:
            msg += f"; OOB error {ensemble.oob_error(model, X, y):.4f}"
        return msg
    if command == "cv":
        report = evaluation.cross_validate(table, cfg.hyperparams(), k=cfg.k_folds, seed=cfg.seed,
                                           group_augments=cfg.group_augments,
                                           normalize=cfg.normalize_features, n_jobs=cfg.n_jobs)
        reports.write_cv_report(report, out, echo, svg=cfg.svg)
        lo, hi = reports.REFERENCE_FOLD_RANGE
        return (f"mean {cfg.k_folds}-fold accuracy {report.mean_accuracy:.2f}% "
                f"(reference range {lo}-{hi}%, mean {reports.REFERENCE_MEAN_ACCURACY}%)")
    if command == "holdout":
        report = evaluation.holdout(table, cfg.hyperparams(), cfg.holdout_fraction, seed=cfg.seed,
                                    group_augments=cfg.group_augments, normalize=cfg.normalize_features,
                                    n_jobs=cfg.n_jobs)
        reports.write_holdout(report, out, echo)
        return (f"hold-out accuracy {report.accuracy:.2f}% "
                f"({len(report.train_indices)} train / {len(report.test_indices)} test)")
    raise ConfigError(f"unknown command {command!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {name: getattr(args, name) for name in FIELD_TYPES}
    try:
        cfg = resolve(args.config, overrides)
        print(run(cfg, args.command))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, ImageLoadError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except PipelineError as exc:
        print(f"pipeline error: {exc}", file=sys.stderr)
        return EXIT_PIPELINE
    except TableFormatError as exc:
        print(f"feature cache error: {exc}", file=sys.stderr)
        return EXIT_CACHE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
