"""CSV and SVG report artifacts.

Every CSV opens with ``#``-prefixed lines carrying the resolved run
configuration as JSON, followed by an ordinary header row and data rows.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .metrics import ClassMetrics, ConfusionMatrix
from .roc import RocCurve

REFERENCE_FOLD_RANGE = (87.67, 92.87)
REFERENCE_MEAN_ACCURACY = 91.07


def config_line(config: dict) -> str:
    return "# config: " + json.dumps(config, sort_keys=True, separators=(",", ":"))


def _write(path: Path, config: dict, header, rows, extra_comments=()) -> Path:
    buf = io.StringIO()
    buf.write(config_line(config) + "\n")
    for line in extra_comments:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")
    return path


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Return ``(comments, header, rows)``; comments map key -> raw value."""
    comments, lines = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(": ")
            comments[key] = value
        else:
            lines.append(line)
    rows = list(csv.reader(lines))
    return comments, rows[0], rows[1:]


def _fmt(v: float) -> str:
    return "nan" if np.isnan(v) else repr(float(v))


def write_confusion(cm: ConfusionMatrix, path, config: dict) -> Path:
    rows = [[name, *row] for name, row in zip(cm.class_names, cm.counts.tolist())]
    return _write(Path(path), config, ["true\\predicted", *cm.class_names], rows)


def write_metrics(metrics: ClassMetrics, path, config: dict) -> Path:
    rows = [[name, *(_fmt(getattr(metrics, k)[i]) for k in ("precision", "recall", "f1"))]
            for i, name in enumerate(metrics.class_names)]
    rows.append(["Average", _fmt(metrics.macro_precision), _fmt(metrics.macro_recall), _fmt(metrics.macro_f1)])
    return _write(Path(path), config, ["class", "precision", "recall", "f1"], rows)


def write_roc(curve: RocCurve, path, config: dict) -> Path:
    rows = [[repr(float(f)), repr(float(t))] for f, t in zip(curve.fpr, curve.tpr)]
    return _write(Path(path), config, ["fpr", "tpr"], rows, [f"auc: {curve.auc!r}"])


def write_cv_report(report, out_dir, config: dict, svg: bool = False) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = report.confusion.class_names
    rows = [[i + 1, repr(a)] for i, a in enumerate(report.fold_accuracies)]
    comments = [f"mean_accuracy: {report.mean_accuracy!r}",
                f"reference_fold_range: {REFERENCE_FOLD_RANGE[0]}-{REFERENCE_FOLD_RANGE[1]}",
                f"reference_mean_accuracy: {REFERENCE_MEAN_ACCURACY}"]
    paths = [
        _write(out / "cv_report.csv", config, ["fold", "accuracy"], rows, comments),
        write_confusion(report.confusion, out / "confusion.csv", config),
        write_metrics(report.metrics, out / "metrics.csv", config),
    ]
    for c, curve in sorted(report.roc.items()):
        paths.append(write_roc(curve, out / f"roc_{names[c]}.csv", config))
    if svg:
        paths += plot_cv(report, out)
    return paths


def write_holdout(report, out_dir, config: dict) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    counts = [["train", len(report.train_indices)], ["test", len(report.test_indices)],
              ["accuracy", repr(report.accuracy)]]
    return [
        _write(out / "holdout.csv", config, ["item", "value"], counts),
        write_confusion(report.confusion, out / "holdout_confusion.csv", config),
        write_metrics(report.metrics, out / "holdout_metrics.csv", config),
    ]


def write_sweep(rows, path, config: dict, svg: bool = False) -> list[Path]:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = [[r.n_estimators, r.mode, repr(r.oob_error), r.n_skipped] for r in rows]
    paths = [_write(path, config, ["n_estimators", "mode", "oob_error", "n_skipped"], data)]
    if svg:
        paths.append(plot_sweep(rows, path.with_suffix(".svg")))
    return paths


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "retina-et"  # stable ids across runs
    return plt


def plot_sweep(rows, path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for mode in dict.fromkeys(r.mode for r in rows):
        pts = sorted((r.n_estimators, r.oob_error) for r in rows if r.mode == mode)
        ax.plot(*zip(*pts), marker="o", label=mode)
    ax.set_xlabel("n_estimators")
    ax.set_ylabel("OOB error")
    ax.legend(title="max_features")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def plot_cv(report, out_dir) -> list[Path]:
    plt = _pyplot()
    out = Path(out_dir)
    names = report.confusion.class_names

    fig, ax = plt.subplots(figsize=(6, 4))
    folds = np.arange(1, len(report.fold_accuracies) + 1)
    ax.bar(folds, report.fold_accuracies)
    ax.axhline(report.mean_accuracy, color="red")
    ax.set_xlabel("fold")
    ax.set_ylabel("accuracy (%)")
    fig.tight_layout()
    fig.savefig(out / "cv_report.svg", format="svg", metadata={"Date": None})
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 5))
    ax.imshow(report.confusion.counts, cmap="Blues")
    for (i, j), v in np.ndenumerate(report.confusion.counts):
        ax.text(j, i, str(v), ha="center", va="center")
    ax.set_xticks(range(len(names)), names)
    ax.set_yticks(range(len(names)), names)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    fig.tight_layout()
    fig.savefig(out / "confusion.svg", format="svg", metadata={"Date": None})
    plt.close(fig)

    fig, ax = plt.subplots(figsize=(5, 5))
    for c, curve in sorted(report.roc.items()):
        ax.plot(curve.fpr, curve.tpr, label=f"{names[c]} (AUC {curve.auc:.3f})")
    ax.plot([0, 1], [0, 1], color="grey", linestyle=":")
    ax.set_xlabel("false positive rate")
    ax.set_ylabel("true positive rate")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out / "roc.svg", format="svg", metadata={"Date": None})
    plt.close(fig)
    return [out / "cv_report.svg", out / "confusion.svg", out / "roc.svg"]


def summarize(out_dir) -> str:
    """Human-readable digest of whatever report CSVs exist in ``out_dir``."""
    out = Path(out_dir)
    lines = []
    cfg = out / "run_config.json"
    if cfg.exists():
        lines += ["Run configuration:", cfg.read_text(encoding="utf-8").strip(), ""]
    if (out / "cv_report.csv").exists():
        comments, _, rows = read_csv(out / "cv_report.csv")
        accs = [float(r[1]) for r in rows]
        lines.append(f"Cross-validation ({len(accs)} folds): mean accuracy {float(comments['mean_accuracy']):.2f}%"
                     f" (range {min(accs):.2f}-{max(accs):.2f}%)")
        lines.append(f"  reference: mean {REFERENCE_MEAN_ACCURACY}%, folds "
                     f"{REFERENCE_FOLD_RANGE[0]}-{REFERENCE_FOLD_RANGE[1]}% (not expected to match)")
    if (out / "confusion.csv").exists():
        _, header, rows = read_csv(out / "confusion.csv")
        lines += ["", "Aggregated confusion matrix (rows true, columns predicted):",
                  "  " + "\t".join(header[1:])]
        lines += ["  " + "\t".join(r) for r in rows]
    if (out / "metrics.csv").exists():
        _, _, rows = read_csv(out / "metrics.csv")
        lines += ["", "class\tprecision\trecall\tf1"]
        lines += [f"{r[0]}\t" + "\t".join(f"{float(v):.2f}" for v in r[1:]) for r in rows]
    rocs = sorted(out.glob("roc_*.csv"))
    if rocs:
        lines.append("")
        for p in rocs:
            comments, _, _ = read_csv(p)
            lines.append(f"ROC {p.stem[4:]}: AUC {float(comments['auc']):.4f}")
    if (out / "holdout.csv").exists():
        _, _, rows = read_csv(out / "holdout.csv")
        items = dict(rows)
        lines += ["", f"Hold-out: train {items['train']}, test {items['test']}, "
                      f"accuracy {float(items['accuracy']):.2f}%"]
    if (out / "oob_sweep.csv").exists():
        _, _, rows = read_csv(out / "oob_sweep.csv")
        lines += ["", "OOB sweep (n_estimators, mode, error):"]
        lines += [f"  {r[0]}\t{r[1]}\t{float(r[2]):.4f}" for r in rows]
    if not lines:
        return f"no report artifacts found in {out}"
    return "\n".join(lines)
