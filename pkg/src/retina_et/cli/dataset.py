"""Dataset ingestion and the batch feature-extraction pipeline."""

from __future__ import annotations

import csv
import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .. import features, imaging
from .config import RunConfig

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".jpg", ".jpeg")


class DataError(ValueError):
    """Bad labels file, exclusion list, or missing image."""


class PipelineError(RuntimeError):
    """Too many images failed feature extraction."""


@dataclass(frozen=True)
class ManifestEntry:
    sample_id: str
    path: str
    label: int
    excluded: bool = False
    exclusion_reason: str = ""


@dataclass
class DatasetManifest:
    entries: list[ManifestEntry]

    @property
    def active(self) -> list[ManifestEntry]:
        return [e for e in self.entries if not e.excluded]

    def class_counts(self, active_only: bool = False) -> list[int]:
        counts = [0] * len(features.CLASS_NAMES)
        for e in self.active if active_only else self.entries:
            counts[e.label] += 1
        return counts


def read_exclusions(path) -> set[str]:
    """One id per line; ``#`` starts a comment; blank lines are ignored."""
    ids = set()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read exclusion list {path}: {exc}") from exc
    for line in text.splitlines():
        item = line.split("#", 1)[0].strip()
        if item:
            ids.add(item)
    return ids


def _find_image(image_dir: Path, sample_id: str) -> Path | None:
    for suffix in IMAGE_SUFFIXES:
        candidate = image_dir / f"{sample_id}{suffix}"
        if candidate.exists():
            return candidate
    return None


def ingest(config: RunConfig) -> DatasetManifest:
    """Read ``id_code,diagnosis`` labels and flag excluded rows."""
    if not config.labels_file:
        raise DataError("labels_file is not set")
    image_dir = Path(config.image_dir or Path(config.labels_file).parent)
    excluded = read_exclusions(config.exclusion_file) if config.exclusion_file else set()

    try:
        with open(config.labels_file, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            rows = list(reader)
    except OSError as exc:
        raise DataError(f"cannot read labels file {config.labels_file}: {exc}") from exc
    if header is None or [h.strip() for h in header] != ["id_code", "diagnosis"]:
        raise DataError(f"{config.labels_file}: header must be 'id_code,diagnosis'")

    entries, seen = [], set()
    for lineno, row in enumerate(rows, start=2):
        if not row:
            continue
        if len(row) != 2:
            raise DataError(f"{config.labels_file}:{lineno}: expected 2 columns, got {len(row)}")
        sample_id, diagnosis = row[0].strip(), row[1].strip()
        if sample_id in seen:
            raise DataError(f"{config.labels_file}:{lineno}: duplicate id {sample_id!r}")
        seen.add(sample_id)
        try:
            label = int(diagnosis)
        except ValueError:
            label = -1
        if not 0 <= label < len(features.CLASS_NAMES):
            raise DataError(f"{config.labels_file}:{lineno}: diagnosis {diagnosis!r} for "
                            f"{sample_id!r} is outside 0-4")
        is_excluded = sample_id in excluded
        path = _find_image(image_dir, sample_id)
        if path is None and not is_excluded:
            raise DataError(f"no image for {sample_id!r} in {image_dir}")
        entries.append(ManifestEntry(sample_id, str(path or ""), label, is_excluded,
                                     "exclusion list" if is_excluded else ""))

    unknown = excluded - seen
    if unknown:
        logger.warning("%d excluded ids are not in the labels file", len(unknown))
    manifest = DatasetManifest(entries)
    logger.info("ingested %d images, %d active; per class %s", len(entries),
                len(manifest.active), manifest.class_counts(active_only=True))
    return manifest


def _process(entry: ManifestEntry, pipeline: features.PipelineConfig, angles, augment: bool):
    square = features.preprocess(imaging.load_image(entry.path), pipeline)
    rows = [features.LabeledSample(entry.sample_id, features.square_features(square, pipeline), entry.label)]
    if augment:
        for angle, rotated in zip(angles, imaging.rotate_augment(square, angles)):
            rows.append(features.LabeledSample(
                f"{entry.sample_id}_rot{angle}", features.square_features(rotated, pipeline),
                entry.label, "augmented", entry.sample_id))
    return rows


def run_pipeline(config: RunConfig, manifest: DatasetManifest) -> tuple[features.FeatureTable, list]:
    """Extract features for every active image and apply augmentation.

    Returns the table and a list of ``(sample_id, reason)`` failures.
    Failed images are dropped; the run aborts only when the failing
    fraction exceeds ``max_failure_fraction``.
    """
    pipeline = config.pipeline()
    augment_labels = config.augment_labels()
    angles = list(config.augment_angles)
    active = manifest.active

    def work(entry):
        try:
            augment = bool(angles) and entry.label in augment_labels
            return _process(entry, pipeline, angles, augment), None
        except (ValueError, OSError) as exc:
            return [], f"{type(exc).__name__}: {exc}"

    if config.n_jobs == 1:
        results = [work(e) for e in active]
    else:
        with ThreadPoolExecutor(max_workers=config.n_jobs if config.n_jobs > 0 else None) as pool:
            results = list(pool.map(work, active))

    samples, failures = [], []
    for entry, (rows, error) in zip(active, results):
        if error:
            logger.warning("skipping %s: %s", entry.sample_id, error)
            failures.append((entry.sample_id, error))
        samples.extend(rows)
    if active and len(failures) > config.max_failure_fraction * len(active):
        raise PipelineError(f"{len(failures)} of {len(active)} images failed feature extraction")
    table = features.FeatureTable(samples)
    table.validate()
    return table, failures


def build_feature_cache(config: RunConfig) -> features.FeatureTable:
    """Run the pipeline and write the cache CSV, its metadata and failures."""
    manifest = ingest(config)
    table, failures = run_pipeline(config, manifest)
    cache = config.cache_path
    try:
        cache.parent.mkdir(parents=True, exist_ok=True)
        features.write_table(table, cache)
        meta = {"cache_key": config.feature_cache_key(),
                "manifest_counts": manifest.class_counts(),
                "active_counts": manifest.class_counts(active_only=True),
                "table_counts": table.class_counts(),
                "n_failures": len(failures)}
        cache.with_suffix(".meta.json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n",
                                                   encoding="utf-8")
        with open(cache.with_name("failures.csv"), "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["sample_id", "reason"])
            writer.writerows(failures)
    except OSError as exc:
        raise PipelineError(f"cannot write feature cache {cache}: {exc}") from exc
    logger.info("feature table: %d rows, per class %s", len(table), table.class_counts())
    return table


def load_or_build(config: RunConfig) -> features.FeatureTable:
    """Reuse a cache built with the same preprocessing settings, else rebuild."""
    cache = config.cache_path
    meta_path = cache.with_suffix(".meta.json")
    if cache.exists():
        if config.features_file and not meta_path.exists():
            return features.read_table(cache)
        if meta_path.exists():
            meta = json.loads(meta_path.read_text(encoding="utf-8"))
            if meta.get("cache_key") == config.feature_cache_key() or not config.labels_file:
                return features.read_table(cache)
    if not config.labels_file:
        raise DataError(f"no feature cache at {cache} and no labels_file to build one")
    return build_feature_cache(config)
