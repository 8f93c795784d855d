import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from retina_et import synthetic  # noqa: E402

# Aggregated confusion matrix reported for the APTOS experiment
# (rows true No/Mi/Mo/Se/Pr, columns predicted).
PUBLISHED_CONFUSION = np.array([
    [4133, 31, 113, 6, 19],
    [31, 3809, 78, 1, 17],
    [265, 370, 1588, 113, 147],
    [12, 5, 58, 2075, 18],
    [7, 19, 115, 16, 3104],
])

# Per-class precision / recall / F1 (%) reported alongside it.
PUBLISHED_METRICS = {
    "No": (92.92, 96.07, 94.47),
    "Mi": (89.96, 96.77, 93.24),
    "Mo": (81.35, 63.95, 71.62),
    "Se": (93.85, 95.71, 94.77),
    "Pr": (93.91, 95.18, 94.55),
}


@pytest.fixture(scope="session")
def separable():
    """1,000 samples, 5 classes of 200, class-indexed means."""
    return synthetic.separable_classes(n_per_class=200, n_classes=5, n_features=32, spread=2.0, seed=0)


@pytest.fixture(scope="session")
def small_data():
    return synthetic.separable_classes(n_per_class=30, n_classes=3, n_features=8, spread=1.5, seed=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def write_dataset(root, counts, excluded=None, size=16, seed=0):
    """Lay out ``root/images/<id>.png`` plus ``labels.csv`` and ``exclusions.txt``.

    ``counts[c]`` rows get diagnosis ``c``; the first ``excluded[c]`` of them
    are listed for exclusion and get no image file.  Returns
    ``(labels_path, image_dir, exclusion_path)``.
    """
    import io

    from PIL import Image

    root = Path(root)
    image_dir = root / "images"
    image_dir.mkdir(parents=True, exist_ok=True)
    excluded = excluded or [0] * len(counts)
    blobs = []
    for i in range(4):
        buf = io.BytesIO()
        Image.fromarray(synthetic.fundus_image(size=size, seed=seed + i)).save(buf, format="PNG")
        blobs.append(buf.getvalue())
    lines, dropped, n = ["id_code,diagnosis"], [], 0
    for c, (total, skip) in enumerate(zip(counts, excluded)):
        for j in range(total):
            sample_id = f"img{c}x{j:05d}"
            lines.append(f"{sample_id},{c}")
            if j < skip:
                dropped.append(sample_id)
            else:
                (image_dir / f"{sample_id}.png").write_bytes(blobs[n % len(blobs)])
                n += 1
    labels = root / "labels.csv"
    labels.write_text("\n".join(lines) + "\n")
    exclusions = root / "exclusions.txt"
    exclusions.write_text("# manually excluded images\n" + "".join(f"{d}\n" for d in dropped))
    return labels, image_dir, exclusions


# One line per acceptance criterion, printed in the terminal summary.
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
