"""Slow, literal reference implementations used only as test oracles.

Nothing here shares code with the package; each function follows the
textbook description step by step.
"""

import math
from fractions import Fraction


def histogram_loop(image, mask):
    """Triple loop over pixels, channels and intensities."""
    h, w = len(image), len(image[0])
    hist = [[0] * 256 for _ in range(3)]
    for i in range(h):
        for j in range(w):
            if not mask[i][j]:
                continue
            for k in range(256):
                for ch in range(3):
                    if int(image[i][j][ch]) == k:
                        hist[ch][k] += 1
    return hist[0] + hist[1] + hist[2]


def black_pixels(image, threshold=0):
    out = []
    for i, row in enumerate(image):
        for j, px in enumerate(row):
            if all(int(v) <= threshold for v in px):
                out.append((i, j))
    return out


def entropy(counts):
    n = sum(counts)
    return -sum(c / n * math.log2(c / n) for c in counts if c)


def normalized_gain(left, right):
    """2 I / (H_split + H_class) from label lists."""
    classes = sorted(set(left) | set(right))
    lc = [left.count(c) for c in classes]
    rc = [right.count(c) for c in classes]
    n = len(left) + len(right)
    h_class = entropy([a + b for a, b in zip(lc, rc)])
    h_split = entropy([len(left), len(right)])
    info = h_class - len(left) / n * entropy(lc) - len(right) / n * entropy(rc)
    return 2 * info / (h_split + h_class)


def tree_distribution(tree, x):
    """Walk one tree node by node; leaf class frequencies as Fractions."""
    node = 0
    while tree.feature[node] != -1:
        node = tree.left[node] if x[tree.feature[node]] < tree.threshold[node] else tree.right[node]
    counts = [int(c) for c in tree.value[node]]
    total = sum(counts)
    return [Fraction(c, total) for c in counts]


def forest_distribution(model, x):
    per_tree = [tree_distribution(t, x) for t in model.trees]
    return [float(sum(d[c] for d in per_tree) / len(per_tree)) for c in range(model.n_classes)]


def auc_by_pairs(scores, positives):
    """Probability a random positive outranks a random negative (ties count 1/2)."""
    pos = [s for s, p in zip(scores, positives) if p]
    neg = [s for s, p in zip(scores, positives) if not p]
    wins = 0.0
    for a in pos:
        for b in neg:
            wins += 1.0 if a > b else 0.5 if a == b else 0.0
    return wins / (len(pos) * len(neg))


def histogram_triple_loop(image, mask):
    """Rows, columns, channels; one increment per masked channel value."""
    hist = [[0] * 256 for _ in range(3)]
    for i, row in enumerate(image):
        for j, px in enumerate(row):
            if mask[i][j]:
                for ch in range(3):
                    hist[ch][px[ch]] += 1
    return hist[0] + hist[1] + hist[2]
