"""Synthetic datasets and teacher traces for desk-scale experiments."""

from __future__ import annotations

import numpy as np


def gaussian_blobs(
    n: int,
    dim: int,
    classes: int,
    spread: float,
    seed: int = 0,
    center_scale: float = 1.0,
) -> tuple[np.ndarray, np.ndarray]:
    """Balanced Gaussian class blobs: centers ~ N(0, center_scale^2 I).

    Returns (x, y) with x float64 of shape (n, dim) and integer labels y.
    """
    if classes < 2 or n < classes:
        raise ValueError("need at least 2 classes and n >= classes")
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=center_scale, size=(classes, dim))
    y = rng.permutation(np.arange(n) % classes)
    x = centers[y] + rng.normal(scale=spread, size=(n, dim))
    return x, y


def train_test_split(
    x: np.ndarray, y: np.ndarray, test_fraction: float = 0.2, seed: int = 0
) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    if not 0.0 < test_fraction < 1.0:
        raise ValueError("test_fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(y))
    n_test = max(1, int(round(len(y) * test_fraction)))
    test, train = order[:n_test], order[n_test:]
    return (x[train], y[train]), (x[test], y[test])


def cluster_trace(
    y: np.ndarray,
    num_layers: int,
    width: int,
    clean_layers: tuple[int, ...],
    mix_fraction: float = 0.4,
    anchor_scale: float = 3.0,
    noise: float = 0.5,
    seed: int = 0,
) -> dict[int, np.ndarray]:
    """Per-sample teacher representations with controllable label fidelity.

    Every layer places samples around per-class anchor vectors. Layers in
    ``clean_layers`` use the true labels; all other layers first reassign a
    ``mix_fraction`` of the labels uniformly at random, so their cluster
    structure contradicts the task for that fraction of samples.

    Returns {layer_index: (n, width) float64 matrix}.
    """
    if not 0.0 <= mix_fraction <= 1.0:
        raise ValueError("mix_fraction must be in [0, 1]")
    rng = np.random.default_rng(seed)
    y = np.asarray(y)
    classes = int(y.max()) + 1
    trace: dict[int, np.ndarray] = {}
    for layer in range(num_layers):
        # folded normal keeps anchors in the output range of ReLU taps
        anchors = np.abs(rng.normal(scale=anchor_scale, size=(classes, width)))
        labels = y.copy()
        if layer not in clean_layers:
            flip = rng.random(len(y)) < mix_fraction
            labels[flip] = rng.integers(0, classes, size=int(flip.sum()))
        trace[layer] = anchors[labels] + rng.normal(scale=noise, size=(len(y), width))
    return trace
