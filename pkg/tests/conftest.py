"""Shared set factories for the test suite."""

import numpy as np
import pytest

from kqkit import RepresentationSet


def make_blob_set(
    rng,
    num_classes=None,
    dim=None,
    max_samples=200,
    center_offset=1.5,
    center_scale=1.0,
    noise_scale=0.6,
    dtype=np.float64,
    layer_index=0,
):
    """Random Gaussian class blobs with a shared positive offset.

    The offset keeps every pairwise statistic bounded away from zero so
    relative comparisons against reference values are well conditioned.
    """
    c = int(num_classes if num_classes is not None else rng.integers(2, 6))
    d = int(dim if dim is not None else rng.integers(4, 17))
    counts = rng.integers(2, max(3, max_samples // c) + 1, size=c)
    centers = center_offset + rng.normal(scale=center_scale, size=(c, d))
    parts, labels = [], []
    for k in range(c):
        parts.append(centers[k] + rng.normal(scale=noise_scale, size=(counts[k], d)))
        labels.extend([k] * counts[k])
    data = np.concatenate(parts).astype(dtype)
    order = rng.permutation(len(labels))
    return RepresentationSet(
        data=data[order],
        labels=np.asarray(labels)[order],
        num_classes=c,
        layer_index=layer_index,
    )


@pytest.fixture
def rng():
    return np.random.default_rng(2026)
