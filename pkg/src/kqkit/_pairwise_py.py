"""Pure numpy/scipy pairwise kernels, used when the compiled extension is absent.

Same contract as the compiled module: float64 C-contiguous inputs, cosine
denominators guarded with a 1e-12 epsilon, distances computed exactly (no
Gram-matrix expansion trick, which loses digits for near-coincident points).
"""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import cdist

EPS = 1e-12


def within_class(x: np.ndarray, norms: np.ndarray) -> tuple[float, float]:
    """Cosine statistics over the distinct unordered pairs of one class.

    Args:
        x: (n, d) float64 rows of one class.
        norms: (n,) Euclidean norms of those rows.

    Returns:
        (sum of pair cosines, minimum |cosine|) over the n*(n-1)/2 pairs.
    """
    n = x.shape[0]
    if n < 2:
        raise ValueError("within_class needs at least two rows")
    cos = (x @ x.T) / (np.outer(norms, norms) + EPS)
    vals = cos[np.triu_indices(n, k=1)]
    return float(vals.sum()), float(np.abs(vals).min())


def between_class(
    xa: np.ndarray, na: np.ndarray, xb: np.ndarray, nb: np.ndarray
) -> tuple[float, float]:
    """Cross-class cosine sum and minimum Euclidean distance.

    Returns:
        (sum of cosines over all len(xa)*len(xb) cross pairs, min distance).
    """
    if xa.shape[0] < 1 or xb.shape[0] < 1:
        raise ValueError("between_class needs at least one row per side")
    cos = (xa @ xb.T) / (np.outer(na, nb) + EPS)
    dmin = cdist(xa, xb).min()
    return float(cos.sum()), float(dmin)
