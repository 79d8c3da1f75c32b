"""Independent reference implementations used to check the fast paths.

Everything here is deliberately naive: plain Python loops over explicit
pairs, no vectorization, no shared code with the package under test.
"""

import math


def _dot(a, b):
    s = 0.0
    for x, y in zip(a, b):
        s += x * y
    return s


def naive_pair_stats(data, labels, num_classes):
    """All-pairs double-loop version of the five pairwise statistics."""
    rows = [[float(v) for v in row] for row in data]
    labs = [int(v) for v in labels]
    norms = [math.sqrt(_dot(r, r)) for r in rows]
    members = [[i for i, lab in enumerate(labs) if lab == c] for c in range(num_classes)]

    def cos(i, j):
        return _dot(rows[i], rows[j]) / (norms[i] * norms[j] + 1e-12)

    def dist(i, j):
        s = 0.0
        for a, b in zip(rows[i], rows[j]):
            d = a - b
            s += d * d
        return math.sqrt(s)

    within_means, within_mins = [], []
    for idx in members:
        if len(idx) < 2:
            continue
        vals = [cos(idx[i], idx[j]) for i in range(len(idx)) for j in range(i + 1, len(idx))]
        within_means.append(sum(vals) / len(vals))
        within_mins.append(min(abs(v) for v in vals))

    between_means, between_dmins = [], []
    populated = [idx for idx in members if idx]
    for a in range(len(populated)):
        for b in range(a + 1, len(populated)):
            vals = [cos(i, j) for i in populated[a] for j in populated[b]]
            dmin = min(dist(i, j) for i in populated[a] for j in populated[b])
            between_means.append(sum(vals) / len(vals))
            between_dmins.append(dmin)

    return {
        "avgDPW": sum(within_means) / len(within_means),
        "avgDPB": sum(between_means) / len(between_means),
        "minDPW": sum(within_mins) / len(within_mins),
        "minDistB": sum(between_dmins) / len(between_dmins),
        "avgNorm": sum(norms) / len(norms),
    }


def naive_spectral_entropy(rows):
    """Normalized entropy of the centered Gram spectrum, via eigenvalues.

    Works on the n x n Gram matrix of centered rows instead of the SVD the
    package uses; eigenvalues of G equal squared singular values.
    """
    import numpy as np

    x = np.asarray(rows, dtype=np.float64)
    centered = x - x.mean(axis=0)
    gram = centered @ centered.T
    eig = np.linalg.eigvalsh(gram)
    eig = eig[eig > max(x.shape) * np.finfo(np.float64).eps * max(float(np.abs(x).max()), 0.0) ** 2]
    total = eig.sum()
    if total <= 0:
        return 0.0
    p = eig / total
    h = float(-(p * np.log(p)).sum())
    n = x.shape[0]
    return min(max(h / math.log(n), 0.0), 1.0) if n > 1 else 0.0
