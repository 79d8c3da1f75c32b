"""Geometric quality metrics for layer representations.

Given labeled representations of one layer, four scalars describe how well
the layer's geometry supports the classification task:

    separation   S = avgDPW - avgDPB
    information  I = (1 - minDPW) * avgSVDE
    efficiency   E = 2 * K * minDistB / avgNorm,  K = (N / pi)^(1 / (D - 1))
    quality      Q = S + sqrt(I * E)

where avgDPW/avgDPB are mean within-/between-class pair cosines, minDPW is
the class-averaged minimum |cosine|, avgSVDE the class-averaged normalized
singular-value entropy, minDistB the class-pair-averaged minimum distance,
avgNorm the mean representation norm, and D the global PCA embedding
dimension at 95% explained variance. All arithmetic runs in float64
regardless of storage precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .store import RepresentationSet

VARIANCE_THRESHOLD = 0.95


@dataclass(frozen=True)
class PairStats:
    """The five pairwise statistics of one representation set.

    Attributes:
        avg_within_cos: per-class mean pair cosine, averaged over classes.
        avg_between_cos: per-class-pair mean cross cosine, averaged over pairs.
        min_within_abs_cos: per-class minimum |cosine|, averaged over classes.
        min_between_dist: per-class-pair minimum distance, averaged over pairs.
        avg_norm: mean Euclidean norm over all representations.
    """

    avg_within_cos: float
    avg_between_cos: float
    min_within_abs_cos: float
    min_between_dist: float
    avg_norm: float


@dataclass(frozen=True)
class LayerMetrics:
    """Full metric readout for one layer."""

    layer_index: int
    stats: PairStats
    avg_entropy: float
    embed_dim: int
    separation: float
    information: float
    efficiency: float
    quality: float
    diagnostics: tuple[str, ...] = ()


# JSON field names are part of the serialized interface; keep them stable.
_JSON_KEYS = {
    "avg_within_cos": "avgDPW",
    "avg_between_cos": "avgDPB",
    "min_within_abs_cos": "minDPW",
    "min_between_dist": "minDistB",
    "avg_norm": "avgNorm",
}


def metrics_to_dict(m: LayerMetrics) -> dict:
    out = {
        "layer": m.layer_index,
        "S": m.separation,
        "I": m.information,
        "E": m.efficiency,
        "Q": m.quality,
    }
    for attr, key in _JSON_KEYS.items():
        out[key] = getattr(m.stats, attr)
    out["avgSVDE"] = m.avg_entropy
    out["embedDim"] = m.embed_dim
    out["diagnostics"] = list(m.diagnostics)
    return out


def metrics_from_dict(d: dict) -> LayerMetrics:
    stats = PairStats(**{attr: float(d[key]) for attr, key in _JSON_KEYS.items()})
    return LayerMetrics(
        layer_index=int(d["layer"]),
        stats=stats,
        avg_entropy=float(d["avgSVDE"]),
        embed_dim=int(d["embedDim"]),
        separation=float(d["S"]),
        information=float(d["I"]),
        efficiency=float(d["E"]),
        quality=float(d["Q"]),
        diagnostics=tuple(d.get("diagnostics", ())),
    )


def _class_indices(rep_set: RepresentationSet) -> list[np.ndarray]:
    labels = rep_set.labels.astype(np.int64)
    return [np.flatnonzero(labels == c) for c in range(rep_set.num_classes)]


def pairwise_stats(
    rep_set: RepresentationSet,
    cap: int | None = None,
    seed: int = 0,
) -> tuple[PairStats, list[str]]:
    """Compute the five pairwise statistics of a representation set.

    Within-class averages run over classes with at least two samples; classes
    smaller than that are skipped with a diagnostic. Between-class averages
    run over the pairs of non-empty classes.

    Args:
        rep_set: labeled representations, at least two non-empty classes.
        cap: optional per-class sample cap; larger classes are subsampled
            without replacement (seeded) and a diagnostic records it.
        seed: RNG seed for the subsample.

    Returns:
        (PairStats, diagnostics) where diagnostics is a list of strings.
    """
    if rep_set.num_classes < 2:
        raise ValueError("pairwise statistics need at least 2 classes")
    diagnostics: list[str] = []
    data = np.ascontiguousarray(rep_set.data, dtype=np.float64)
    groups = _class_indices(rep_set)

    if cap is not None:
        if cap < 1:
            raise ValueError("cap must be positive")
        rng = np.random.default_rng(seed)
        for c, idx in enumerate(groups):
            if idx.size > cap:
                keep = rng.choice(idx.size, size=cap, replace=False)
                groups[c] = idx[np.sort(keep)]
                diagnostics.append(f"subsampled class {c}: {cap} of {idx.size}")

    norms = np.linalg.norm(data, axis=1)
    if np.any(norms == 0.0):
        diagnostics.append("zero vector present")

    class_data = [np.ascontiguousarray(data[idx]) for idx in groups]
    class_norms = [np.ascontiguousarray(norms[idx]) for idx in groups]

    within_means: list[float] = []
    within_min_abs: list[float] = []
    for c, x in enumerate(class_data):
        n = x.shape[0]
        if n < 2:
            word = "empty" if n == 0 else "singleton"
            diagnostics.append(f"{word} class {c} skipped in within-class stats")
            continue
        cos_sum, min_abs = kernels.within_class(x, class_norms[c])
        within_means.append(cos_sum / (n * (n - 1) / 2))
        within_min_abs.append(min_abs)
    if not within_means:
        raise ValueError("no class has two or more samples; within-class stats undefined")

    between_means: list[float] = []
    between_min_dists: list[float] = []
    populated = [c for c, x in enumerate(class_data) if x.shape[0] >= 1]
    if len(populated) < 2:
        raise ValueError("fewer than 2 non-empty classes; between-class stats undefined")
    for ai in range(len(populated)):
        for bi in range(ai + 1, len(populated)):
            a, b = populated[ai], populated[bi]
            cos_sum, dmin = kernels.between_class(
                class_data[a], class_norms[a], class_data[b], class_norms[b]
            )
            between_means.append(cos_sum / (class_data[a].shape[0] * class_data[b].shape[0]))
            between_min_dists.append(dmin)

    all_idx = np.concatenate([idx for idx in groups if idx.size]) if cap is not None else None
    avg_norm = float(norms[all_idx].mean()) if all_idx is not None else float(norms.mean())

    stats = PairStats(
        avg_within_cos=float(np.mean(within_means)),
        avg_between_cos=float(np.mean(between_means)),
        min_within_abs_cos=float(np.mean(within_min_abs)),
        min_between_dist=float(np.mean(between_min_dists)),
        avg_norm=avg_norm,
    )
    return stats, diagnostics


def _spectrum(x: np.ndarray) -> np.ndarray:
    """Singular values of the centered matrix, with near-zero noise removed.

    The cutoff is relative to the magnitude of the original (uncentered)
    entries so that bitwise-identical rows, whose float mean is not exact,
    still yield an all-zero spectrum.
    """
    x = np.asarray(x, dtype=np.float64)
    centered = x - x.mean(axis=0)
    s = np.linalg.svd(centered, compute_uv=False)
    scale = float(np.abs(x).max()) if x.size else 0.0
    cutoff = max(x.shape) * np.finfo(np.float64).eps * scale
    return np.where(s > cutoff, s, 0.0)


def class_svd_entropy(
    class_data: np.ndarray, variance_threshold: float = VARIANCE_THRESHOLD
) -> tuple[float, int]:
    """Normalized singular-value entropy and embedding dimension of one class.

    Rows are centered at the class mean; squared singular values, normalized
    to sum to one, form a spectrum whose Shannon entropy is divided by
    ln(n_rows) and clamped to [0, 1]. The embedding dimension is the smallest
    k whose top-k spectrum mass reaches ``variance_threshold``.

    Degenerate spectra (all singular values zero, e.g. identical rows or a
    single row) return (0.0, 0).
    """
    x = np.asarray(class_data, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1:
        raise ValueError("class_data must be a non-empty 2-D matrix")
    s = _spectrum(x)
    var = s * s
    total = var.sum()
    if total <= 0.0:
        return 0.0, 0
    p = var / total
    nonzero = p[p > 0.0]
    entropy = float(-(nonzero * np.log(nonzero)).sum())
    n = x.shape[0]
    normalized = entropy / math.log(n) if n > 1 else 0.0
    normalized = min(max(normalized, 0.0), 1.0)
    cum = np.cumsum(p)
    dim = int(np.searchsorted(cum, variance_threshold - 1e-12) + 1)
    return normalized, dim


def avg_svd_entropy(
    rep_set: RepresentationSet, variance_threshold: float = VARIANCE_THRESHOLD
) -> tuple[float, list[str]]:
    """Mean normalized spectral entropy over all declared classes.

    Classes with fewer than two samples contribute zero entropy and a
    diagnostic; the denominator is always the declared class count.
    """
    diagnostics: list[str] = []
    entropies = []
    for c, idx in enumerate(_class_indices(rep_set)):
        if idx.size < 2:
            word = "empty" if idx.size == 0 else "singleton"
            diagnostics.append(f"{word} class {c} contributes zero entropy")
            entropies.append(0.0)
            continue
        ent, _ = class_svd_entropy(rep_set.data[idx], variance_threshold)
        entropies.append(ent)
    return float(np.mean(entropies)), diagnostics


def global_embedding_dim(
    rep_set: RepresentationSet, variance_threshold: float = VARIANCE_THRESHOLD
) -> int:
    """PCA dimension of the pooled set: smallest k reaching the variance cut.

    Returns 0 for a degenerate (all coincident) set.
    """
    s = _spectrum(rep_set.data)
    var = s * s
    total = var.sum()
    if total <= 0.0:
        return 0
    cum = np.cumsum(var / total)
    return int(np.searchsorted(cum, variance_threshold - 1e-12) + 1)


def separation(stats: PairStats) -> float:
    """S: mean within-class cosine minus mean between-class cosine."""
    return stats.avg_within_cos - stats.avg_between_cos


def information(stats: PairStats, avg_entropy: float) -> float:
    """I: angular spread of the tightest class pair times spectral entropy."""
    return (1.0 - stats.min_within_abs_cos) * avg_entropy


def packing_radius(n: int, min_dist: float, dim: int) -> float:
    """Radius of n balls of pairwise center distance >= min_dist in dim dims.

    r = 2 * min_dist * (n / pi)^(1 / (dim - 1)); requires dim >= 2.
    """
    if dim < 2:
        raise ValueError("packing radius needs an embedding dimension of at least 2")
    if n < 1:
        raise ValueError("n must be positive")
    if min_dist < 0:
        raise ValueError("min_dist must be non-negative")
    return 2.0 * min_dist * (n / math.pi) ** (1.0 / (dim - 1))


def efficiency(stats: PairStats, embed_dim: int, n: int) -> float:
    """E: class margin relative to the norm scale, packing-corrected.

    E = 2 * K * minDistB / avgNorm with K = (n / pi)^(1 / (embed_dim - 1)).
    Returns 0.0 when the embedding dimension is below 2 or the norm scale
    vanishes; callers flag those cases in diagnostics.
    """
    if embed_dim < 2 or stats.avg_norm <= 0.0:
        return 0.0
    k = (n / math.pi) ** (1.0 / (embed_dim - 1))
    return 2.0 * k * stats.min_between_dist / stats.avg_norm


def knowledge_quality(sep: float, info: float, eff: float) -> float:
    """Q = S + sqrt(I * E); information and efficiency must be non-negative."""
    if info < 0.0 or eff < 0.0:
        raise ValueError("information and efficiency must be non-negative")
    return sep + math.sqrt(info * eff)


def analyze_layer(
    rep_set: RepresentationSet,
    cap: int | None = None,
    seed: int = 0,
    variance_threshold: float = VARIANCE_THRESHOLD,
) -> LayerMetrics:
    """Compute all metrics for one layer's representation set.

    Args:
        rep_set: labeled representations with at least two classes.
        cap: optional per-class subsample cap for the pairwise statistics
            (spectra and the global dimension always use the full set).
        seed: RNG seed for the subsample.
        variance_threshold: explained-variance cut for embedding dimensions.

    Returns:
        LayerMetrics with diagnostics accumulated from every stage.
    """
    stats, diagnostics = pairwise_stats(rep_set, cap=cap, seed=seed)
    avg_entropy, ent_diags = avg_svd_entropy(rep_set, variance_threshold)
    diagnostics.extend(d for d in ent_diags if d not in diagnostics)
    embed_dim = global_embedding_dim(rep_set, variance_threshold)

    sep = separation(stats)
    info = information(stats, avg_entropy)
    if embed_dim < 2:
        diagnostics.append(f"embedding dimension {embed_dim} < 2; efficiency set to 0")
    elif stats.avg_norm <= 0.0:
        diagnostics.append("zero norm scale; efficiency set to 0")
    eff = efficiency(stats, embed_dim, rep_set.num_samples)
    quality = knowledge_quality(sep, info, eff)

    return LayerMetrics(
        layer_index=rep_set.layer_index,
        stats=stats,
        avg_entropy=avg_entropy,
        embed_dim=embed_dim,
        separation=sep,
        information=info,
        efficiency=eff,
        quality=quality,
        diagnostics=tuple(diagnostics),
    )
