"""Choosing which layers to distill from.

Two families: metric-driven ranking (top-k by quality or one of its
components) and structural selection (last layer of each architecture
stage). Both return the selected depths in ascending order together with an
identity mapping matrix, one row per selected layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .metrics import LayerMetrics
from .store import ManifestEntry

CRITERIA = ("S", "I", "E", "IE", "Q")

# Relative depths used when a manifest carries no stage annotations; chosen
# to land on the usual stage-end positions of uniform-depth backbones.
FALLBACK_DEPTHS = (0.2, 0.4, 0.7, 0.9)


@dataclass(frozen=True)
class SelectionResult:
    """Outcome of a layer selection.

    Attributes:
        method: "kq", "stage_end", or "variant:<criterion>".
        k: number of layers requested.
        ranking: (layer, score) pairs, best first; empty for stage_end.
        selected: chosen layer indices, ascending.
        mapping: k x k weighting matrix, identity unless a caller overrides.
    """

    method: str
    k: int
    ranking: tuple[tuple[int, float], ...]
    selected: tuple[int, ...]
    mapping: tuple[tuple[float, ...], ...]

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "ranking": [[layer, score] for layer, score in self.ranking],
            "selected": list(self.selected),
            "mapping": [list(row) for row in self.mapping],
        }


def _score(m: LayerMetrics, criterion: str) -> float:
    if criterion == "S":
        return m.separation
    if criterion == "I":
        return m.information
    if criterion == "E":
        return m.efficiency
    if criterion == "IE":
        return math.sqrt(max(m.information, 0.0) * max(m.efficiency, 0.0))
    if criterion == "Q":
        return m.quality
    raise ValueError(f"unknown criterion {criterion!r}, expected one of {CRITERIA}")


def rank_layers(metrics: Sequence[LayerMetrics], criterion: str = "Q") -> list[tuple[int, float]]:
    """Rank layers by a criterion, best first; ties go to the deeper layer."""
    layers = [m.layer_index for m in metrics]
    if len(set(layers)) != len(layers):
        raise ValueError("duplicate layer indices in metrics")
    scored = [(m.layer_index, _score(m, criterion)) for m in metrics]
    return sorted(scored, key=lambda pair: (-pair[1], -pair[0]))


def _identity(k: int) -> tuple[tuple[float, ...], ...]:
    return tuple(tuple(1.0 if i == j else 0.0 for j in range(k)) for i in range(k))


def variant_select(metrics: Sequence[LayerMetrics], criterion: str, k: int = 4) -> SelectionResult:
    """Top-k layers under any ranking criterion (S, I, E, IE, or Q)."""
    if k < 1:
        raise ValueError("k must be positive")
    if len(metrics) < k:
        raise ValueError(f"need at least {k} layers, got {len(metrics)}")
    ranking = rank_layers(metrics, criterion)
    selected = tuple(sorted(layer for layer, _ in ranking[:k]))
    method = "kq" if criterion == "Q" else f"variant:{criterion}"
    return SelectionResult(
        method=method,
        k=k,
        ranking=tuple(ranking),
        selected=selected,
        mapping=_identity(k),
    )


def select_topk(metrics: Sequence[LayerMetrics], k: int = 4) -> SelectionResult:
    """Top-k layers by quality Q (the default selection strategy)."""
    return variant_select(metrics, "Q", k)


def stage_end_selection(manifest: Sequence[ManifestEntry], k: int = 4) -> SelectionResult:
    """Pick the last layer of each backbone stage.

    With stage annotations on every entry: take each stage's final layer;
    when that leaves more than k candidates, drop the last stage's end (the
    classifier side) and keep the deepest k. Without annotations, fall back
    to fixed relative depths rounded onto the layer list.
    """
    if k < 1:
        raise ValueError("k must be positive")
    entries = list(manifest)
    if len(entries) < k:
        raise ValueError(f"need at least {k} layers, got {len(entries)}")
    for prev, cur in zip(entries, entries[1:]):
        if cur.layer <= prev.layer:
            raise ValueError("manifest layers must strictly increase")

    if all(e.stage is not None for e in entries):
        ends: list[int] = []
        for prev, cur in zip(entries, entries[1:]):
            if cur.stage != prev.stage:
                ends.append(prev.layer)
        ends.append(entries[-1].layer)
        if len(ends) < k:
            raise ValueError(f"stage annotations cover {len(ends)} stages, need {k}")
        if len(ends) > k:
            candidates = ends[:-1] if len(ends) - 1 >= k else ends
            ends = candidates[-k:]
        selected = tuple(ends)
    else:
        n = len(entries)
        if n == k:
            selected = tuple(e.layer for e in entries)
        else:
            if k == len(FALLBACK_DEPTHS):
                depths = FALLBACK_DEPTHS
            else:
                depths = tuple((i + 1) / (k + 1) for i in range(k))
            positions = [math.floor(f * (n - 1) + 0.5) for f in depths]
            for i in range(1, k):  # force strictly increasing
                positions[i] = max(positions[i], positions[i - 1] + 1)
            for i in range(k - 1, -1, -1):  # and keep them in range
                positions[i] = min(positions[i], n - 1 - (k - 1 - i))
            selected = tuple(entries[p].layer for p in positions)

    return SelectionResult(
        method="stage_end",
        k=k,
        ranking=(),
        selected=selected,
        mapping=_identity(k),
    )
