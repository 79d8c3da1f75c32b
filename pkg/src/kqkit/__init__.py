"""kqkit: layer-quality metrics, layer selection, and feature distillation."""

__version__ = "0.1.0"

from .metrics import (
    LayerMetrics,
    PairStats,
    analyze_layer,
    avg_svd_entropy,
    class_svd_entropy,
    efficiency,
    global_embedding_dim,
    information,
    knowledge_quality,
    packing_radius,
    pairwise_stats,
    separation,
)
from .store import (
    ManifestEntry,
    RepresentationSet,
    load_manifest,
    read_dump,
    validate_manifest,
    write_dump,
)

__all__ = [
    "LayerMetrics",
    "PairStats",
    "ManifestEntry",
    "RepresentationSet",
    "analyze_layer",
    "avg_svd_entropy",
    "class_svd_entropy",
    "efficiency",
    "global_embedding_dim",
    "information",
    "knowledge_quality",
    "packing_radius",
    "pairwise_stats",
    "separation",
    "load_manifest",
    "read_dump",
    "validate_manifest",
    "write_dump",
    "__version__",
]
