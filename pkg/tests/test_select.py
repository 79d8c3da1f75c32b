"""Layer selection tests."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kqkit.metrics import LayerMetrics, PairStats
from kqkit.select import rank_layers, select_topk, stage_end_selection, variant_select
from kqkit.store import ManifestEntry


def fake_metrics(layer, q=0.0, s=0.0, i=0.0, e=0.0):
    stats = PairStats(0.0, 0.0, 0.0, 0.0, 1.0)
    return LayerMetrics(
        layer_index=layer,
        stats=stats,
        avg_entropy=0.0,
        embed_dim=2,
        separation=s,
        information=i,
        efficiency=e,
        quality=q,
    )


def manifest(layers, stages=None):
    return [
        ManifestEntry(layer=layer, file=f"l{layer}.rdmp", stage=None if stages is None else stages[i])
        for i, layer in enumerate(layers)
    ]


def test_rank_orders_by_quality_descending() -> None:
    ms = [fake_metrics(0, q=0.1), fake_metrics(1, q=0.9), fake_metrics(2, q=0.5)]
    assert rank_layers(ms) == [(1, 0.9), (2, 0.5), (0, 0.1)]


def test_rank_breaks_ties_toward_deeper_layers() -> None:
    ms = [fake_metrics(3, q=0.5), fake_metrics(5, q=0.5), fake_metrics(1, q=0.2)]
    assert rank_layers(ms) == [(5, 0.5), (3, 0.5), (1, 0.2)]


def test_rank_rejects_duplicate_layers() -> None:
    with pytest.raises(ValueError, match="duplicate"):
        rank_layers([fake_metrics(1), fake_metrics(1)])


def test_select_topk_sorts_selection_ascending() -> None:
    ms = [fake_metrics(0, q=0.3), fake_metrics(1, q=0.9), fake_metrics(2, q=0.1), fake_metrics(3, q=0.8)]
    res = select_topk(ms, k=2)
    assert res.method == "kq"
    assert res.selected == (1, 3)
    assert res.ranking[0] == (1, 0.9)
    assert res.mapping == ((1.0, 0.0), (0.0, 1.0))


def test_select_topk_needs_enough_layers() -> None:
    with pytest.raises(ValueError, match="at least 4"):
        select_topk([fake_metrics(0), fake_metrics(1)], k=4)
    with pytest.raises(ValueError, match="positive"):
        select_topk([fake_metrics(0)], k=0)


def test_variant_select_each_criterion() -> None:
    ms = [
        fake_metrics(0, q=0.0, s=1.0, i=0.0, e=0.0),
        fake_metrics(1, q=0.0, s=0.0, i=1.0, e=0.1),
        fake_metrics(2, q=1.0, s=0.0, i=0.0, e=0.0),
        fake_metrics(3, q=0.0, s=0.0, i=0.5, e=9.0),
    ]
    assert variant_select(ms, "S", k=1).selected == (0,)
    assert variant_select(ms, "I", k=1).selected == (1,)
    assert variant_select(ms, "E", k=1).selected == (3,)
    assert variant_select(ms, "IE", k=1).selected == (3,)  # sqrt(0.5*9) > sqrt(0.1)
    assert variant_select(ms, "Q", k=1).selected == (2,)
    assert variant_select(ms, "IE", k=1).method == "variant:IE"
    with pytest.raises(ValueError, match="criterion"):
        variant_select(ms, "QQ", k=1)


@settings(max_examples=30, deadline=None)
@given(
    grid=st.lists(st.integers(-40, 40), min_size=4, max_size=10, unique=True),
    scale=st.floats(0.5, 5),
    shift=st.floats(-3, 3),
)
def test_selection_invariant_under_monotone_transforms(grid, scale, shift) -> None:
    qs = [i / 10 for i in grid]  # coarse grid keeps the transform injective in floats
    ms = [fake_metrics(i, q=q) for i, q in enumerate(qs)]
    transformed = [fake_metrics(i, q=math.tanh(q) * scale + shift) for i, q in enumerate(qs)]
    assert select_topk(ms, k=4).selected == select_topk(transformed, k=4).selected


def test_stage_end_resnet34_style() -> None:
    stages = [0] + [1] * 3 + [2] * 4 + [3] * 6 + [4] * 3 + [5]
    res = stage_end_selection(manifest(list(range(18)), stages), k=4)
    assert res.selected == (3, 7, 13, 16)
    assert res.method == "stage_end"
    assert res.ranking == ()


def test_stage_end_vgg19_style() -> None:
    stages = [0] * 2 + [1] * 2 + [2] * 4 + [3] * 4 + [4] * 4 + [5] * 3
    res = stage_end_selection(manifest(list(range(19)), stages), k=4)
    assert res.selected == (3, 7, 11, 15)


def test_stage_end_exact_k_stages_is_identity() -> None:
    res = stage_end_selection(manifest([3, 7, 13, 16], stages=[1, 2, 3, 4]), k=4)
    assert res.selected == (3, 7, 13, 16)


def test_stage_end_uniform_depths_without_stages() -> None:
    res = stage_end_selection(manifest(list(range(12))), k=4)
    assert res.selected == (2, 4, 8, 10)


def test_stage_end_four_layers_selects_all() -> None:
    assert stage_end_selection(manifest([0, 5, 9, 11]), k=4).selected == (0, 5, 9, 11)


def test_stage_end_validates_input() -> None:
    with pytest.raises(ValueError, match="at least 4"):
        stage_end_selection(manifest([0, 1, 2]), k=4)
    with pytest.raises(ValueError, match="strictly increase"):
        stage_end_selection(manifest([0, 0, 1, 2]), k=4)
    with pytest.raises(ValueError, match="stages"):
        stage_end_selection(manifest([0, 1, 2, 3], stages=[0, 0, 1, 1]), k=3)


@settings(max_examples=40, deadline=None)
@given(
    n=st.integers(4, 40),
    k=st.integers(1, 4),
    start=st.integers(0, 5),
    step=st.integers(1, 3),
)
def test_stage_end_selection_well_formed(n, k, start, step) -> None:
    layers = [start + i * step for i in range(n)]
    res = stage_end_selection(manifest(layers), k=k)
    assert len(res.selected) == k
    assert list(res.selected) == sorted(set(res.selected))
    assert set(res.selected) <= set(layers)
    assert res.selected[-1] <= layers[-1]


def test_selection_result_serializes() -> None:
    res = select_topk([fake_metrics(i, q=float(i)) for i in range(4)], k=2)
    d = res.to_dict()
    assert d == {
        "method": "kq",
        "k": 2,
        "ranking": [[3, 3.0], [2, 2.0], [1, 1.0], [0, 0.0]],
        "selected": [2, 3],
        "mapping": [[1.0, 0.0], [0.0, 1.0]],
    }
