"""One-cycle schedule shape and Adam update behavior."""

import numpy as np
import pytest

from kqkit.distill import AdamState, adam_step, one_cycle_lr


def test_one_cycle_endpoints() -> None:
    total, max_lr = 1000, 0.4
    lr0, m0 = one_cycle_lr(0, total, max_lr)
    assert lr0 == pytest.approx(max_lr / 25, rel=1e-12)
    assert m0 == pytest.approx(0.95, abs=1e-12)
    lr_peak, m_peak = one_cycle_lr(300, total, max_lr)
    assert lr_peak == pytest.approx(max_lr, rel=1e-12)
    assert m_peak == pytest.approx(0.85, abs=1e-12)
    lr_end, m_end = one_cycle_lr(total - 1, total, max_lr)
    assert lr_end == pytest.approx(max_lr / 10000, rel=1e-12)
    assert m_end == pytest.approx(0.95, abs=1e-12)


def test_one_cycle_is_unimodal() -> None:
    total = 200
    lrs = [one_cycle_lr(s, total, 1.0)[0] for s in range(total)]
    peak = int(np.argmax(lrs))
    assert all(a < b for a, b in zip(lrs[:peak], lrs[1 : peak + 1]))
    assert all(a > b for a, b in zip(lrs[peak:], lrs[peak + 1 :]))
    moms = [one_cycle_lr(s, total, 1.0)[1] for s in range(total)]
    trough = int(np.argmin(moms))
    assert abs(trough - peak) <= 1  # momentum mirrors the rate


def test_one_cycle_validates_arguments() -> None:
    with pytest.raises(ValueError, match="total_steps"):
        one_cycle_lr(0, 1, 0.1)
    with pytest.raises(ValueError, match="outside"):
        one_cycle_lr(10, 10, 0.1)
    with pytest.raises(ValueError, match="outside"):
        one_cycle_lr(-1, 10, 0.1)
    with pytest.raises(ValueError, match="max_lr"):
        one_cycle_lr(0, 10, 0.0)


def test_adam_first_step_closed_form() -> None:
    p = np.array([1.0, -2.0])
    g = np.array([0.5, -0.25])
    state = AdamState.for_params([p])
    adam_step([p], [g], state, lr=0.1, weight_decay=0.0)
    # bias-corrected first step reduces to lr * g / (|g| + eps)
    want = np.array([1.0, -2.0]) - 0.1 * g / (np.abs(g) + 1e-8)
    assert np.allclose(p, want, rtol=1e-9)


def test_adam_zero_grad_is_pure_decay() -> None:
    w = np.array([2.0, -4.0])
    b = np.array([1.0, 1.0])
    state = AdamState.for_params([w, b])
    adam_step([w, b], [np.zeros(2), np.zeros(2)], state, lr=0.5, weight_decay=0.01, decay_mask=[True, False])
    assert np.allclose(w, np.array([2.0, -4.0]) * (1 - 0.5 * 0.01), rtol=1e-12)
    assert np.array_equal(b, [1.0, 1.0])


def test_adam_constant_gradient_reaches_unit_steps() -> None:
    p = np.array([0.0])
    g = np.array([3.0])
    state = AdamState.for_params([p])
    lr = 0.01
    prev = p.copy()
    for _ in range(500):
        prev = p.copy()
        adam_step([p], [g], state, lr=lr, weight_decay=0.0)
    assert abs(prev[0] - p[0]) == pytest.approx(lr, rel=1e-3)


def test_adam_beta1_override_changes_first_moment() -> None:
    p1, p2 = np.array([1.0]), np.array([1.0])
    g1, g2 = np.array([1.0]), np.array([-1.0])
    s1 = AdamState.for_params([p1])
    s2 = AdamState.for_params([p2])
    adam_step([p1], [g1], s1, lr=0.1, beta1=0.9, weight_decay=0.0)
    adam_step([p2], [g2], s2, lr=0.1, beta1=0.5, weight_decay=0.0)
    adam_step([p1], [-g1], s1, lr=0.1, beta1=0.9, weight_decay=0.0)
    adam_step([p2], [-g2], s2, lr=0.1, beta1=0.5, weight_decay=0.0)
    # different beta1 weights the sign flip differently
    assert not np.allclose(p1 - 1.0, -(p2 - 1.0))


def test_adam_rejects_mismatched_lengths() -> None:
    p = np.array([1.0])
    with pytest.raises(ValueError, match="lengths"):
        adam_step([p], [], AdamState.for_params([p]), lr=0.1)
