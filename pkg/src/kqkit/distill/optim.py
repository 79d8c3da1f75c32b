"""One-cycle schedule and decoupled-weight-decay Adam."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

RISE_FRACTION = 0.3
DIV_FACTOR = 25.0
FINAL_DIV_FACTOR = 10000.0
MAX_MOMENTUM = 0.95
BASE_MOMENTUM = 0.85


def one_cycle_lr(step: int, total_steps: int, max_lr: float) -> tuple[float, float]:
    """Cosine one-cycle learning rate and momentum at an integer step.

    The rate rises from max_lr/25 to max_lr over the first 30% of the run,
    then anneals to max_lr/10000 at the final step; momentum mirrors the
    cycle, falling from 0.95 to 0.85 and back.

    Args:
        step: current step, 0 <= step <= total_steps - 1.
        total_steps: total optimizer steps in the run, at least 2.
        max_lr: peak learning rate.

    Returns:
        (learning_rate, momentum) at this step.
    """
    if total_steps < 2:
        raise ValueError("total_steps must be at least 2")
    if not 0 <= step < total_steps:
        raise ValueError(f"step {step} outside [0, {total_steps})")
    if max_lr <= 0:
        raise ValueError("max_lr must be positive")
    init_lr = max_lr / DIV_FACTOR
    final_lr = max_lr / FINAL_DIV_FACTOR
    peak = RISE_FRACTION * total_steps
    if step <= peak:
        f = 0.5 * (1.0 - math.cos(math.pi * step / peak)) if peak > 0 else 1.0
        lr = init_lr + (max_lr - init_lr) * f
        momentum = MAX_MOMENTUM + (BASE_MOMENTUM - MAX_MOMENTUM) * f
    else:
        f = 0.5 * (1.0 - math.cos(math.pi * (step - peak) / (total_steps - 1 - peak)))
        lr = max_lr + (final_lr - max_lr) * f
        momentum = BASE_MOMENTUM + (MAX_MOMENTUM - BASE_MOMENTUM) * f
    return lr, momentum


@dataclass
class AdamState:
    """First/second moment accumulators for one parameter list."""

    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)
    t: int = 0

    @classmethod
    def for_params(cls, params: list[np.ndarray]) -> "AdamState":
        return cls(m=[np.zeros_like(p) for p in params], v=[np.zeros_like(p) for p in params])


def adam_step(
    params: list[np.ndarray],
    grads: list[np.ndarray],
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    weight_decay: float = 0.01,
    decay_mask: list[bool] | None = None,
) -> None:
    """One in-place Adam update with decoupled weight decay.

    Decay applies only where ``decay_mask`` is True (weights, not biases);
    without a mask, every parameter decays. ``beta1`` may vary per step so a
    momentum schedule can drive it.
    """
    if len(params) != len(grads) or (decay_mask is not None and len(decay_mask) != len(params)):
        raise ValueError("params, grads, and decay_mask lengths must match")
    state.t += 1
    bc1 = 1.0 - beta1**state.t
    bc2 = 1.0 - beta2**state.t
    for i, (p, g) in enumerate(zip(params, grads)):
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * g
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * (g * g)
        update = (state.m[i] / bc1) / (np.sqrt(state.v[i] / bc2) + eps)
        if decay_mask is None or decay_mask[i]:
            update = update + weight_decay * p
        p -= lr * update
