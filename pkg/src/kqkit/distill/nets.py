"""Small dense ReLU networks with explicit forward and backward passes.

Layer i computes z_i = a_{i-1} W_i + b_i; hidden layers apply ReLU, the last
layer emits logits. ``classifier_boundary`` names the deepest backbone layer:
everything above it is the classifier head, and gradient streams marked as
blocked stop there instead of flowing into the backbone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Network:
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    classifier_boundary: int

    @property
    def num_layers(self) -> int:
        return len(self.weights)

    def params(self) -> list[np.ndarray]:
        out: list[np.ndarray] = []
        for w, b in zip(self.weights, self.biases):
            out.extend((w, b))
        return out

    def decay_mask(self) -> list[bool]:
        # weight decay applies to matrices, never to biases
        return [True, False] * len(self.weights)


def init_network(
    in_dim: int,
    hidden: tuple[int, ...] | list[int],
    out_dim: int,
    seed: int = 0,
    classifier_boundary: int | None = None,
) -> Network:
    """He-initialized ReLU MLP; the final linear layer uses 1/sqrt(fan_in)."""
    rng = np.random.default_rng(seed)
    dims = [in_dim, *hidden, out_dim]
    weights, biases = [], []
    for i in range(len(dims) - 1):
        fan_in, fan_out = dims[i], dims[i + 1]
        scale = np.sqrt(2.0 / fan_in) if i < len(dims) - 2 else np.sqrt(1.0 / fan_in)
        weights.append(rng.normal(scale=scale, size=(fan_in, fan_out)))
        biases.append(np.zeros(fan_out))
    if classifier_boundary is None:
        classifier_boundary = len(weights) - 2
    if not 0 <= classifier_boundary <= len(weights) - 2:
        raise ValueError("classifier_boundary must name a hidden layer")
    return Network(weights=weights, biases=biases, classifier_boundary=classifier_boundary)


def forward_trace(net: Network, x: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Pre-activations and post-activations of every layer, input included.

    Returns (zs, acts); acts[-1] are the logits.
    """
    a = np.asarray(x, dtype=np.float64)
    zs, acts = [], []
    last = net.num_layers - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w + b
        a = z if i == last else np.maximum(z, 0.0)
        zs.append(z)
        acts.append(a)
    return zs, acts


def forward_capture(net: Network, x: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Logits plus the post-activation output of every layer."""
    _, acts = forward_trace(net, x)
    return acts[-1], acts


def backward(
    net: Network,
    x: np.ndarray,
    zs: list[np.ndarray],
    acts: list[np.ndarray],
    d_logits_free: np.ndarray | None = None,
    d_logits_blocked: np.ndarray | None = None,
    feature_grads: dict[int, np.ndarray] | None = None,
) -> list[np.ndarray]:
    """Backpropagate mixed gradient streams through the network.

    Args:
        net, x, zs, acts: the network and a forward trace on input x.
        d_logits_free: logit gradient that flows through every layer.
        d_logits_blocked: logit gradient that stops at the classifier
            boundary; parameters at or below it receive exactly zero from
            this stream.
        feature_grads: gradients on hidden activations, keyed by layer
            index; they join the free stream at their layer.

    Returns:
        Flat gradient list [dW0, db0, dW1, db1, ...].
    """
    last = net.num_layers - 1
    batch = np.asarray(x).shape[0]
    feature_grads = feature_grads or {}
    for layer in feature_grads:
        if not 0 <= layer < last:
            raise ValueError(f"feature gradient on non-hidden layer {layer}")

    zero = np.zeros((batch, net.weights[last].shape[1]))
    free = np.array(d_logits_free, dtype=np.float64) if d_logits_free is not None else zero.copy()
    blocked = (
        np.array(d_logits_blocked, dtype=np.float64) if d_logits_blocked is not None else zero.copy()
    )

    grads: list[np.ndarray] = [np.empty(0)] * (2 * net.num_layers)
    for i in range(last, -1, -1):
        if i in feature_grads:
            free = free + feature_grads[i]
        if i < last:  # ReLU mask; the logits layer is linear
            mask = zs[i] > 0.0
            free = free * mask
            blocked = blocked * mask
        total = free + blocked
        a_prev = acts[i - 1] if i > 0 else np.asarray(x, dtype=np.float64)
        grads[2 * i] = a_prev.T @ total
        grads[2 * i + 1] = total.sum(axis=0)
        if i > 0:
            free = free @ net.weights[i].T
            blocked = blocked @ net.weights[i].T
            if i == net.classifier_boundary + 1:
                blocked = np.zeros_like(free)
    return grads


def accuracy(net: Network, x: np.ndarray, y: np.ndarray) -> float:
    logits, _ = forward_capture(net, x)
    return float(np.mean(np.argmax(logits, axis=1) == np.asarray(y)))
