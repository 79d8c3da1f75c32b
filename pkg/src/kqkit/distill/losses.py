"""Loss terms and their gradients, batch-mean reduced.

Every function returns the scalar loss together with analytic gradients, so
training never relies on numeric differentiation (tests do).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _log_softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - logits.max(axis=1, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=1, keepdims=True))


def ce_loss(logits: np.ndarray, labels: np.ndarray) -> tuple[float, np.ndarray]:
    """Mean cross entropy and its gradient with respect to the logits."""
    logits = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels)
    n = logits.shape[0]
    logp = _log_softmax(logits)
    loss = float(-logp[np.arange(n), labels].mean())
    grad = np.exp(logp)
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n


def kl_vkd_loss(
    student_logits: np.ndarray,
    teacher_logits: np.ndarray,
    temperature: float = 4.0,
    swap: bool = False,
) -> tuple[float, np.ndarray]:
    """Temperature-scaled logit-matching loss and its student-side gradient.

    The default direction is KL(student || teacher) on the softened
    distributions, scaled by temperature^2; ``swap=True`` uses the
    conventional KL(teacher || student) instead. The teacher side is
    treated as constant.
    """
    if temperature <= 0:
        raise ValueError("temperature must be positive")
    t = float(temperature)
    s = np.asarray(student_logits, dtype=np.float64) / t
    q = np.asarray(teacher_logits, dtype=np.float64) / t
    n = s.shape[0]
    log_p, log_q = _log_softmax(s), _log_softmax(q)
    p = np.exp(log_p)
    if swap:
        qq = np.exp(log_q)
        loss = float(t * t * (qq * (log_q - log_p)).sum(axis=1).mean())
        grad = t * (p - qq) / n
    else:
        u = log_p - log_q
        loss = float(t * t * (p * u).sum(axis=1).mean())
        grad = t * p * (u - (p * u).sum(axis=1, keepdims=True)) / n
    return loss, grad


@dataclass
class Projector:
    """Maps teacher activations onto a student layer's width.

    When the teacher width is an integer multiple of the student width,
    consecutive groups of ``group`` channels are mean-pooled first; the
    remaining mismatch is handled by a single linear layer without bias.
    """

    weight: np.ndarray  # (pooled_width, student_width)
    group: int

    @classmethod
    def create(cls, teacher_width: int, student_width: int, seed: int = 0) -> "Projector":
        if teacher_width % student_width == 0:
            group = teacher_width // student_width
        else:
            group = 1
        pooled = teacher_width // group
        # channel-selection start: each student unit initially tracks one
        # pooled teacher channel at full scale. A random dense start lets the
        # jointly trained weight regress the student's junk features onto the
        # teacher span early on, which silently drops class directions; a
        # selection start keeps every direction alive until the student can
        # hold it. The seed argument stays for signature stability.
        del seed
        weight = np.zeros((pooled, student_width))
        for j in range(student_width):
            weight[(j * pooled) // student_width if student_width > pooled else j % pooled, j] = 1.0
        return cls(weight=weight, group=group)

    def pool(self, teacher_act: np.ndarray) -> np.ndarray:
        if self.group == 1:
            return np.asarray(teacher_act, dtype=np.float64)
        b, w = teacher_act.shape
        return np.asarray(teacher_act, dtype=np.float64).reshape(b, w // self.group, self.group).mean(axis=2)


def feature_loss(
    student_act: np.ndarray, teacher_act: np.ndarray, projector: Projector
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean-squared error between a student activation and the projected teacher.

    Returns:
        (loss, gradient wrt student_act, gradient wrt projector.weight).
        The teacher activation is constant; only the student and the
        projector receive gradients.
    """
    student_act = np.asarray(student_act, dtype=np.float64)
    pooled = projector.pool(teacher_act)
    target = pooled @ projector.weight
    diff = student_act - target
    scale = 2.0 / diff.size
    loss = float((diff * diff).mean())
    d_student = scale * diff
    d_weight = -(pooled.T @ d_student)
    return loss, d_student, d_weight
