"""Distillation recipes, the training loop, and run comparison.

A recipe names which loss terms train the student and how their gradients
route. The distinguishing routing rule: recipes with a head-only cross
entropy keep the backbone free of label gradients, so everything below the
classifier boundary learns from feature matching alone.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .data import gaussian_blobs, train_test_split
from .losses import Projector, ce_loss, feature_loss, kl_vkd_loss
from .nets import Network, accuracy, backward, forward_capture, forward_trace, init_network
from .optim import AdamState, adam_step, one_cycle_lr

RECIPES = (
    "ce_only",
    "vkd_only",
    "base_fkd",
    "base_fkd_minus_kl",
    "ours",
    "ours_plus_ce",
    "ours_plus_ll",
)

_USES_KL = {"vkd_only", "base_fkd", "ours_plus_ll"}
_USES_FEATURES = {"base_fkd", "base_fkd_minus_kl", "ours", "ours_plus_ce", "ours_plus_ll"}
_CE_HEAD_ONLY = {"ours", "ours_plus_ll"}


@dataclass(frozen=True)
class Recipe:
    """A named combination of loss terms and routing rules."""

    kind: str
    temperature: float = 4.0
    ce_weight: float = 1.0
    kl_weight: float = 1.0
    feature_weight: float = 1.0
    swap_kl: bool = False

    def __post_init__(self) -> None:
        if self.kind not in RECIPES:
            raise ValueError(f"unknown recipe {self.kind!r}, expected one of {RECIPES}")

    @property
    def uses_ce(self) -> bool:
        return self.kind != "vkd_only"

    @property
    def uses_kl(self) -> bool:
        return self.kind in _USES_KL

    @property
    def uses_features(self) -> bool:
        return self.kind in _USES_FEATURES

    @property
    def ce_head_only(self) -> bool:
        return self.kind in _CE_HEAD_ONLY

    @property
    def needs_teacher(self) -> bool:
        return self.kind != "ce_only"


@dataclass
class TraceTeacher:
    """A teacher given as fixed per-sample representations.

    ``acts`` maps layer index to an (n_train, width) matrix aligned with the
    training rows; ``logits`` is optional and only needed by KL recipes.
    """

    acts: dict[int, np.ndarray]
    logits: np.ndarray | None = None


@dataclass
class TrainResult:
    recipe: str
    seed: int
    train_acc: list[float] = field(default_factory=list)
    test_acc: list[float] = field(default_factory=list)
    losses: dict[str, list[float]] = field(default_factory=dict)
    final_test_acc: float = float("nan")
    converged: bool = True
    failure: str | None = None
    network: Network | None = None  # kept for reuse, not serialized

    def to_dict(self) -> dict:
        return {
            "recipe": self.recipe,
            "seed": self.seed,
            "train_acc": self.train_acc,
            "test_acc": self.test_acc,
            "losses": self.losses,
            "final_test_acc": self.final_test_acc,
            "converged": self.converged,
            "failure": self.failure,
        }


def _teacher_batch(
    teacher: Network | TraceTeacher | None,
    xb: np.ndarray,
    rows: np.ndarray,
    layers: tuple[int, ...],
) -> tuple[dict[int, np.ndarray], np.ndarray | None]:
    if isinstance(teacher, Network):
        logits, acts = forward_capture(teacher, xb)
        return {layer: acts[layer] for layer in layers}, logits
    if isinstance(teacher, TraceTeacher):
        acts = {layer: teacher.acts[layer][rows] for layer in layers}
        logits = teacher.logits[rows] if teacher.logits is not None else None
        return acts, logits
    return {}, None


def batch_step(
    recipe: Recipe,
    student: Network,
    xb: np.ndarray,
    yb: np.ndarray,
    teacher_acts: dict[int, np.ndarray],
    teacher_logits: np.ndarray | None,
    pairs: tuple[tuple[int, int], ...],
    weights: tuple[float, ...],
    projectors: dict[tuple[int, int], Projector],
) -> tuple[float, dict[str, float], list[np.ndarray], dict[tuple[int, int], np.ndarray]]:
    """Losses and gradients for one batch under a recipe's routing.

    Returns (total, per-term losses, student grads, projector weight grads).
    """
    zs, acts = forward_trace(student, xb)
    logits = acts[-1]
    terms: dict[str, float] = {}
    d_free: np.ndarray | None = None
    d_blocked: np.ndarray | None = None
    feature_grads: dict[int, np.ndarray] = {}
    proj_grads: dict[tuple[int, int], np.ndarray] = {}

    if recipe.uses_ce:
        loss, grad = ce_loss(logits, yb)
        terms["ce"] = recipe.ce_weight * loss
        grad = recipe.ce_weight * grad
        if recipe.ce_head_only:
            d_blocked = grad
        else:
            d_free = grad

    if recipe.uses_kl:
        if teacher_logits is None:
            raise ValueError(f"recipe {recipe.kind!r} needs teacher logits")
        loss, grad = kl_vkd_loss(logits, teacher_logits, recipe.temperature, recipe.swap_kl)
        terms["kl"] = recipe.kl_weight * loss
        grad = recipe.kl_weight * grad
        d_free = grad if d_free is None else d_free + grad

    if recipe.uses_features:
        feat_total = 0.0
        for (t_layer, s_layer), a in zip(pairs, weights):
            if a == 0.0:
                continue
            loss, d_act, d_w = feature_loss(
                acts[s_layer], teacher_acts[t_layer], projectors[(t_layer, s_layer)]
            )
            scale = recipe.feature_weight * a
            feat_total += scale * loss
            scaled = scale * d_act
            key = s_layer
            feature_grads[key] = feature_grads.get(key, 0.0) + scaled
            proj_grads[(t_layer, s_layer)] = scale * d_w
        terms["feature"] = feat_total

    total = float(sum(terms.values()))
    grads = backward(
        student,
        xb,
        zs,
        acts,
        d_logits_free=d_free,
        d_logits_blocked=d_blocked,
        feature_grads=feature_grads or None,
    )
    return total, terms, grads, proj_grads


def train(
    train_data: tuple[np.ndarray, np.ndarray],
    test_data: tuple[np.ndarray, np.ndarray],
    student_hidden: tuple[int, ...],
    recipe: Recipe,
    teacher: Network | TraceTeacher | None = None,
    teacher_layers: tuple[int, ...] = (),
    student_layers: tuple[int, ...] = (),
    mapping: tuple[tuple[float, ...], ...] | None = None,
    epochs: int = 40,
    batch_size: int = 64,
    max_lr: float = 3e-3,
    seed: int = 0,
) -> TrainResult:
    """Train a student under a recipe; deterministic for a fixed seed.

    The learning rate and momentum follow the one-cycle schedule over all
    optimizer steps, with the scheduled momentum driving Adam's beta1.
    A run is flagged as not converged on a non-finite loss (training stops)
    or when training accuracy sits below chance for 5 straight epochs.
    """
    x_train, y_train = np.asarray(train_data[0], dtype=np.float64), np.asarray(train_data[1])
    x_test, y_test = np.asarray(test_data[0], dtype=np.float64), np.asarray(test_data[1])
    classes = int(max(y_train.max(), y_test.max())) + 1
    if recipe.needs_teacher and teacher is None:
        raise ValueError(f"recipe {recipe.kind!r} needs a teacher")

    pairs: tuple[tuple[int, int], ...] = ()
    pair_weights: tuple[float, ...] = ()
    projectors: dict[tuple[int, int], Projector] = {}
    boundary = None
    if recipe.uses_features:
        if not teacher_layers or len(teacher_layers) != len(student_layers):
            raise ValueError("feature recipes need matching teacher_layers and student_layers")
        k = len(teacher_layers)
        if mapping is None:
            mapping = tuple(tuple(1.0 if i == j else 0.0 for i in range(k)) for j in range(k))
        if len(mapping) != k or any(len(row) != k for row in mapping):
            raise ValueError(f"mapping must be {k}x{k}")
        boundary = max(student_layers)
        if boundary > len(student_hidden) - 1:
            raise ValueError("student_layers must name hidden layers")

    result = TrainResult(recipe=recipe.kind, seed=seed)
    student = init_network(
        x_train.shape[1],
        tuple(student_hidden),
        classes,
        seed=seed,
        classifier_boundary=boundary,
    )
    result.network = student

    if recipe.uses_features:
        teacher_widths = (
            {layer: teacher.acts[layer].shape[1] for layer in teacher_layers}
            if isinstance(teacher, TraceTeacher)
            else {layer: teacher.weights[layer].shape[1] for layer in teacher_layers}
        )
        flat = 0
        for j, s_layer in enumerate(student_layers):
            for i, t_layer in enumerate(teacher_layers):
                if mapping[j][i] == 0.0:
                    continue
                pairs += ((t_layer, s_layer),)
                pair_weights += (float(mapping[j][i]),)
                projectors[(t_layer, s_layer)] = Projector.create(
                    teacher_widths[t_layer],
                    student_hidden[s_layer],
                    seed=seed * 1009 + 17 * flat + 1,
                )
                flat += 1

    params = student.params()
    decay = student.decay_mask()
    proj_keys = sorted(projectors)
    params += [projectors[key].weight for key in proj_keys]
    # no decay on projectors: with decay on both sides of the feature loss,
    # projector and student ratchet each other toward zero over long runs
    decay += [False] * len(proj_keys)
    state = AdamState.for_params(params)

    rng = np.random.default_rng(seed)
    n = x_train.shape[0]
    batches = max(1, (n + batch_size - 1) // batch_size)
    total_steps = max(2, epochs * batches)
    step = 0
    below_chance_streak = 0

    for epoch in range(epochs):
        order = rng.permutation(n)
        epoch_terms: dict[str, list[float]] = {}
        diverged = False
        for b in range(batches):
            rows = order[b * batch_size : (b + 1) * batch_size]
            if rows.size == 0:
                continue
            xb, yb = x_train[rows], y_train[rows]
            teacher_acts, teacher_logits = _teacher_batch(teacher, xb, rows, teacher_layers)
            with np.errstate(over="ignore", invalid="ignore"):  # divergence is flagged below
                total, terms, grads, proj_grads = batch_step(
                    recipe, student, xb, yb, teacher_acts, teacher_logits, pairs, pair_weights, projectors
                )
            if not np.isfinite(total):
                result.converged = False
                result.failure = f"non-finite loss at epoch {epoch}"
                diverged = True
                break
            grads += [proj_grads[key] for key in proj_keys]
            lr, momentum = one_cycle_lr(step, total_steps, max_lr)
            adam_step(params, grads, state, lr, beta1=momentum, decay_mask=decay)
            step += 1
            terms["total"] = total
            for name, value in terms.items():
                epoch_terms.setdefault(name, []).append(value)

        for name, values in epoch_terms.items():
            result.losses.setdefault(name, []).append(float(np.mean(values)))
        with np.errstate(over="ignore", invalid="ignore"):  # tolerate diverged weights
            result.train_acc.append(accuracy(student, x_train, y_train))
            result.test_acc.append(accuracy(student, x_test, y_test))
        if diverged:
            break
        if result.train_acc[-1] < 1.0 / classes:
            below_chance_streak += 1
            if below_chance_streak >= 5 and result.converged:
                result.converged = False
                result.failure = f"below-chance training accuracy through epoch {epoch}"
        else:
            below_chance_streak = 0

    result.final_test_acc = result.test_acc[-1] if result.test_acc else float("nan")
    return result


def ari(acc_kd1: float, acc_kd2: float, acc_baseline: float) -> float:
    """Accuracy-recovery index: gain of KD1 over KD2 per unit of KD2's gain.

    (acc_kd1 - acc_kd2) / (acc_kd2 - acc_baseline), evaluated in exact
    rational arithmetic on the decimal values so that nearby accuracies
    do not suffer cancellation. Raises ZeroDivisionError when KD2 equals
    the baseline (the ratio is unstable there).
    """
    a, b, c = (Fraction(repr(float(v))) for v in (acc_kd1, acc_kd2, acc_baseline))
    denom = b - c
    if denom == 0:
        raise ZeroDivisionError("acc_kd2 equals acc_baseline; ratio is unstable")
    return float((a - b) / denom)


def _dataset_from_config(cfg: dict) -> tuple:
    x, y = gaussian_blobs(
        n=int(cfg["n"]),
        dim=int(cfg["dim"]),
        classes=int(cfg["classes"]),
        spread=float(cfg["spread"]),
        seed=int(cfg.get("seed", 0)),
        center_scale=float(cfg.get("center_scale", 1.0)),
    )
    return train_test_split(x, y, float(cfg.get("test_fraction", 0.2)), seed=int(cfg.get("seed", 0)))


def run_experiment(cfg: dict) -> dict:
    """Run the recipe-by-seed matrix described by a config dictionary.

    The teacher is trained once with cross entropy and shared by all runs.
    Returns a JSON-ready dictionary: per-run records, per-recipe mean final
    accuracies, and the accuracy-recovery index of every recipe against the
    configured reference recipe and baseline.
    """
    (x_train, y_train), (x_test, y_test) = _dataset_from_config(cfg["dataset"])
    recipes = list(cfg["recipes"])
    seeds = [int(s) for s in cfg.get("seeds", [0])]
    baseline = cfg.get("baseline", "ce_only")
    reference = cfg.get("reference", "base_fkd")
    temperature = float(cfg.get("temperature", 4.0))
    swap_kl = bool(cfg.get("swap_kl", False))
    epochs = int(cfg.get("epochs", 40))
    batch_size = int(cfg.get("batch_size", 64))
    max_lr = float(cfg.get("max_lr", 3e-3))

    teacher_cfg = cfg.get("teacher")
    teacher_result = None
    teacher = None
    if teacher_cfg is not None:
        teacher_result = train(
            (x_train, y_train),
            (x_test, y_test),
            tuple(teacher_cfg["hidden"]),
            Recipe("ce_only"),
            epochs=int(teacher_cfg.get("epochs", epochs)),
            batch_size=int(teacher_cfg.get("batch_size", batch_size)),
            max_lr=float(teacher_cfg.get("max_lr", max_lr)),
            seed=int(teacher_cfg.get("seed", 0)),
        )
        teacher = teacher_result.network

    runs = []
    finals: dict[str, list[float]] = {}
    for kind in recipes:
        recipe = Recipe(kind, temperature=temperature, swap_kl=swap_kl)
        for seed in seeds:
            res = train(
                (x_train, y_train),
                (x_test, y_test),
                tuple(cfg["student"]["hidden"]),
                recipe,
                teacher=teacher if recipe.needs_teacher else None,
                teacher_layers=tuple(cfg.get("teacher_layers", ())),
                student_layers=tuple(cfg["student"].get("layers", ())),
                mapping=cfg.get("mapping"),
                epochs=epochs,
                batch_size=batch_size,
                max_lr=max_lr,
                seed=seed,
            )
            runs.append(res.to_dict())
            if res.converged:
                finals.setdefault(kind, []).append(res.final_test_acc)

    summary = {kind: float(np.mean(finals[kind])) if kind in finals else None for kind in recipes}
    ari_values: dict[str, float | None] = {}
    unstable: list[str] = []
    for kind in recipes:
        ref_mean, base_mean, mean = summary.get(reference), summary.get(baseline), summary.get(kind)
        if None in (ref_mean, base_mean, mean):
            ari_values[kind] = None
            continue
        try:
            ari_values[kind] = ari(mean, ref_mean, base_mean)
        except ZeroDivisionError:
            ari_values[kind] = None
            unstable.append(kind)

    out = {
        "dataset": cfg["dataset"],
        "recipes": recipes,
        "seeds": seeds,
        "reference": reference,
        "baseline": baseline,
        "teacher_test_acc": teacher_result.final_test_acc if teacher_result else None,
        "runs": runs,
        "mean_final_acc": summary,
        "ari": ari_values,
        "ari_unstable": unstable,
    }
    return out
