"""Feature-distillation training: networks, losses, schedules, recipes."""

from .data import cluster_trace, gaussian_blobs, train_test_split
from .losses import Projector, ce_loss, feature_loss, kl_vkd_loss
from .nets import Network, accuracy, backward, forward_capture, forward_trace, init_network
from .optim import AdamState, adam_step, one_cycle_lr
from .loop import RECIPES, Recipe, TraceTeacher, TrainResult, ari, batch_step, run_experiment, train

__all__ = [
    "RECIPES",
    "AdamState",
    "Network",
    "Projector",
    "Recipe",
    "TraceTeacher",
    "TrainResult",
    "accuracy",
    "adam_step",
    "ari",
    "backward",
    "batch_step",
    "ce_loss",
    "cluster_trace",
    "feature_loss",
    "forward_capture",
    "forward_trace",
    "gaussian_blobs",
    "init_network",
    "kl_vkd_loss",
    "one_cycle_lr",
    "run_experiment",
    "train",
    "train_test_split",
]
