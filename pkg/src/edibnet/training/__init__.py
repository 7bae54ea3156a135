from .config import TrainConfig, build_train_config
from .losses import LossTerms, loss, loss_terms
from .schedule import cosine_lr
from .sampling import DEFAULT_ALIGN, Patch, crop_depth, depth_patch_size, sample_offsets, sample_patch
from .checkpoint import Checkpoint, load_checkpoint, save_checkpoint, sidecar_paths
from .trainer import CURVE_FIELDS, Batch, EvalSummary, LossRecord, Trainer, TrainResult, train

__all__ = [
    "TrainConfig", "build_train_config",
    "LossTerms", "loss", "loss_terms",
    "cosine_lr",
    "DEFAULT_ALIGN", "Patch", "crop_depth", "depth_patch_size", "sample_offsets", "sample_patch",
    "Checkpoint", "load_checkpoint", "save_checkpoint", "sidecar_paths",
    "CURVE_FIELDS", "Batch", "EvalSummary", "LossRecord", "Trainer", "TrainResult", "train",
]
