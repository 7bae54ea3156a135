from .tensor import DTYPE, SCALAR_SHAPE, GradientMap, GradTape, Tensor, active_tape, backward, record_op
from .ops import (
    absolute,
    add,
    affine,
    bilinear_matrix,
    channel_norm,
    concat_channels,
    conv2d,
    cosine_similarity,
    global_avg_pool,
    mean,
    mul,
    resample_bilinear,
    resize_bilinear,
    scale_channels,
    sigmoid,
    silu,
    slice_channels,
    sub,
    total,
    upsample_nearest2x,
)
from .optim import AdamState, adam_step

__all__ = [
    "DTYPE", "SCALAR_SHAPE", "GradientMap", "GradTape", "Tensor", "active_tape", "backward", "record_op",
    "absolute", "add", "affine", "bilinear_matrix", "channel_norm", "concat_channels", "conv2d",
    "cosine_similarity", "global_avg_pool", "mean", "mul", "resample_bilinear", "resize_bilinear",
    "scale_channels", "sigmoid", "silu", "slice_channels", "sub", "total",
    "upsample_nearest2x", "AdamState", "adam_step",
]
