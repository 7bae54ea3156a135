# edibnet/model/layers.py
from typing import Optional

from ..tensor import (
    Tensor,
    add,
    conv2d,
    global_avg_pool,
    scale_channels,
    sigmoid,
    silu,
)
from .params import ParamScope


def conv(x: Tensor, params: ParamScope, name: str, stride: int = 1, padding: Optional[int] = None) -> Tensor:
    """Convolution with ``{name}.weight``/``{name}.bias``; padding defaults to 'same' for odd kernels."""
    weight = params[f"{name}.weight"]
    if padding is None:
        padding = weight.shape[2] // 2
    return conv2d(x, weight, params[f"{name}.bias"], stride=stride, padding=padding)


def residual_block(z: Tensor, params: ParamScope) -> Tensor:
    """z + conv2(silu(conv1(z)))"""
    return add(z, conv(silu(conv(z, params, "conv1")), params, "conv2"))


def channel_attention(x: Tensor, params: ParamScope) -> Tensor:
    """x scaled per channel by sigmoid(expand(silu(reduce(mean_hw(x)))))."""
    pooled = global_avg_pool(x)
    gate = sigmoid(conv(silu(conv(pooled, params, "reduce")), params, "expand"))
    return scale_channels(x, gate)
