# edibnet/model/adapter.py
"""
Depth stream of the network: the depth encoder and the per-level adapter
that lets normalized depth features gate the decoder's image features.
"""
from dataclasses import dataclass
from typing import Tuple, Union
import logging

import numpy as np

from ..errors import ShapeError
from ..tensor import Tensor, add, channel_norm, concat_channels, mul, resize_bilinear, sigmoid, silu
from .layers import channel_attention, conv
from .params import ParamScope

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DepthMap:
    """Single-channel depth raster normalized to [0, 1]; its size need not match the image."""

    tensor: Tensor

    def __post_init__(self):
        if self.tensor.shape[1] != 1:
            raise ShapeError(f"DepthMap must have exactly one channel, got shape {self.tensor.shape}")
        data = self.tensor.data
        if data.size and (data.min() < 0.0 or data.max() > 1.0):
            raise ShapeError(
                f"DepthMap values must lie in [0, 1], got range [{data.min():.4g}, {data.max():.4g}]"
            )

    @property
    def shape(self):
        return self.tensor.shape

    @classmethod
    def constant(cls, value: float, n: int, h: int, w: int) -> "DepthMap":
        return cls(Tensor(np.full((n, 1, h, w), value)))


DepthLike = Union[DepthMap, Tensor]


def depth_encoder(depth: DepthLike, target_h: int, target_w: int, width: int, params: ParamScope) -> Tensor:
    """
    Two 3x3 convs (1 -> width -> width, SiLU between) at the depth raster's own
    resolution, then bilinear alignment to (target_h, target_w).
    """
    x = depth.tensor if isinstance(depth, DepthMap) else depth
    if x.shape[1] != 1:
        raise ShapeError(f"depth_encoder expects a single-channel depth map, got shape {x.shape}")
    out_channels = params["conv2.weight"].shape[0]
    if out_channels != width:
        raise ShapeError(f"depth_encoder: parameters produce {out_channels} channels, requested width {width}")
    features = conv(silu(conv(x, params, "conv1")), params, "conv2")
    if features.shape[2:] == (target_h, target_w):
        return features
    return resize_bilinear(features, target_h, target_w)


def depth_gate(d_feat: Tensor, params: ParamScope) -> Tensor:
    """g = sigmoid(conv_a(d_n) * conv_b(d_n)) on the normalized, bias-adjusted depth features."""
    d_n = conv(channel_norm(d_feat, params["norm_d.scale"], params["norm_d.shift"]), params, "bias_d")
    return sigmoid(mul(conv(d_n, params, "conv_a"), conv(d_n, params, "conv_b")))


def adapter_fused(z: Tensor, d_feat: Tensor, params: ParamScope) -> Tensor:
    """Fusion conv output over [g * z_n, z], before channel attention."""
    if z.shape != d_feat.shape:
        raise ShapeError(f"adapter: image features {z.shape} and depth features {d_feat.shape} differ")
    z_n = conv(channel_norm(z, params["norm_z.scale"], params["norm_z.shift"]), params, "bias_z")
    z_cond = mul(depth_gate(d_feat, params), z_n)
    return conv(concat_channels([z_cond, z]), params, "fusion")


def adapter_forward(z: Tensor, d_feat: Tensor, params: ParamScope) -> Tuple[Tensor, Tensor]:
    """
    z' = z + CA(fused) and the depth features handed to the next level.

    ``d_next`` is the channel-attended depth stream at the current resolution
    and width; the caller maps it onto the next level.
    """
    z_out = add(z, channel_attention(adapter_fused(z, d_feat, params), params.scope("attn")))
    return z_out, channel_attention(d_feat, params.scope("attn_d"))
