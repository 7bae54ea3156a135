# edibnet/model/edibnet.py
"""
Forward pass of the deblurring network.

    image -> L-level DWT -> per-band 3x3 convs on the top level -> encoder
          -> decoder (+ depth adapters) -> per-band heads (residual on the
          top-level sub-bands) -> inverse DWT with the untouched lower-level
          details passed straight through.
"""
from typing import List, NamedTuple, Optional, Tuple, Union
import logging

from ..errors import ShapeError
from ..tensor import Tensor, add, concat_channels, upsample_nearest2x
from ..wavelet import BANDS, Details, SubbandSet, WaveletPyramid, build_basis, decompose, reconstruct
from .adapter import DepthLike, DepthMap, adapter_forward, depth_encoder
from .config import ModelConfig
from .layers import conv, residual_block
from .params import ParamScope, ParamStore

logger = logging.getLogger(__name__)

Params = Union[ParamStore, ParamScope]


class WaveletFeatures(NamedTuple):
    features: Tensor
    # Detail triples that bypass the network, finest level first.
    skip_details: List[Details]
    # Top-level sub-bands of the input; the heads predict residuals on these.
    subbands: SubbandSet


def _check_image(image: Tensor, config: ModelConfig) -> None:
    n, c, h, w = image.shape
    if c != 3:
        raise ShapeError(f"Expected a 3-channel image, got shape {image.shape}")
    m = config.spatial_multiple
    if h % m or w % m:
        raise ShapeError(
            f"Image {h}x{w} is not divisible by {m} (2^{config.decomposition_levels} for the DWT x 4 for the encoder)"
        )


def wavelet_transform_block(image: Tensor, config: ModelConfig, params: Params) -> WaveletFeatures:
    _check_image(image, config)
    pyramid = decompose(image, config.decomposition_levels, build_basis(config.wavelet))
    top = pyramid.top()
    scope = params.scope("wavelet")
    features = concat_channels([conv(getattr(top, band), scope, band) for band in config.processed_bands])
    if config.decomposition_levels == 1:
        skip = list(pyramid.details)
    else:
        skip = list(pyramid.details[:-1])
    return WaveletFeatures(features, skip, top)


def encoder_forward(features: Tensor, config: ModelConfig, params: Params) -> Tuple[Tensor, List[Tensor]]:
    """Returns the deepest activation and the pre-downsample skips of levels 1 and 2."""
    widths = config.level_channels
    if features.shape[1] != widths[0]:
        raise ShapeError(f"encoder expects {widths[0]} channels, got {features.shape}")
    scope = params.scope("encoder")
    skips: List[Tensor] = []
    z = features
    for level in (1, 2, 3):
        for j in range(config.blocks_at("encoder", level)):
            z = residual_block(z, scope.scope(f"level{level}.block{j}"))
        if level < 3:
            skips.append(z)
            z = conv(z, scope, f"down{level}", stride=2, padding=1)
    return z, skips


def decoder_forward(
    deepest: Tensor,
    skips: List[Tensor],
    depth_features: Optional[Tensor],
    config: ModelConfig,
    params: Params,
) -> Tensor:
    if len(skips) != 2:
        raise ShapeError(f"decoder expects 2 encoder skips, got {len(skips)}")
    if config.use_depth and depth_features is None:
        raise ShapeError("decoder: depth features are required when use_depth is set")
    scope = params.scope("decoder")
    z = deepest
    d = depth_features if config.use_depth else None
    for level in (3, 2, 1):
        level_params = scope.scope(f"level{level}")
        d_next = None
        if d is not None:
            z, d_next = adapter_forward(z, d, level_params.scope("adapter"))
        for j in range(config.blocks_at("decoder", level)):
            z = residual_block(z, level_params.scope(f"block{j}"))
        if level == 1:
            break
        skip = skips[level - 2]
        z = conv(upsample_nearest2x(z), level_params, "up")
        if z.shape != skip.shape:
            raise ShapeError(f"decoder level {level}: upsampled {z.shape} does not match skip {skip.shape}")
        z = conv(concat_channels([z, skip]), level_params, "fuse")
        if d_next is not None:
            # 1x1 conv and nearest upsampling commute; convolve at the lower resolution.
            d = upsample_nearest2x(conv(d_next, level_params.scope("adapter"), "propagate"))
    return z


def predict_and_reconstruct(
    decoder_out: Tensor,
    skip_details: List[Details],
    subbands: SubbandSet,
    config: ModelConfig,
    params: Params,
) -> Tensor:
    scope = params.scope("heads")
    bands = dict(zip(BANDS, subbands.bands()))
    for band in config.processed_bands:
        residual = conv(decoder_out, scope, band)
        if residual.shape != bands[band].shape:
            raise ShapeError(f"head '{band}' predicts {residual.shape}, sub-band is {bands[band].shape}")
        bands[band] = add(bands[band], residual)
    levels = config.decomposition_levels
    top = SubbandSet(**bands)
    # With a single level the top details are not predicted; skip_details already holds them.
    details = list(skip_details) if levels == 1 else list(skip_details) + [top.details]
    if len(details) != levels:
        raise ShapeError(f"{levels}-level reconstruction got {len(details)} detail levels")
    pyramid = WaveletPyramid(levels=levels, top_ll=top.ll, details=details)
    return reconstruct(pyramid, build_basis(config.wavelet))


def forward(image: Tensor, depth: Optional[DepthLike], config: ModelConfig, params: Params) -> Tensor:
    """Deblur ``image`` (values in [0, 1], sides divisible by ``config.spatial_multiple``)."""
    block = wavelet_transform_block(image, config, params)
    deepest, skips = encoder_forward(block.features, config, params)
    depth_features = None
    if config.use_depth:
        if depth is None:
            raise ShapeError("forward: this model needs a depth map (use_depth is set)")
        if isinstance(depth, DepthMap):
            depth = depth.tensor
        if depth.shape[0] != image.shape[0]:
            raise ShapeError(f"forward: depth batch {depth.shape[0]} differs from image batch {image.shape[0]}")
        _, width, h, w = deepest.shape
        depth_features = depth_encoder(depth, h, w, width, params.scope("depth_encoder"))
    elif depth is not None:
        logger.debug("forward: ignoring depth map for a depth-free model")
    out = decoder_forward(deepest, skips, depth_features, config, params)
    return predict_and_reconstruct(out, block.skip_details, block.subbands, config, params)
