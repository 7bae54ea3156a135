# edibnet/training/sampling.py
from typing import NamedTuple, Optional, Tuple, Union
import logging

import numpy as np

from ..errors import ShapeError
from ..model import DepthMap
from ..tensor import Tensor, bilinear_matrix, resample_bilinear

logger = logging.getLogger(__name__)

DEFAULT_ALIGN = 16


class Patch(NamedTuple):
    image: Tensor
    depth: Optional[Tensor]
    top: int
    left: int


def depth_patch_size(patch: int, image_side: int, depth_side: int) -> int:
    """patch * depth_side / image_side rounded to a multiple of 4 (at least 4)."""
    return max(4, int(round(patch * depth_side / image_side / 4.0)) * 4)


def sample_offsets(h: int, w: int, patch: int, rng: np.random.Generator, align: int = DEFAULT_ALIGN) -> Tuple[int, int]:
    """Uniform crop origin on the grid of multiples of ``align`` that keeps the patch inside."""
    if h < patch or w < patch:
        raise ShapeError(f"Image {h}x{w} is smaller than the {patch}x{patch} patch")
    align = max(1, align)
    top = int(rng.integers((h - patch) // align + 1)) * align
    left = int(rng.integers((w - patch) // align + 1)) * align
    return top, left


def crop_depth(depth: Tensor, image_hw: Tuple[int, int], top: int, left: int, patch: int) -> Tensor:
    """Resample the depth region covering image rows [top, top+patch) and cols [left, left+patch)."""
    H, W = image_hw
    _, _, hd, wd = depth.shape
    out_h = depth_patch_size(patch, H, hd)
    out_w = depth_patch_size(patch, W, wd)
    rows = bilinear_matrix(hd, out_h, start=top * hd / H, extent=patch * hd / H)
    cols = bilinear_matrix(wd, out_w, start=left * wd / W, extent=patch * wd / W)
    return resample_bilinear(depth, rows, cols)


def sample_patch(
    image: Tensor,
    depth: Optional[Union[DepthMap, Tensor]],
    patch: int,
    rng: np.random.Generator,
    align: int = DEFAULT_ALIGN,
    margin: int = 0,
) -> Patch:
    """
    Random aligned ``patch`` x ``patch`` crop of ``image`` and the matching depth region.

    With ``margin`` > 0 the image crop carries that many extra pixels on every
    side, taken from the image or replicated from its nearest edge; ``top`` and
    ``left`` still locate the inner patch. The depth crop covers the inner
    patch's area (proportional coordinates) and is resampled to a fixed size of
    about patch * h_d / H.
    """
    if margin < 0:
        raise ShapeError(f"sample_patch: margin must be >= 0, got {margin}")
    _, _, H, W = image.shape
    top, left = sample_offsets(H, W, patch, rng, align)
    rows = np.clip(np.arange(top - margin, top + patch + margin), 0, H - 1)
    cols = np.clip(np.arange(left - margin, left + patch + margin), 0, W - 1)
    crop = Tensor(image.data[:, :, rows][:, :, :, cols])
    depth_crop = None
    if depth is not None:
        depth_tensor = depth.tensor if isinstance(depth, DepthMap) else depth
        depth_crop = crop_depth(depth_tensor, (H, W), top, left, patch)
    return Patch(crop, depth_crop, top, left)
