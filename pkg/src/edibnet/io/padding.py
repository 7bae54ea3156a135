# edibnet/io/padding.py
from typing import NamedTuple, Tuple

import numpy as np

from ..errors import ConfigError, ShapeError
from ..tensor import Tensor


class CropBox(NamedTuple):
    top: int
    left: int
    height: int
    width: int


def pad_reflectless(image: Tensor, multiple: int) -> Tuple[Tensor, CropBox]:
    """Edge-replicate pad on the right and bottom up to the next multiple of ``multiple``."""
    if multiple < 1:
        raise ConfigError(f"pad multiple must be >= 1, got {multiple}")
    _, _, h, w = image.shape
    pad_h = -h % multiple
    pad_w = -w % multiple
    box = CropBox(0, 0, h, w)
    if not pad_h and not pad_w:
        return image, box
    padded = np.pad(image.data, ((0, 0), (0, 0), (0, pad_h), (0, pad_w)), mode="edge")
    return Tensor(padded), box


def crop(image: Tensor, box: CropBox) -> Tensor:
    _, _, h, w = image.shape
    if box.top + box.height > h or box.left + box.width > w:
        raise ShapeError(f"Crop box {tuple(box)} exceeds image {h}x{w}")
    return Tensor(image.data[:, :, box.top:box.top + box.height, box.left:box.left + box.width])
