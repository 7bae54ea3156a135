# edibnet/io/images.py
from dataclasses import dataclass
from pathlib import Path
from typing import Union
import logging

import cv2
import numpy as np

from ..errors import DataError, ShapeError
from ..tensor import Tensor

logger = logging.getLogger(__name__)

SUPPORTED_SUFFIXES = (".ppm", ".pgm", ".pnm", ".png")
MAX_VALUE = {8: 255, 16: 65535}
DTYPES = {8: np.uint8, 16: np.uint16}

PathLike = Union[str, Path]


def _check_suffix(path: Path) -> None:
    if path.suffix.lower() not in SUPPORTED_SUFFIXES:
        raise DataError(f"Unsupported image format '{path.suffix}' for {path} (expected one of {SUPPORTED_SUFFIXES})")


@dataclass
class ImageBuffer:
    """Decoded raster: (h, w) for gray or (h, w, 3) RGB, 8- or 16-bit unsigned."""

    pixels: np.ndarray
    bit_depth: int

    def __post_init__(self):
        if self.bit_depth not in DTYPES:
            raise DataError(f"Unsupported bit depth {self.bit_depth} (expected 8 or 16)")
        if self.pixels.ndim == 3 and self.pixels.shape[2] == 1:
            self.pixels = self.pixels[:, :, 0]
        if self.pixels.ndim not in (2, 3) or (self.pixels.ndim == 3 and self.pixels.shape[2] != 3):
            raise DataError(f"Expected a gray or RGB raster, got pixel array of shape {self.pixels.shape}")

    @property
    def channels(self) -> int:
        return 1 if self.pixels.ndim == 2 else 3

    def to_tensor(self) -> Tensor:
        """(1, c, h, w) with values scaled to [0, 1]."""
        data = self.pixels.astype(np.float64) / MAX_VALUE[self.bit_depth]
        if data.ndim == 2:
            data = data[None]
        else:
            data = data.transpose(2, 0, 1)
        return Tensor(data[None])

    @classmethod
    def from_tensor(cls, tensor: Tensor, bit_depth: int = 8) -> "ImageBuffer":
        """Clamp to [0, 1] and quantize with round-half-up."""
        if bit_depth not in DTYPES:
            raise DataError(f"Unsupported bit depth {bit_depth} (expected 8 or 16)")
        n, c, _, _ = tensor.shape
        if n != 1 or c not in (1, 3):
            raise ShapeError(f"Can only encode a single gray or RGB image, got shape {tensor.shape}")
        top = MAX_VALUE[bit_depth]
        values = np.floor(np.clip(tensor.data[0].astype(np.float64), 0.0, 1.0) * top + 0.5)
        pixels = values.astype(DTYPES[bit_depth])
        pixels = pixels[0] if c == 1 else pixels.transpose(1, 2, 0)
        return cls(np.ascontiguousarray(pixels), bit_depth)


def read_buffer(path: PathLike) -> ImageBuffer:
    path = Path(path)
    _check_suffix(path)
    if not path.is_file():
        raise DataError(f"Image file {path} does not exist")
    pixels = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if pixels is None:
        raise DataError(f"Cannot decode image {path} (truncated or malformed)")
    if pixels.dtype == np.uint8:
        bit_depth = 8
    elif pixels.dtype == np.uint16:
        bit_depth = 16
    else:
        raise DataError(f"Unsupported sample type {pixels.dtype} in {path}")
    if pixels.ndim == 3 and pixels.shape[2] == 4:
        pixels = cv2.cvtColor(pixels, cv2.COLOR_BGRA2BGR)
    if pixels.ndim == 3 and pixels.shape[2] == 3:
        pixels = cv2.cvtColor(pixels, cv2.COLOR_BGR2RGB)
    logger.debug(f"read_buffer: {path} {pixels.shape} {bit_depth}-bit")
    return ImageBuffer(pixels, bit_depth)


def write_buffer(buffer: ImageBuffer, path: PathLike) -> None:
    path = Path(path)
    _check_suffix(path)
    pixels = buffer.pixels
    if buffer.channels == 1 and path.suffix.lower() == ".ppm":
        pixels = np.repeat(pixels[:, :, None], 3, axis=2)
    if pixels.ndim == 3:
        if path.suffix.lower() == ".pgm":
            raise DataError(f"Cannot store an RGB image in gray format: {path}")
        pixels = cv2.cvtColor(pixels, cv2.COLOR_RGB2BGR)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        ok = cv2.imwrite(str(path), pixels)
    except cv2.error as e:
        raise DataError(f"Cannot encode image {path}: {e}") from e
    if not ok:
        raise DataError(f"Cannot write image {path}")


def load_image(path: PathLike) -> Tensor:
    """(1, c, h, w) tensor in [0, 1]; c is 3 for colour and 1 for gray files."""
    return read_buffer(path).to_tensor()


def save_image(tensor: Tensor, path: PathLike, bit_depth: int = 8) -> None:
    write_buffer(ImageBuffer.from_tensor(tensor, bit_depth), path)


def load_rgb(path: PathLike) -> Tensor:
    """Like load_image, but gray files are expanded to three identical channels."""
    image = load_image(path)
    if image.shape[1] == 1:
        image = Tensor(np.repeat(image.data, 3, axis=1))
    return image
