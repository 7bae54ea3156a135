# edibnet/io/depth.py
from enum import Enum
from pathlib import Path
from typing import Union
import logging

import numpy as np

from ..errors import ConfigError, DataError
from ..model import DepthMap
from ..tensor import Tensor
from .images import read_buffer

logger = logging.getLogger(__name__)

# Raw depth rasters store millimetres.
UNITS_PER_METER = 1000.0
FIXED_RANGE_METERS = 10.0


class DepthNormalization(str, Enum):
    PER_IMAGE_MAX = "max"
    FIXED_RANGE = "fixed"


def normalize_depth(
    meters: np.ndarray,
    normalization: DepthNormalization = DepthNormalization.PER_IMAGE_MAX,
    max_meters: float = FIXED_RANGE_METERS,
) -> np.ndarray:
    normalization = DepthNormalization(normalization)
    if normalization is DepthNormalization.FIXED_RANGE:
        return np.clip(meters / max_meters, 0.0, 1.0)
    peak = float(meters.max()) if meters.size else 0.0
    if peak <= 0.0:
        return np.zeros_like(meters)
    return meters / peak


def load_depth(
    path: Union[str, Path],
    normalization: DepthNormalization = DepthNormalization.PER_IMAGE_MAX,
    units_per_meter: float = UNITS_PER_METER,
    max_meters: float = FIXED_RANGE_METERS,
) -> DepthMap:
    """
    Read a single-channel 16-bit depth raster.

    Raw integers are divided by ``units_per_meter`` and then normalized to
    [0, 1] by the image's own maximum or by a fixed ``max_meters`` range.
    """
    if units_per_meter <= 0:
        raise ConfigError(f"units_per_meter must be > 0, got {units_per_meter}")
    buffer = read_buffer(path)
    if buffer.channels != 1:
        raise DataError(f"Depth file {path} has {buffer.channels} channels, expected 1")
    if buffer.bit_depth != 16:
        raise DataError(f"Depth file {path} is {buffer.bit_depth}-bit, expected 16-bit")
    meters = buffer.pixels.astype(np.float64) / units_per_meter
    normalized = normalize_depth(meters, normalization, max_meters)
    logger.debug(f"load_depth: {path} {meters.shape} range {meters.min():.3f}-{meters.max():.3f} m")
    return DepthMap(Tensor(normalized[None, None]))
