# edibnet/io/dataset.py
"""
Directory layouts read by the training and evaluation commands.

Training data::

    DATA/<name>.png|ppm          sharp RGB images
    DATA/depth/<name>.png        optional 16-bit depth, same stem

Evaluation pairs::

    PAIRS/blurred/<name>.png     observed images
    PAIRS/sharp/<name>.png       ground truth, same stem
    PAIRS/depth/<name>.png       optional depth
"""
from pathlib import Path
from typing import List, NamedTuple, Optional, Union
import logging

from ..errors import DataError
from ..model import DepthMap
from ..tensor import Tensor
from .depth import UNITS_PER_METER, DepthNormalization, load_depth
from .images import SUPPORTED_SUFFIXES, load_rgb

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


class TrainSample(NamedTuple):
    name: str
    image: Tensor
    depth: Optional[DepthMap]


class EvalPair(NamedTuple):
    name: str
    blurred: Tensor
    sharp: Tensor
    depth: Optional[DepthMap]


def list_images(directory: PathLike) -> List[Path]:
    directory = Path(directory)
    if not directory.is_dir():
        raise DataError(f"Image directory {directory} does not exist")
    return sorted(p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in SUPPORTED_SUFFIXES)


def _find_depth(
    directory: Path, stem: str, normalization: DepthNormalization, units_per_meter: float
) -> Optional[DepthMap]:
    for suffix in SUPPORTED_SUFFIXES:
        candidate = directory / f"{stem}{suffix}"
        if candidate.is_file():
            return load_depth(candidate, normalization, units_per_meter)
    return None


def load_dataset(
    directory: PathLike,
    normalization: DepthNormalization = DepthNormalization.PER_IMAGE_MAX,
    units_per_meter: float = UNITS_PER_METER,
) -> List[TrainSample]:
    directory = Path(directory)
    files = list_images(directory)
    if not files:
        raise DataError(f"Training directory {directory} holds no images")
    depth_dir = directory / "depth"
    samples = []
    for path in files:
        depth = _find_depth(depth_dir, path.stem, normalization, units_per_meter) if depth_dir.is_dir() else None
        samples.append(TrainSample(path.stem, load_rgb(path), depth))
    logger.info(
        f"Loaded {len(samples)} training images from {directory} "
        f"({sum(s.depth is not None for s in samples)} with depth)"
    )
    return samples


def load_pairs(
    directory: PathLike,
    normalization: DepthNormalization = DepthNormalization.PER_IMAGE_MAX,
    units_per_meter: float = UNITS_PER_METER,
) -> List[EvalPair]:
    directory = Path(directory)
    blurred_dir, sharp_dir, depth_dir = directory / "blurred", directory / "sharp", directory / "depth"
    files = list_images(blurred_dir)
    if not files:
        raise DataError(f"Pair directory {blurred_dir} holds no images")
    pairs = []
    for path in files:
        sharp_path = next(
            (sharp_dir / f"{path.stem}{s}" for s in SUPPORTED_SUFFIXES if (sharp_dir / f"{path.stem}{s}").is_file()),
            None,
        )
        if sharp_path is None:
            raise DataError(f"No sharp image for {path.name} in {sharp_dir}")
        blurred, sharp = load_rgb(path), load_rgb(sharp_path)
        if blurred.shape != sharp.shape:
            raise DataError(f"{path.name}: blurred {blurred.shape} and sharp {sharp.shape} sizes differ")
        depth = _find_depth(depth_dir, path.stem, normalization, units_per_meter) if depth_dir.is_dir() else None
        pairs.append(EvalPair(path.stem, blurred, sharp, depth))
    return pairs
