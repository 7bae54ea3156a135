# edibnet/blur/synth.py
from typing import NamedTuple, Sequence, Union
import logging

import numpy as np
from scipy.ndimage import convolve

from ..errors import ShapeError
from ..tensor import DTYPE, Tensor
from .kernels import BlurKernel, KernelBank

logger = logging.getLogger(__name__)

Seed = Union[int, Sequence[int]]


class BlurPair(NamedTuple):
    blurred: Tensor
    sharp: Tensor
    kernel_id: str


def apply_blur(x: Tensor, k: BlurKernel) -> Tensor:
    """y = k * x per (sample, channel) plane; true convolution with edge-replicating borders."""
    _, _, h, w = x.shape
    kh, kw = k.shape
    if kh > h or kw > w:
        raise ShapeError(f"Kernel '{k.name}' ({kh}x{kw}) is larger than the image ({h}x{w})")
    taps = k.taps[None, None]
    out = convolve(x.data.astype(np.float64), taps, mode="nearest")
    return Tensor(out.astype(DTYPE))


def choose_kernel(bank: KernelBank, rng_seed: Seed) -> BlurKernel:
    rng = np.random.default_rng(rng_seed)
    return bank[int(rng.integers(len(bank)))]


def make_pair(x: Tensor, bank: KernelBank, rng_seed: Seed) -> BlurPair:
    """Blur ``x`` with a kernel drawn uniformly from ``bank`` by a generator seeded with ``rng_seed``."""
    kernel = choose_kernel(bank, rng_seed)
    logger.debug(f"make_pair: seed={rng_seed} kernel={kernel.name} shape={x.shape}")
    return BlurPair(apply_blur(x, kernel), x, kernel.name)
