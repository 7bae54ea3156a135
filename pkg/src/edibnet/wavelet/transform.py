# edibnet/wavelet/transform.py
"""
Separable two-tap DWT/IDWT on (n, c, h, w) tensors.

Sub-band names follow row-then-column order: the first letter is the filter
applied along the vertical axis (h), the second along the horizontal axis
(w). LH is therefore low-pass vertically and high-pass horizontally.
Decimation keeps phase 0 (pairs start at even indices).
"""
from dataclasses import dataclass, field
from typing import List, Tuple, Union
import logging

import numpy as np

from ..errors import ConfigError, ShapeError
from ..tensor import Tensor, concat_channels, record_op, slice_channels
from .bases import WaveletBasis, WaveletName, build_basis

logger = logging.getLogger(__name__)

BANDS = ("ll", "lh", "hl", "hh")
SUPPORTED_LEVELS = (1, 2, 3)

Details = Tuple[Tensor, Tensor, Tensor]
BasisLike = Union[str, WaveletName, WaveletBasis]


@dataclass(frozen=True)
class SubbandSet:
    ll: Tensor
    lh: Tensor
    hl: Tensor
    hh: Tensor

    def __post_init__(self):
        shapes = {band: getattr(self, band).shape for band in BANDS}
        if len(set(shapes.values())) != 1:
            raise ShapeError(f"Sub-bands must share one shape, got {shapes}")

    @property
    def shape(self):
        return self.ll.shape

    @property
    def details(self) -> Details:
        return self.lh, self.hl, self.hh

    def bands(self) -> Tuple[Tensor, Tensor, Tensor, Tensor]:
        return self.ll, self.lh, self.hl, self.hh


@dataclass(frozen=True)
class WaveletPyramid:
    """``details[0]`` is the finest level (1), ``details[-1]`` the coarsest (levels)."""

    levels: int
    top_ll: Tensor
    details: List[Details] = field(default_factory=list)

    def __post_init__(self):
        if len(self.details) != self.levels:
            raise ShapeError(f"Pyramid declares {self.levels} levels but holds {len(self.details)} detail sets")
        n, c, h, w = self.top_ll.shape
        for k in range(self.levels - 1, -1, -1):
            for band in self.details[k]:
                if band.shape != (n, c, h, w):
                    raise ShapeError(
                        f"Level {k + 1} detail band has shape {band.shape}, expected {(n, c, h, w)}"
                    )
            h, w = 2 * h, 2 * w

    def top(self) -> SubbandSet:
        return SubbandSet(self.top_ll, *self.details[-1])


def _analyze_axis(x: np.ndarray, axis: int, lo_taps, hi_taps) -> Tuple[np.ndarray, np.ndarray]:
    even = np.take(x, np.arange(0, x.shape[axis], 2), axis=axis)
    odd = np.take(x, np.arange(1, x.shape[axis], 2), axis=axis)
    return lo_taps[1] * even + lo_taps[0] * odd, hi_taps[1] * even + hi_taps[0] * odd


def _synthesize_axis(lo: np.ndarray, hi: np.ndarray, axis: int, lo_taps, hi_taps) -> np.ndarray:
    even = lo_taps[0] * lo + hi_taps[0] * hi
    odd = lo_taps[1] * lo + hi_taps[1] * hi
    shape = list(lo.shape)
    shape[axis] *= 2
    out = np.empty(shape, dtype=lo.dtype)
    index = [slice(None)] * lo.ndim
    index[axis] = slice(0, None, 2)
    out[tuple(index)] = even
    index[axis] = slice(1, None, 2)
    out[tuple(index)] = odd
    return out


def _analysis2d(x: np.ndarray, lo, hi) -> np.ndarray:
    """(n, c, h, w) -> (n, 4c, h/2, w/2) stacked as [LL, LH, HL, HH]."""
    low, high = _analyze_axis(x, 2, lo, hi)
    ll, lh = _analyze_axis(low, 3, lo, hi)
    hl, hh = _analyze_axis(high, 3, lo, hi)
    return np.concatenate([ll, lh, hl, hh], axis=1)


def _synthesis2d(stacked: np.ndarray, lo, hi) -> np.ndarray:
    ll, lh, hl, hh = np.split(stacked, 4, axis=1)
    low = _synthesize_axis(ll, lh, 3, lo, hi)
    high = _synthesize_axis(hl, hh, 3, lo, hi)
    return _synthesize_axis(low, high, 2, lo, hi)


def _analysis_adjoint(g: np.ndarray, lo, hi) -> np.ndarray:
    # The transpose of analysis is synthesis run with the analysis taps.
    return _synthesis2d(g, (lo[1], lo[0]), (hi[1], hi[0]))


def _synthesis_adjoint(g: np.ndarray, lo, hi) -> np.ndarray:
    return _analysis2d(g, (lo[1], lo[0]), (hi[1], hi[0]))


def dwt2(x: Tensor, basis: BasisLike = WaveletName.HAAR) -> SubbandSet:
    """One analysis level; odd spatial sizes are rejected, never padded."""
    basis = build_basis(basis)
    n, c, h, w = x.shape
    if h % 2 or w % 2:
        raise ShapeError(f"dwt2 needs even spatial dimensions, got {h}x{w}")
    lo, hi = basis.analysis_lo, basis.analysis_hi
    out = _analysis2d(x.data.astype(np.float64), lo, hi)

    def vjp(g):
        return (_analysis_adjoint(g, lo, hi),)

    stacked = record_op("dwt2", (x,), out, vjp)
    return SubbandSet(*(slice_channels(stacked, k * c, (k + 1) * c) for k in range(4)))


def idwt2(s: SubbandSet, basis: BasisLike = WaveletName.HAAR) -> Tensor:
    basis = build_basis(basis)
    stacked = concat_channels(list(s.bands()))
    lo, hi = basis.synthesis_lo, basis.synthesis_hi
    out = _synthesis2d(stacked.data.astype(np.float64), lo, hi)

    def vjp(g):
        return (_synthesis_adjoint(g, lo, hi),)

    return record_op("idwt2", (stacked,), out, vjp)


def _check_levels(levels: int) -> None:
    if levels not in SUPPORTED_LEVELS:
        raise ConfigError(f"Unsupported decomposition level {levels}; expected one of {SUPPORTED_LEVELS}")


def decompose(x: Tensor, levels: int, basis: BasisLike = WaveletName.HAAR) -> WaveletPyramid:
    """Recursive analysis of the LL band, ``levels`` times."""
    _check_levels(levels)
    _, _, h, w = x.shape
    multiple = 2 ** levels
    if h % multiple or w % multiple:
        raise ShapeError(f"{levels}-level decomposition needs dimensions divisible by {multiple}, got {h}x{w}")
    basis = build_basis(basis)
    details: List[Details] = []
    current = x
    for _ in range(levels):
        bands = dwt2(current, basis)
        details.append(bands.details)
        current = bands.ll
    return WaveletPyramid(levels=levels, top_ll=current, details=details)


def reconstruct(p: WaveletPyramid, basis: BasisLike = WaveletName.HAAR) -> Tensor:
    basis = build_basis(basis)
    current = p.top_ll
    for lh, hl, hh in reversed(p.details):
        current = idwt2(SubbandSet(current, lh, hl, hh), basis)
    return current
