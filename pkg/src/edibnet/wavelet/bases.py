# edibnet/wavelet/bases.py
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Tuple, Union
import logging

import pywt

from ..errors import ConfigError

logger = logging.getLogger(__name__)


class WaveletName(str, Enum):
    HAAR = "haar"
    BIOR11 = "bior1.1"
    RBIO11 = "rbio1.1"


@dataclass(frozen=True)
class WaveletBasis:
    """
    Two-tap filter bank in PyWavelets tap order.

    Analysis of a pair (x[2i], x[2i+1]) gives
        lo = analysis_lo[1]·x[2i] + analysis_lo[0]·x[2i+1]
    and synthesis rebuilds
        x[2i]   = synthesis_lo[0]·lo + synthesis_hi[0]·hi
        x[2i+1] = synthesis_lo[1]·lo + synthesis_hi[1]·hi
    """

    name: WaveletName
    analysis_lo: Tuple[float, float]
    analysis_hi: Tuple[float, float]
    synthesis_lo: Tuple[float, float]
    synthesis_hi: Tuple[float, float]


BASIS_NAMES = tuple(member.value for member in WaveletName)


@lru_cache(maxsize=None)
def _build(name: WaveletName) -> WaveletBasis:
    try:
        w = pywt.Wavelet(name.value)
    except ValueError as e:
        raise ConfigError(f"PyWavelets does not know wavelet '{name.value}'") from e
    banks = [tuple(float(t) for t in taps) for taps in (w.dec_lo, w.dec_hi, w.rec_lo, w.rec_hi)]
    if any(len(taps) != 2 for taps in banks):
        raise ConfigError(f"Wavelet '{name.value}' is not a two-tap filter bank: lengths {[len(t) for t in banks]}")
    basis = WaveletBasis(name, *banks)
    logger.debug(f"Loaded wavelet basis {basis}")
    return basis


def build_basis(name: Union[str, WaveletName, WaveletBasis]) -> WaveletBasis:
    """
    Resolve "haar", "bior1.1" or "rbio1.1" (case-insensitive) to its filter bank.
    """
    if isinstance(name, WaveletBasis):
        return name
    try:
        key = WaveletName(name.lower() if isinstance(name, str) else name)
    except ValueError:
        raise ConfigError(f"Unknown wavelet basis: {name} (expected one of {', '.join(BASIS_NAMES)})")
    return _build(key)
