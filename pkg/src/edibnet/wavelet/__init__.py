from .bases import BASIS_NAMES, WaveletBasis, WaveletName, build_basis
from .transform import (
    BANDS,
    SUPPORTED_LEVELS,
    Details,
    SubbandSet,
    WaveletPyramid,
    decompose,
    dwt2,
    idwt2,
    reconstruct,
)

__all__ = [
    "BASIS_NAMES", "WaveletBasis", "WaveletName", "build_basis",
    "BANDS", "SUPPORTED_LEVELS", "Details", "SubbandSet", "WaveletPyramid",
    "decompose", "dwt2", "idwt2", "reconstruct",
]
