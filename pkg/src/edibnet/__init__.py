# edibnet/__init__.py

from .core import EDIBNet, __version__
from .errors import ConfigError, DataError, EdibnetError, NumericError, ShapeError, TapeError
from .model import ModelConfig, forward, init_params
from .wavelet import WaveletName, decompose, reconstruct

__all__ = [
    "EDIBNet", "__version__",
    "ConfigError", "DataError", "EdibnetError", "NumericError", "ShapeError", "TapeError",
    "ModelConfig", "forward", "init_params",
    "WaveletName", "decompose", "reconstruct",
]
