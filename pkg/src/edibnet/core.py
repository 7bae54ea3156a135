# edibnet/core.py
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Optional, Union
import logging

from .errors import ConfigError
from .io import (
    UNITS_PER_METER,
    DepthNormalization,
    crop,
    load_depth,
    load_params,
    pad_reflectless,
    resolve_model_config,
)
from .model import DepthLike, DepthMap, ModelConfig, ParamStore, forward, init_params

logger = logging.getLogger(__name__)

try:
    __version__ = version("edibnet")
except PackageNotFoundError:
    __version__ = "unknown"

PathLike = Union[str, Path]


class EDIBNet:
    """
    A configured network with its parameters.

    ``deblur`` accepts images of any size: they are edge-padded up to the
    model's spatial multiple and the output is cropped back.
    """

    def __init__(self, config: ModelConfig, params: Optional[ParamStore] = None, logger: logging.Logger = None):
        self.logger = logger or logging.getLogger(self.__class__.__name__)
        self.logger.debug(f"EDIBNet v{__version__}")
        self.config = config
        self.params = params if params is not None else init_params(config)

    @classmethod
    def from_files(cls, config: PathLike, weights: Optional[PathLike] = None, **kwargs) -> "EDIBNet":
        """``config`` is a preset name or a key=value file; without weights the network is the identity."""
        model_config = resolve_model_config(config)
        params = load_params(Path(weights), model_config) if weights is not None else None
        return cls(model_config, params, **kwargs)

    @property
    def uses_depth(self) -> bool:
        return self.config.use_depth

    def load_depth(
        self,
        path: PathLike,
        normalization: DepthNormalization = DepthNormalization.PER_IMAGE_MAX,
        units_per_meter: float = UNITS_PER_METER,
    ) -> DepthMap:
        return load_depth(path, normalization, units_per_meter)

    def deblur(self, image, depth: Optional[DepthLike] = None):
        if self.uses_depth and depth is None:
            raise ConfigError("This model configuration needs a depth map (use_depth=true)")
        if not self.uses_depth and depth is not None:
            self.logger.warning("Depth map ignored: the model does not use depth")
            depth = None
        padded, box = pad_reflectless(image, self.config.spatial_multiple)
        return crop(forward(padded, depth, self.config, self.params), box)
