# edibnet/model/params.py
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterator, List, Mapping, Optional, Tuple
import logging

import numpy as np

from ..errors import ShapeError
from ..tensor import DTYPE, Tensor
from .config import ModelConfig

logger = logging.getLogger(__name__)


class Init(str, Enum):
    FAN_IN = "fan_in"
    ZERO = "zero"
    ONE = "one"


@dataclass(frozen=True)
class ParamSpec:
    name: str
    shape: Tuple[int, int, int, int]
    init: Init

    @property
    def numel(self) -> int:
        return int(np.prod(self.shape))


class ParamStore:
    """
    Ordered name -> Tensor map holding every learnable tensor of a model.

    Iteration order is insertion order, which ``param_specs`` fixes from the
    config alone, so two stores built from the same config line up name by name.
    """

    def __init__(self, tensors: Optional[Mapping[str, Tensor]] = None):
        self._tensors: Dict[str, Tensor] = {}
        for name, tensor in (tensors or {}).items():
            self.add(name, tensor)

    def add(self, name: str, tensor: Tensor) -> None:
        if name in self._tensors:
            raise ShapeError(f"Duplicate parameter name: {name}")
        tensor.name = name
        tensor.requires_grad = True
        self._tensors[name] = tensor

    def __getitem__(self, name: str) -> Tensor:
        try:
            return self._tensors[name]
        except KeyError:
            raise KeyError(f"Unknown parameter: {name}") from None

    def __contains__(self, name: str) -> bool:
        return name in self._tensors

    def __len__(self) -> int:
        return len(self._tensors)

    def __iter__(self) -> Iterator[str]:
        return iter(self._tensors)

    def items(self):
        return self._tensors.items()

    def names(self) -> List[str]:
        return list(self._tensors)

    def count(self) -> int:
        """Total number of scalar parameters."""
        return sum(t.numel for t in self._tensors.values())

    def scope(self, prefix: str) -> "ParamScope":
        return ParamScope(self, prefix)

    def copy(self) -> "ParamStore":
        return ParamStore({name: Tensor(t.data.copy()) for name, t in self._tensors.items()})

    def group_counts(self) -> Dict[str, int]:
        """Scalar counts keyed by top-level group (wavelet, encoder, decoder, ...)."""
        counts: Dict[str, int] = {}
        for name, t in self._tensors.items():
            group = name.split(".", 1)[0]
            counts[group] = counts.get(group, 0) + t.numel
        return counts


class ParamScope:
    """Prefixed read-only view into a ParamStore."""

    def __init__(self, store: ParamStore, prefix: str):
        self.store = store
        self.prefix = prefix

    def __getitem__(self, name: str) -> Tensor:
        return self.store[f"{self.prefix}.{name}"]

    def __contains__(self, name: str) -> bool:
        return f"{self.prefix}.{name}" in self.store

    def scope(self, prefix: str) -> "ParamScope":
        return ParamScope(self.store, f"{self.prefix}.{prefix}")


class _SpecBuilder:
    def __init__(self):
        self.specs: List[ParamSpec] = []

    def conv(self, name: str, c_in: int, c_out: int, k: int, weight_init: Init = Init.FAN_IN) -> None:
        self.specs.append(ParamSpec(f"{name}.weight", (c_out, c_in, k, k), weight_init))
        self.specs.append(ParamSpec(f"{name}.bias", (1, c_out, 1, 1), Init.ZERO))

    def norm(self, name: str, width: int) -> None:
        self.specs.append(ParamSpec(f"{name}.scale", (1, width, 1, 1), Init.ONE))
        self.specs.append(ParamSpec(f"{name}.shift", (1, width, 1, 1), Init.ZERO))

    def residual_block(self, name: str, width: int) -> None:
        self.conv(f"{name}.conv1", width, width, 3)
        self.conv(f"{name}.conv2", width, width, 3)

    def attention(self, name: str, width: int, ratio: int) -> None:
        hidden = width // ratio
        self.conv(f"{name}.reduce", width, hidden, 1)
        self.conv(f"{name}.expand", hidden, width, 1)

    def adapter(self, name: str, width: int, next_width: Optional[int], ratio: int) -> None:
        self.norm(f"{name}.norm_z", width)
        self.norm(f"{name}.norm_d", width)
        self.conv(f"{name}.bias_z", width, width, 1)
        self.conv(f"{name}.bias_d", width, width, 1)
        self.conv(f"{name}.conv_a", width, width, 3)
        self.conv(f"{name}.conv_b", width, width, 3)
        self.conv(f"{name}.fusion", 2 * width, width, 3, weight_init=Init.ZERO)
        self.attention(f"{name}.attn", width, ratio)
        self.attention(f"{name}.attn_d", width, ratio)
        if next_width is not None:
            self.conv(f"{name}.propagate", width, next_width, 1)


def param_specs(config: ModelConfig) -> List[ParamSpec]:
    """Every parameter of ``config`` in canonical order with its shape and initializer."""
    b = _SpecBuilder()
    widths = config.level_channels
    d = config.base_channels

    bands = config.processed_bands
    per_band = d // len(bands)
    for band in bands:
        b.conv(f"wavelet.{band}", 3, per_band, 3)

    for level in (1, 2, 3):
        width = widths[level - 1]
        for j in range(config.blocks_at("encoder", level)):
            b.residual_block(f"encoder.level{level}.block{j}", width)
        if level < 3:
            b.conv(f"encoder.down{level}", width, widths[level], 3)

    if config.use_depth:
        b.conv("depth_encoder.conv1", 1, widths[2], 3)
        b.conv("depth_encoder.conv2", widths[2], widths[2], 3)

    for level in (3, 2, 1):
        width = widths[level - 1]
        below = widths[level - 2] if level > 1 else None
        prefix = f"decoder.level{level}"
        if config.use_depth:
            b.adapter(f"{prefix}.adapter", width, below, config.attention_ratio)
        for j in range(config.blocks_at("decoder", level)):
            b.residual_block(f"{prefix}.block{j}", width)
        if below is not None:
            b.conv(f"{prefix}.up", width, below, 3)
            b.conv(f"{prefix}.fuse", 2 * below, below, 1)

    for band in bands:
        b.conv(f"heads.{band}", d, 3, 3, weight_init=Init.ZERO)
    return b.specs


def count_params(config: ModelConfig) -> int:
    return sum(spec.numel for spec in param_specs(config))


def init_params(config: ModelConfig, seed: int = 0) -> ParamStore:
    """
    Fan-in uniform init U(-1/sqrt(fan_in), 1/sqrt(fan_in)) for conv weights.

    Biases, output heads and adapter fusion convs start at zero, so the
    freshly built network is the identity on its input.
    """
    rng = np.random.default_rng(seed)
    store = ParamStore()
    for spec in param_specs(config):
        if spec.init is Init.FAN_IN:
            fan_in = spec.shape[1] * spec.shape[2] * spec.shape[3]
            bound = 1.0 / np.sqrt(fan_in)
            data = rng.uniform(-bound, bound, size=spec.shape).astype(DTYPE)
        elif spec.init is Init.ONE:
            data = np.ones(spec.shape, dtype=DTYPE)
        else:
            data = np.zeros(spec.shape, dtype=DTYPE)
        store.add(spec.name, Tensor(data))
    logger.debug(f"init_params: {len(store)} tensors, {store.count()} scalars, seed={seed}")
    return store
