# edibnet/model/config.py
from typing import Dict, Tuple
import logging

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator, model_validator

from ..errors import ConfigError
from ..wavelet import BANDS, SUPPORTED_LEVELS, WaveletName

logger = logging.getLogger(__name__)


def _split_ints(value):
    if isinstance(value, str):
        try:
            return tuple(int(part) for part in value.split(",") if part.strip())
        except ValueError as e:
            raise ValueError(f"expected comma-separated integers, got '{value}'") from e
    return value


class ModelConfig(BaseModel):
    """
    Structural hyperparameters of the network.

    ``encoder_blocks`` lists residual blocks per level from the shallowest
    (level 1) to the deepest; the deepest count includes the bottleneck.
    ``decoder_blocks`` is listed in execution order, deepest level first.
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    base_channels: int = 16
    decomposition_levels: int = 2
    wavelet: WaveletName = WaveletName.HAAR
    use_depth: bool = True
    encoder_blocks: Tuple[int, int, int] = (2, 2, 6)
    decoder_blocks: Tuple[int, int, int] = (6, 2, 2)
    attention_ratio: int = 2

    @field_validator("encoder_blocks", "decoder_blocks", mode="before")
    @classmethod
    def _parse_blocks(cls, value):
        return _split_ints(value)

    @field_validator("wavelet", mode="before")
    @classmethod
    def _lower_wavelet(cls, value):
        return value.lower() if isinstance(value, str) else value

    @field_validator("base_channels")
    @classmethod
    def _check_width(cls, value: int) -> int:
        if value < 4 or value % 4:
            raise ValueError(f"base_channels must be a positive multiple of 4, got {value}")
        return value

    @field_validator("decomposition_levels")
    @classmethod
    def _check_levels(cls, value: int) -> int:
        if value not in SUPPORTED_LEVELS:
            raise ValueError(f"decomposition_levels must be one of {SUPPORTED_LEVELS}, got {value}")
        return value

    @field_validator("encoder_blocks", "decoder_blocks")
    @classmethod
    def _check_blocks(cls, value: Tuple[int, int, int]) -> Tuple[int, int, int]:
        if any(count < 0 for count in value):
            raise ValueError(f"block counts must be non-negative, got {value}")
        return value

    @model_validator(mode="after")
    def _check_attention(self) -> "ModelConfig":
        if self.attention_ratio < 1 or self.base_channels % self.attention_ratio:
            raise ValueError(
                f"attention_ratio {self.attention_ratio} must divide base_channels {self.base_channels}"
            )
        return self

    @property
    def level_channels(self) -> Tuple[int, int, int]:
        d = self.base_channels
        return d, 2 * d, 4 * d

    @property
    def spatial_multiple(self) -> int:
        """Image sides must be multiples of this: 2^levels for the DWT times 4 for two strided convs."""
        return 2 ** self.decomposition_levels * 4

    @property
    def processed_bands(self) -> Tuple[str, ...]:
        """Top-level sub-bands that go through the network; a single level only feeds LL."""
        return ("ll",) if self.decomposition_levels == 1 else BANDS

    def blocks_at(self, part: str, level: int) -> int:
        if part == "encoder":
            return self.encoder_blocks[level - 1]
        return self.decoder_blocks[3 - level]


def build_model_config(**values) -> ModelConfig:
    """Validate ``values`` into a ModelConfig, reporting every failing field as a ConfigError."""
    try:
        return ModelConfig(**values)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"Invalid model config: {problems}") from e


PRESETS: Dict[str, ModelConfig] = {
    "channel16": ModelConfig(),
    "channel32": ModelConfig(base_channels=32),
    "nodepth": ModelConfig(use_depth=False),
    "level1": ModelConfig(decomposition_levels=1),
    "level3": ModelConfig(decomposition_levels=3),
}


def preset(name: str) -> ModelConfig:
    config = PRESETS.get(name.lower())
    if config is None:
        raise ConfigError(f"Unknown model preset: {name} (expected one of {', '.join(PRESETS)})")
    return config
