# edibnet/training/config.py
from typing import Optional
import hashlib

from pydantic import BaseModel, ConfigDict, ValidationError, field_validator

from ..errors import ConfigError
from ..model import ModelConfig


class TrainConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    lr0: float = 1e-4
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 50
    patch: int = 256
    batch: int = 4
    cosine_weight: float = 0.1
    seed: int = 0
    # Overrides epochs * steps_per_epoch when set.
    max_steps: Optional[int] = None
    val_images: int = 0
    prefetch: int = 2

    @field_validator("lr0")
    @classmethod
    def _positive_lr(cls, value: float) -> float:
        if value <= 0:
            raise ValueError(f"lr0 must be > 0, got {value}")
        return value

    @field_validator("beta1", "beta2")
    @classmethod
    def _beta_range(cls, value: float) -> float:
        if not 0.0 <= value < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {value}")
        return value

    @field_validator("cosine_weight")
    @classmethod
    def _non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError(f"cosine_weight must be >= 0, got {value}")
        return value

    @field_validator("epochs", "patch", "batch")
    @classmethod
    def _positive(cls, value: int) -> int:
        if value < 1:
            raise ValueError(f"must be >= 1, got {value}")
        return value

    @field_validator("val_images", "prefetch")
    @classmethod
    def _count(cls, value: int) -> int:
        if value < 0:
            raise ValueError(f"must be >= 0, got {value}")
        return value

    def check_model(self, model: ModelConfig) -> None:
        if self.patch % model.spatial_multiple:
            raise ConfigError(
                f"patch {self.patch} must be divisible by {model.spatial_multiple} "
                f"(2^{model.decomposition_levels} x 4) for this model"
            )

    def config_hash(self, model: Optional[ModelConfig] = None) -> str:
        """sha256 over the canonical JSON of this config (and the model's, when given)."""
        payload = self.model_dump_json()
        if model is not None:
            payload += model.model_dump_json()
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def build_train_config(**values) -> TrainConfig:
    try:
        return TrainConfig(**values)
    except ValidationError as e:
        problems = "; ".join(f"{'.'.join(str(p) for p in err['loc']) or 'config'}: {err['msg']}" for err in e.errors())
        raise ConfigError(f"Invalid train config: {problems}") from e
