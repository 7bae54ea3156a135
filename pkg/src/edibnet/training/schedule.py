# edibnet/training/schedule.py
import math

from ..errors import ConfigError


def cosine_lr(step: int, total_steps: int, lr0: float) -> float:
    """lr0 * (1 + cos(pi * step / total_steps)) / 2"""
    if total_steps < 0 or not 0 <= step <= total_steps:
        raise ConfigError(f"cosine_lr: step {step} outside [0, {total_steps}]")
    if total_steps == 0:
        return lr0
    return lr0 * (1.0 + math.cos(math.pi * step / total_steps)) / 2.0
