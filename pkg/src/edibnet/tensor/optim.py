# edibnet/tensor/optim.py
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Dict
import logging

import numpy as np

from ..errors import ShapeError
from .tensor import DTYPE, GradientMap

if TYPE_CHECKING:
    from ..model.params import ParamStore

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    """First/second moment buffers keyed by parameter name, plus the number of steps taken."""

    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0

    @classmethod
    def for_params(cls, params: "ParamStore") -> "AdamState":
        return cls(
            m={name: np.zeros(t.shape, dtype=DTYPE) for name, t in params.items()},
            v={name: np.zeros(t.shape, dtype=DTYPE) for name, t in params.items()},
        )


def adam_step(
    params: "ParamStore",
    grads: GradientMap,
    state: AdamState,
    lr: float,
    beta1: float = 0.9,
    beta2: float = 0.999,
    eps: float = 1e-8,
    step: int = None,
) -> AdamState:
    """
    Bias-corrected Adam update applied in place to every tensor of ``params``.

    ``step`` is the 1-based step number used for bias correction; it defaults
    to ``state.step + 1``. Returns ``state`` (mutated) for chaining.
    """
    step = state.step + 1 if step is None else step
    if step < 1:
        raise ShapeError(f"adam_step: step must be >= 1, got {step}")
    c1 = 1.0 - beta1 ** step
    c2 = 1.0 - beta2 ** step
    for name, tensor in params.items():
        g = grads[tensor]
        m = state.m.setdefault(name, np.zeros(tensor.shape, dtype=DTYPE))
        v = state.v.setdefault(name, np.zeros(tensor.shape, dtype=DTYPE))
        if g.shape != tensor.shape or m.shape != tensor.shape or v.shape != tensor.shape:
            raise ShapeError(
                f"adam_step: '{name}' has shape {tensor.shape}, gradient {g.shape}, moments {m.shape}/{v.shape}"
            )
        g64 = g.astype(np.float64)
        m_new = beta1 * m.astype(np.float64) + (1.0 - beta1) * g64
        v_new = beta2 * v.astype(np.float64) + (1.0 - beta2) * g64 * g64
        m[...] = m_new
        v[...] = v_new
        if lr != 0.0:
            update = lr * (m_new / c1) / (np.sqrt(v_new / c2) + eps)
            tensor.data[...] = (tensor.data.astype(np.float64) - update).astype(DTYPE)
    state.step = step
    logger.debug(f"adam_step: step={step} lr={lr:.3e} over {len(params)} tensors")
    return state
