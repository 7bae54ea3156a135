# edibnet/tensor/tensor.py
from contextvars import ContextVar
from dataclasses import dataclass
from typing import Callable, Dict, Iterator, Optional, Sequence, Tuple
import logging

import numpy as np

from ..errors import NumericError, ShapeError, TapeError

logger = logging.getLogger(__name__)

DTYPE = np.float32
SCALAR_SHAPE = (1, 1, 1, 1)

VJP = Callable[[np.ndarray], Sequence[Optional[np.ndarray]]]


class Tensor:
    """
    Dense rank-4 float32 array laid out as (n, c, h, w).

    Values are checked for finiteness on construction, so a NaN or Inf never
    travels silently through a pipeline. Tensors are treated as immutable
    values; only the optimizer rewrites parameter data in place.
    """

    __slots__ = ("data", "requires_grad", "name")

    def __init__(self, data, requires_grad: bool = False, name: Optional[str] = None):
        arr = np.ascontiguousarray(data, dtype=DTYPE)
        if arr.ndim != 4:
            raise ShapeError(f"Tensor must be rank 4 (n, c, h, w), got shape {arr.shape}")
        if not np.isfinite(arr).all():
            bad = int(arr.size - np.count_nonzero(np.isfinite(arr)))
            label = f" '{name}'" if name else ""
            raise NumericError(f"Tensor{label} of shape {arr.shape} holds {bad} non-finite values")
        self.data = arr
        self.requires_grad = requires_grad
        self.name = name

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return tuple(self.data.shape)

    @property
    def numel(self) -> int:
        return int(self.data.size)

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.shape != SCALAR_SHAPE:
            raise ShapeError(f"item() needs a scalar tensor, got shape {self.shape}")
        return float(self.data.reshape(()))

    @classmethod
    def zeros(cls, shape, requires_grad: bool = False, name: Optional[str] = None) -> "Tensor":
        return cls(np.zeros(shape, dtype=DTYPE), requires_grad=requires_grad, name=name)

    @classmethod
    def scalar(cls, value: float) -> "Tensor":
        return cls(np.full(SCALAR_SHAPE, value, dtype=DTYPE))

    def __repr__(self) -> str:
        label = f" name={self.name!r}" if self.name else ""
        return f"Tensor(shape={self.shape}{label}, requires_grad={self.requires_grad})"


@dataclass
class TapeRecord:
    op: str
    inputs: Tuple[Tensor, ...]
    output: Tensor
    vjp: VJP


_ACTIVE_TAPE: ContextVar[Optional["GradTape"]] = ContextVar("edibnet_active_tape", default=None)


class GradTape:
    """
    Ordered record of the primitive operations run inside a ``with`` block.

    Operations append themselves as they execute, so the record order is a
    topological order and a single reversed pass visits every operation after
    all of its consumers. A tape is meant to be rebuilt for every forward pass.
    """

    def __init__(self):
        self.records: list[TapeRecord] = []
        self._outputs: Dict[int, Tensor] = {}
        self._token = None

    def __enter__(self) -> "GradTape":
        self._token = _ACTIVE_TAPE.set(self)
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        _ACTIVE_TAPE.reset(self._token)
        self._token = None

    def __len__(self) -> int:
        return len(self.records)

    def record(self, entry: TapeRecord) -> None:
        self.records.append(entry)
        self._outputs[id(entry.output)] = entry.output

    def produced(self, tensor: Tensor) -> bool:
        return self._outputs.get(id(tensor)) is tensor


def active_tape() -> Optional[GradTape]:
    return _ACTIVE_TAPE.get()


def record_op(op: str, inputs: Sequence[Tensor], out_data: np.ndarray, vjp: VJP) -> Tensor:
    """Wrap ``out_data`` as a Tensor and log it on the active tape when any input needs a gradient."""
    try:
        out = Tensor(out_data)
    except NumericError as e:
        raise NumericError(f"{op} produced non-finite output: {e}") from e
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        out.requires_grad = True
        tape.record(TapeRecord(op=op, inputs=tuple(inputs), output=out, vjp=vjp))
    return out


class GradientMap:
    """
    Gradients keyed by tensor identity.

    Looking up a tensor that was never reached by the reverse sweep yields a
    zero array of the tensor's shape.
    """

    def __init__(self, entries: Dict[int, Tuple[Tensor, np.ndarray]]):
        self._entries = entries

    def __getitem__(self, tensor: Tensor) -> np.ndarray:
        entry = self._entries.get(id(tensor))
        if entry is None or entry[0] is not tensor:
            return np.zeros(tensor.shape, dtype=DTYPE)
        return entry[1]

    def __contains__(self, tensor: Tensor) -> bool:
        entry = self._entries.get(id(tensor))
        return entry is not None and entry[0] is tensor

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Tensor]:
        return (tensor for tensor, _ in self._entries.values())


def backward(tape: GradTape, loss: Tensor) -> GradientMap:
    """Run the reverse sweep from a scalar ``loss`` and collect gradients of every tensor on its path."""
    if loss.shape != SCALAR_SHAPE:
        raise ShapeError(f"backward needs a scalar loss of shape {SCALAR_SHAPE}, got {loss.shape}")
    if not tape.produced(loss):
        raise TapeError("loss tensor was not recorded on this tape")

    grads: Dict[int, Tuple[Tensor, np.ndarray]] = {
        id(loss): (loss, np.ones(SCALAR_SHAPE, dtype=np.float64)),
    }
    for entry in reversed(tape.records):
        upstream = grads.get(id(entry.output))
        if upstream is None:
            continue
        input_grads = entry.vjp(upstream[1])
        for tensor, grad in zip(entry.inputs, input_grads):
            if grad is None or not tensor.requires_grad:
                continue
            if grad.shape != tensor.shape:
                raise ShapeError(
                    f"{entry.op} returned gradient of shape {grad.shape} for input of shape {tensor.shape}"
                )
            existing = grads.get(id(tensor))
            if existing is None:
                grads[id(tensor)] = (tensor, np.array(grad, dtype=np.float64))
            else:
                np.add(existing[1], grad, out=existing[1])

    result: Dict[int, Tuple[Tensor, np.ndarray]] = {}
    for key, (tensor, grad) in grads.items():
        if not np.isfinite(grad).all():
            raise NumericError(f"non-finite gradient for tensor {tensor.name or tensor.shape}")
        result[key] = (tensor, grad.astype(DTYPE))
    logger.debug(f"backward: {len(tape.records)} ops, {len(result)} gradients")
    return GradientMap(result)
