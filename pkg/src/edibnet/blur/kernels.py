# edibnet/blur/kernels.py
"""
Blur kernels stored as plain text:

    h w
    t00 t01 ... t0(w-1)
    ...

Sides are odd and at most 41. Taps must be non-negative with a positive sum;
they are normalized to unit sum on load.
"""
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, List, Union
import logging

import numpy as np

from ..errors import DataError

logger = logging.getLogger(__name__)

MAX_SIDE = 41
KERNEL_SUFFIX = ".txt"


@dataclass(frozen=True)
class BlurKernel:
    name: str
    taps: np.ndarray = field(repr=False)

    def __post_init__(self):
        taps = np.asarray(self.taps, dtype=np.float64)
        if taps.ndim != 2:
            raise DataError(f"Kernel '{self.name}' must be 2-D, got shape {taps.shape}")
        h, w = taps.shape
        if h % 2 == 0 or w % 2 == 0 or h > MAX_SIDE or w > MAX_SIDE:
            raise DataError(f"Kernel '{self.name}' sides must be odd and <= {MAX_SIDE}, got {h}x{w}")
        if not np.isfinite(taps).all():
            raise DataError(f"Kernel '{self.name}' holds non-finite taps")
        if (taps < 0).any():
            raise DataError(f"Kernel '{self.name}' has negative taps (min {taps.min():.4g})")
        total = taps.sum()
        if total <= 0:
            raise DataError(f"Kernel '{self.name}' is all zero")
        normalized = taps / total
        normalized.setflags(write=False)
        object.__setattr__(self, "taps", normalized)

    @property
    def shape(self):
        return self.taps.shape

    @classmethod
    def delta(cls, name: str = "delta", side: int = 1) -> "BlurKernel":
        taps = np.zeros((side, side))
        taps[side // 2, side // 2] = 1.0
        return cls(name, taps)

    @classmethod
    def box(cls, side: int, name: str = None) -> "BlurKernel":
        return cls(name or f"box{side}", np.ones((side, side)))


@dataclass(frozen=True)
class KernelBank:
    """Non-empty, ordered kernel list; index ``i`` always maps to the same kernel."""

    kernels: List[BlurKernel]

    def __post_init__(self):
        if not self.kernels:
            raise DataError("Kernel bank is empty")
        names = [k.name for k in self.kernels]
        if len(set(names)) != len(names):
            raise DataError(f"Kernel bank has duplicate names: {names}")

    def __len__(self) -> int:
        return len(self.kernels)

    def __getitem__(self, index: int) -> BlurKernel:
        return self.kernels[index]

    def __iter__(self) -> Iterator[BlurKernel]:
        return iter(self.kernels)

    def by_name(self, name: str) -> BlurKernel:
        for kernel in self.kernels:
            if kernel.name == name:
                return kernel
        raise DataError(f"No kernel named '{name}' in bank ({', '.join(k.name for k in self.kernels)})")


def parse_kernel(text: str, name: str) -> BlurKernel:
    lines = [line.split() for line in text.splitlines() if line.strip()]
    if not lines:
        raise DataError(f"Kernel file '{name}' is empty")
    try:
        h, w = (int(v) for v in lines[0])
    except ValueError as e:
        raise DataError(f"Kernel file '{name}': header must be 'h w', got {' '.join(lines[0])!r}") from e
    rows = lines[1:]
    if len(rows) != h or any(len(row) != w for row in rows):
        raise DataError(
            f"Kernel file '{name}': header says {h}x{w}, body has {len(rows)} rows of lengths {[len(r) for r in rows]}"
        )
    try:
        taps = np.array([[float(v) for v in row] for row in rows])
    except ValueError as e:
        raise DataError(f"Kernel file '{name}': non-numeric tap ({e})") from e
    return BlurKernel(name, taps)


def load_kernel(path: Union[str, Path]) -> BlurKernel:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise DataError(f"Cannot read kernel file {path}: {e}") from e
    return parse_kernel(text, path.stem)


def save_kernel(kernel: BlurKernel, path: Union[str, Path]) -> None:
    h, w = kernel.shape
    body = "\n".join(" ".join(f"{v:.9g}" for v in row) for row in kernel.taps)
    Path(path).write_text(f"{h} {w}\n{body}\n")


def load_kernel_bank(path: Union[str, Path]) -> KernelBank:
    """All ``*.txt`` kernels in ``path``, in filename order."""
    path = Path(path)
    if not path.is_dir():
        raise DataError(f"Kernel directory {path} does not exist")
    files = sorted(p for p in path.iterdir() if p.is_file() and p.suffix == KERNEL_SUFFIX)
    if not files:
        raise DataError(f"Kernel directory {path} holds no {KERNEL_SUFFIX} kernel files")
    bank = KernelBank([load_kernel(p) for p in files])
    logger.debug(f"Loaded {len(bank)} kernels from {path}: {[k.name for k in bank]}")
    return bank
