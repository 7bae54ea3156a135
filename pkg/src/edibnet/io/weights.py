# edibnet/io/weights.py
"""
EDBW weight container, little-endian throughout:

    b"EDBW" | u32 version (1) | u32 tensor_count
    per tensor: u32 name_len | UTF-8 name | u8 rank | rank x u32 dims | float32 data
"""
from pathlib import Path
from typing import Dict, Mapping, Optional, Union
import logging
import struct

import numpy as np

from ..errors import DataError
from ..model import ModelConfig, ParamStore, param_specs
from ..tensor import Tensor

logger = logging.getLogger(__name__)

MAGIC = b"EDBW"
VERSION = 1
FLOAT = np.dtype("<f4")

PathLike = Union[str, Path]
Arrays = Mapping[str, np.ndarray]


def encode_weights(arrays: Arrays) -> bytes:
    chunks = [MAGIC, struct.pack("<II", VERSION, len(arrays))]
    for name, array in arrays.items():
        raw = name.encode("utf-8")
        array = np.asarray(array)
        chunks.append(struct.pack("<I", len(raw)))
        chunks.append(raw)
        chunks.append(struct.pack("<B", array.ndim))
        chunks.append(struct.pack(f"<{array.ndim}I", *array.shape))
        chunks.append(np.ascontiguousarray(array, dtype=FLOAT).tobytes())
    return b"".join(chunks)


class _Reader:
    def __init__(self, blob: bytes, source: str):
        self.blob = blob
        self.source = source
        self.offset = 0

    def take(self, size: int, what: str) -> bytes:
        end = self.offset + size
        if end > len(self.blob):
            raise DataError(
                f"{self.source}: truncated while reading {what} (need {size} bytes at offset {self.offset}, "
                f"file has {len(self.blob)})"
            )
        chunk = self.blob[self.offset:end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def decode_weights(blob: bytes, source: str = "<bytes>") -> Dict[str, np.ndarray]:
    reader = _Reader(blob, source)
    if reader.take(4, "magic") != MAGIC:
        raise DataError(f"{source}: not an EDBW weight file (bad magic)")
    version, count = reader.unpack("<II", "header")
    if version != VERSION:
        raise DataError(f"{source}: unsupported container version {version}")
    arrays: Dict[str, np.ndarray] = {}
    for index in range(count):
        (name_len,) = reader.unpack("<I", f"name length of tensor {index}")
        try:
            name = reader.take(name_len, f"name of tensor {index}").decode("utf-8")
        except UnicodeDecodeError as e:
            raise DataError(f"{source}: tensor {index} name is not UTF-8") from e
        if name in arrays:
            raise DataError(f"{source}: duplicate tensor name '{name}'")
        (rank,) = reader.unpack("<B", f"rank of '{name}'")
        dims = reader.unpack(f"<{rank}I", f"dims of '{name}'")
        size = int(np.prod(dims)) if rank else 1
        data = reader.take(size * FLOAT.itemsize, f"data of '{name}'")
        arrays[name] = np.frombuffer(data, dtype=FLOAT).reshape(dims).astype(np.float32)
    if reader.offset != len(blob):
        raise DataError(f"{source}: {len(blob) - reader.offset} trailing bytes after {count} tensors")
    return arrays


def save_weights(arrays: Union[ParamStore, Arrays], path: PathLike) -> None:
    if isinstance(arrays, ParamStore):
        arrays = {name: t.data for name, t in arrays.items()}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_weights(arrays))
    logger.debug(f"save_weights: {len(arrays)} tensors -> {path}")


def load_weights(path: PathLike) -> Dict[str, np.ndarray]:
    path = Path(path)
    try:
        blob = path.read_bytes()
    except OSError as e:
        raise DataError(f"Cannot read weight file {path}: {e}") from e
    return decode_weights(blob, str(path))


def params_from_arrays(arrays: Arrays, config: ModelConfig, source: Optional[str] = None) -> ParamStore:
    """Build a ParamStore in canonical order, rejecting unknown, missing or misshaped tensors."""
    label = source or "weights"
    specs = param_specs(config)
    expected = {spec.name: spec.shape for spec in specs}
    unknown = [name for name in arrays if name not in expected]
    if unknown:
        raise DataError(f"{label}: unknown tensor names for this config: {', '.join(unknown)}")
    missing = [name for name in expected if name not in arrays]
    if missing:
        raise DataError(f"{label}: missing tensors: {', '.join(missing)}")
    store = ParamStore()
    for spec in specs:
        array = arrays[spec.name]
        if tuple(array.shape) != spec.shape:
            raise DataError(f"{label}: '{spec.name}' has shape {tuple(array.shape)}, expected {spec.shape}")
        store.add(spec.name, Tensor(np.array(array, dtype=np.float32)))
    return store


def load_params(path: PathLike, config: ModelConfig) -> ParamStore:
    return params_from_arrays(load_weights(path), config, str(path))
