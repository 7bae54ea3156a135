# edibnet/training/checkpoint.py
"""
A checkpoint is three files side by side:

    W           EDBW parameters
    W.optim     EDBW optimizer moments, tensors named m.<param> and v.<param>
    W.json      step counters and the config hash
"""
from dataclasses import dataclass
from pathlib import Path
from typing import Union
import json
import logging

from ..errors import DataError
from ..io import load_weights, params_from_arrays, save_weights
from ..model import ModelConfig, ParamStore
from ..tensor import AdamState

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


@dataclass
class Checkpoint:
    params: ParamStore
    optimizer: AdamState
    step: int
    config_hash: str


def sidecar_paths(path: PathLike):
    path = Path(path)
    return path.with_name(path.name + ".optim"), path.with_name(path.name + ".json")


def save_checkpoint(checkpoint: Checkpoint, path: PathLike) -> None:
    path = Path(path)
    optim_path, meta_path = sidecar_paths(path)
    save_weights(checkpoint.params, path)
    moments = {}
    for name in checkpoint.params.names():
        moments[f"m.{name}"] = checkpoint.optimizer.m[name]
        moments[f"v.{name}"] = checkpoint.optimizer.v[name]
    save_weights(moments, optim_path)
    meta = {
        "step": checkpoint.step,
        "adam_step": checkpoint.optimizer.step,
        "config_hash": checkpoint.config_hash,
    }
    meta_path.write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    logger.info(f"Saved checkpoint at step {checkpoint.step} to {path}")


def load_checkpoint(path: PathLike, config: ModelConfig) -> Checkpoint:
    path = Path(path)
    optim_path, meta_path = sidecar_paths(path)
    params = params_from_arrays(load_weights(path), config, str(path))
    if not optim_path.is_file() or not meta_path.is_file():
        raise DataError(f"Checkpoint {path} lacks its sidecars ({optim_path.name}, {meta_path.name})")
    moments = load_weights(optim_path)
    state = AdamState()
    for name, tensor in params.items():
        for kind, target in (("m", state.m), ("v", state.v)):
            key = f"{kind}.{name}"
            if key not in moments:
                raise DataError(f"{optim_path}: missing optimizer tensor '{key}'")
            if moments[key].shape != tensor.shape:
                raise DataError(f"{optim_path}: '{key}' has shape {moments[key].shape}, expected {tensor.shape}")
            target[name] = moments[key].copy()
    extra = set(moments) - {f"{k}.{n}" for n in params.names() for k in ("m", "v")}
    if extra:
        raise DataError(f"{optim_path}: unknown optimizer tensors: {', '.join(sorted(extra))}")
    try:
        meta = json.loads(meta_path.read_text())
        step, adam_step, config_hash = int(meta["step"]), int(meta["adam_step"]), str(meta["config_hash"])
    except (ValueError, KeyError, TypeError) as e:
        raise DataError(f"Malformed checkpoint metadata {meta_path}: {e}") from e
    state.step = adam_step
    return Checkpoint(params=params, optimizer=state, step=step, config_hash=config_hash)
