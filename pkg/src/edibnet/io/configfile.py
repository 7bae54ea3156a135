# edibnet/io/configfile.py
"""
Line-oriented ``key=value`` configuration files.

Blank lines and ``#`` comments are ignored; tuples are written
comma-separated (``encoder_blocks=2,2,6``). Values stay strings here and are
validated by the pydantic models they feed.
"""
from pathlib import Path
from typing import Dict, Mapping, Union
import logging

from pydantic import BaseModel

from ..errors import ConfigError
from ..model import PRESETS, ModelConfig, build_model_config

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def parse_config_text(text: str, source: str = "<config>") -> Dict[str, str]:
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key:
            raise ConfigError(f"{source}:{lineno}: expected 'key=value', got {raw.strip()!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key '{key}'")
        values[key] = value
    return values


def load_config_file(path: PathLike) -> Dict[str, str]:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    return parse_config_text(text, str(path))


def _format(value) -> str:
    if isinstance(value, (tuple, list)):
        return ",".join(str(v) for v in value)
    if isinstance(value, bool):
        return "true" if value else "false"
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def dump_config(model: BaseModel, path: PathLike = None) -> str:
    text = "".join(f"{key}={_format(value)}\n" for key, value in model.model_dump().items())
    if path is not None:
        Path(path).write_text(text)
    return text


def resolve_model_config(spec: PathLike, overrides: Mapping[str, str] = None) -> ModelConfig:
    """A preset name (``channel16``, ``nodepth`` ...) or the path of a key=value file."""
    values: Dict[str, str]
    if str(spec).lower() in PRESETS and not Path(spec).is_file():
        values = PRESETS[str(spec).lower()].model_dump()
    else:
        path = Path(spec)
        if not path.is_file():
            raise ConfigError(
                f"--config {spec}: neither a preset ({', '.join(PRESETS)}) nor an existing file"
            )
        values = load_config_file(path)
    values.update(overrides or {})
    return build_model_config(**values)
