from enum import Enum
from importlib import import_module

from ...errors import ConfigError


class Command(str, Enum):
    DWT = "dwt"
    IDWT = "idwt"
    BLUR = "blur"
    DEBLUR = "deblur"
    TRAIN = "train"
    EVAL = "eval"
    PROFILE = "profile"
    BENCH = "bench"
    INIT = "init"


def make_command(name: str):
    """The module implementing subcommand ``name``; it exposes HELP, add_arguments and run."""
    try:
        Command(name)
        return import_module(f".{name}", __package__)
    except (ValueError, ModuleNotFoundError):
        raise ConfigError(f"Unknown command: {name}")
