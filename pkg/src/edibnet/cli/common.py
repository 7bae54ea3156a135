# edibnet/cli/common.py
from pathlib import Path
from typing import Optional, Tuple
import argparse
import logging

from ..errors import ConfigError
from ..io import UNITS_PER_METER, DepthNormalization, load_params, resolve_model_config
from ..model import ModelConfig, ParamStore, init_params
from ..utils.messages import missing_weights_message

logger = logging.getLogger(__name__)


def parse_hw(text: str) -> Tuple[int, int]:
    """'1440x1920' -> (1440, 1920)"""
    try:
        h, w = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxW such as 1440x1920, got '{text}'")
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError(f"sizes must be positive, got '{text}'")
    return h, w


def add_config_argument(parser: argparse.ArgumentParser, required: bool = True) -> None:
    parser.add_argument(
        "--config",
        required=required,
        default=None if required else "channel16",
        help="model preset (channel16, channel32, nodepth, level1, level3) or key=value file",
    )


def add_depth_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--depth-normalization",
        choices=[m.value for m in DepthNormalization],
        default=DepthNormalization.PER_IMAGE_MAX.value,
        help="scale depth by each image's maximum or by a fixed 0-10 m range",
    )
    parser.add_argument(
        "--depth-units",
        type=float,
        default=UNITS_PER_METER,
        help="raw depth integers per metre (default: millimetres)",
    )


def model_config(args) -> ModelConfig:
    try:
        return resolve_model_config(args.config)
    except ConfigError as e:
        raise ConfigError(f"--config {args.config}: {e}") from e


def model_params(weights: Optional[str], config: ModelConfig) -> ParamStore:
    if weights is None:
        logger.warning(missing_weights_message())
        return init_params(config)
    return load_params(Path(weights), config)


def write_text(path: Path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
