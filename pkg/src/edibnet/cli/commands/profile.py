# edibnet/cli/commands/profile.py
from enum import Enum
from typing import Dict, List
import logging

from ...metrics import count_complexity
from ...model import PRESETS, ModelConfig, build_model_config
from ...utils.messages import rows_text, write_report
from ...wavelet import BASIS_NAMES, SUPPORTED_LEVELS
from ..common import add_config_argument, model_config, parse_hw

logger = logging.getLogger(__name__)

HELP = "count parameters, FLOPs and peak activation memory of a forward pass"


class Sweep(str, Enum):
    LEVELS = "levels"
    WAVELETS = "wavelets"
    VARIANTS = "variants"


def add_arguments(parser):
    add_config_argument(parser)
    parser.add_argument("--image-hw", type=parse_hw, default=(1440, 1920), help="image size HxW")
    parser.add_argument("--depth-hw", type=parse_hw, default=(192, 256), help="depth size HxW")
    parser.add_argument("--report", required=True, help="key=value report; a .json sibling is written too")
    parser.add_argument(
        "--sweep",
        choices=[s.value for s in Sweep],
        default=None,
        help="also profile variants of --config across levels, wavelet bases or the named presets",
    )


def sweep_configs(base: ModelConfig, sweep: Sweep) -> Dict[str, ModelConfig]:
    values = base.model_dump()
    if sweep is Sweep.LEVELS:
        return {f"level{k}": build_model_config(**{**values, "decomposition_levels": k}) for k in SUPPORTED_LEVELS}
    if sweep is Sweep.WAVELETS:
        return {name: build_model_config(**{**values, "wavelet": name}) for name in BASIS_NAMES}
    return dict(PRESETS)


def run(args) -> None:
    config = model_config(args)
    report = count_complexity(config, args.image_hw, args.depth_hw)
    text = report.to_text()
    payload = report.model_dump()

    if args.sweep:
        rows: List[dict] = []
        for name, variant in sweep_configs(config, Sweep(args.sweep)).items():
            row = count_complexity(variant, args.image_hw, args.depth_hw)
            rows.append({"variant": name, "params": row.params, "flops": row.flops, "macs": row.macs,
                         "peak_activation_bytes": row.peak_activation_bytes})
            logger.info(f"profile {name}: params={row.params} flops={row.flops / 1e9:.2f}G")
        text += f"sweep={args.sweep}\n" + rows_text(rows, key="variant", prefix="sweep.")
        payload["sweep"] = rows

    write_report(args.report, text, payload)
    logger.info(f"profile: params={report.params} flops={report.flops / 1e9:.2f}G -> {args.report}")
