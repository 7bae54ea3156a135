# edibnet/cli/commands/eval.py
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List
import logging

import numpy as np

from ...core import EDIBNet
from ...errors import ConfigError, DataError
from ...io import DepthNormalization, EvalPair, load_pairs
from ...metrics import psnr, ssim
from ...utils.messages import key_value_text, rows_text, write_report
from ..common import add_config_argument, add_depth_arguments, model_config, model_params

logger = logging.getLogger(__name__)

HELP = "PSNR/SSIM of deblurred pairs against their sharp references"
METRICS = ("psnr_blurred", "psnr_pred", "psnr_gain", "ssim_blurred", "ssim_pred", "ssim_gain")


def add_arguments(parser):
    parser.add_argument("--pairs", required=True, help="directory with blurred/, sharp/ and optional depth/")
    parser.add_argument("--weights", default=None, help="EDBW weight file (omitted: identity network)")
    add_config_argument(parser)
    parser.add_argument("--report", required=True, help="key=value report; a .json sibling is written too")
    parser.add_argument("--workers", type=int, default=1, help="pairs evaluated concurrently")
    add_depth_arguments(parser)


def evaluate_pair(pair: EvalPair, network: EDIBNet) -> Dict[str, float]:
    if network.uses_depth and pair.depth is None:
        raise DataError(f"Pair '{pair.name}' has no depth map but the model uses depth")
    pred = network.deblur(pair.blurred, pair.depth if network.uses_depth else None)
    row = {
        "psnr_blurred": psnr(pair.blurred, pair.sharp),
        "psnr_pred": psnr(pred, pair.sharp),
        "ssim_blurred": ssim(pair.blurred, pair.sharp),
        "ssim_pred": ssim(pred, pair.sharp),
    }
    row["psnr_gain"] = row["psnr_pred"] - row["psnr_blurred"]
    row["ssim_gain"] = row["ssim_pred"] - row["ssim_blurred"]
    logger.info(f"eval {pair.name}: PSNR {row['psnr_blurred']:.3f} -> {row['psnr_pred']:.3f} dB")
    return {key: row[key] for key in METRICS}


def aggregate(rows: List[Dict[str, float]]) -> Dict[str, float]:
    return {f"mean_{key}": float(np.mean([row[key] for row in rows])) for key in METRICS}


def run(args) -> None:
    if args.workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {args.workers}")
    config = model_config(args)
    network = EDIBNet(config, model_params(args.weights, config))
    pairs = load_pairs(args.pairs, DepthNormalization(args.depth_normalization), args.depth_units)

    # map() yields in submission order, so the report order never depends on scheduling.
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        rows = list(pool.map(lambda pair: evaluate_pair(pair, network), pairs))

    named = [{"name": pair.name, **row} for pair, row in zip(pairs, rows)]
    summary = {"pairs": len(pairs), **aggregate(rows)}
    text = key_value_text(summary) + rows_text(named, key="name")
    write_report(args.report, text, {**summary, "per_pair": named})
    logger.info(
        f"eval: {len(pairs)} pairs, mean PSNR {summary['mean_psnr_pred']:.3f} dB "
        f"(gain {summary['mean_psnr_gain']:+.3f} dB) -> {args.report}"
    )
