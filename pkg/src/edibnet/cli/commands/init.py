# edibnet/cli/commands/init.py
import logging

from ...io import save_weights
from ...model import init_params
from ..common import add_config_argument, model_config

logger = logging.getLogger(__name__)

HELP = "write freshly initialized weights (zero heads: the identity network)"


def add_arguments(parser):
    add_config_argument(parser)
    parser.add_argument("--out", required=True, help="EDBW weight file to write")
    parser.add_argument("--seed", type=int, default=0)


def run(args) -> None:
    config = model_config(args)
    params = init_params(config, seed=args.seed)
    save_weights(params, args.out)
    logger.info(f"init: {params.count()} parameters -> {args.out}")
