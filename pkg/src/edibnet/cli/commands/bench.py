# edibnet/cli/commands/bench.py
import logging

from ...metrics import benchmark_forward
from ...utils.messages import write_report
from ..common import add_config_argument, model_config, model_params, parse_hw

logger = logging.getLogger(__name__)

HELP = "time repeated forward passes (median and IQR)"


def add_arguments(parser):
    add_config_argument(parser)
    parser.add_argument("--weights", default=None, help="EDBW weight file (omitted: freshly initialized)")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--image-hw", type=parse_hw, default=(1440, 1920), help="image size HxW")
    parser.add_argument("--depth-hw", type=parse_hw, default=(192, 256), help="depth size HxW")
    parser.add_argument("--seed", type=int, default=0, help="seed of the random input")
    parser.add_argument("--report", default=None, help="key=value report; a .json sibling is written too")


def run(args) -> None:
    config = model_config(args)
    params = model_params(args.weights, config)
    result = benchmark_forward(config, params, args.image_hw, args.depth_hw, repeats=args.repeats, seed=args.seed)
    text = result.to_text()
    if args.report:
        write_report(args.report, text, result.model_dump())
    else:
        print(text, end="")
