# edibnet/cli/commands/deblur.py
import logging

from ...core import EDIBNet
from ...io import DepthNormalization, load_rgb, read_buffer, save_image
from ..common import add_config_argument, add_depth_arguments, model_config, model_params

logger = logging.getLogger(__name__)

HELP = "deblur an image with trained weights"


def add_arguments(parser):
    parser.add_argument("--in", dest="input", required=True, help="blurred input image")
    parser.add_argument("--depth", default=None, help="16-bit depth raster (required by depth models)")
    parser.add_argument("--weights", required=True, help="EDBW weight file")
    add_config_argument(parser)
    parser.add_argument("--out", required=True, help="output image")
    add_depth_arguments(parser)


def run(args) -> None:
    config = model_config(args)
    network = EDIBNet(config, model_params(args.weights, config))
    bit_depth = read_buffer(args.input).bit_depth
    depth = None
    if args.depth is not None:
        depth = network.load_depth(args.depth, DepthNormalization(args.depth_normalization), args.depth_units)
    save_image(network.deblur(load_rgb(args.input), depth), args.out, bit_depth)
    logger.info(f"deblur: {args.input} -> {args.out}")
