# edibnet/cli/commands/blur.py
import logging

from ...blur import load_kernel_bank, make_pair
from ...io import read_buffer, save_image
from ..common import write_text

logger = logging.getLogger(__name__)

HELP = "blur an image with a kernel drawn from a kernel bank"


def add_arguments(parser):
    parser.add_argument("--in", dest="input", required=True, help="sharp input image")
    parser.add_argument("--kernels", required=True, help="directory of kernel .txt files")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True, help="blurred output image")
    parser.add_argument("--kernel-id-out", default=None, help="file receiving kernel_id=... and seed=...")


def run(args) -> None:
    buffer = read_buffer(args.input)
    bank = load_kernel_bank(args.kernels)
    pair = make_pair(buffer.to_tensor(), bank, args.seed)
    save_image(pair.blurred, args.out, buffer.bit_depth)
    if args.kernel_id_out:
        write_text(args.kernel_id_out, f"kernel_id={pair.kernel_id}\nseed={args.seed}\n")
    logger.info(f"blur: {args.input} -> {args.out} with kernel {pair.kernel_id}")
