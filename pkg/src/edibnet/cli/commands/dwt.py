# edibnet/cli/commands/dwt.py
"""
Sub-band images are 16-bit PNGs. The top LL band is divided by 2^L; detail
bands of level k are divided by 2^k and offset by 0.5 so zero maps to mid-grey.
A manifest.txt next to them records what idwt needs to invert the scaling.
"""
from pathlib import Path
import logging

from ...io import pad_reflectless, read_buffer, save_image
from ...tensor import Tensor
from ...wavelet import BASIS_NAMES, SUPPORTED_LEVELS, build_basis, decompose
from ..common import write_text

logger = logging.getLogger(__name__)

HELP = "decompose an image into wavelet sub-band images"
MANIFEST = "manifest.txt"
DETAIL_OFFSET = 0.5
BAND_BITS = 16


def band_file(band: str, level: int) -> str:
    return f"{band}{level}.png"


def encode_ll(values, levels: int) -> Tensor:
    return Tensor(values / 2 ** levels)


def encode_detail(values, level: int) -> Tensor:
    return Tensor(values / 2 ** level + DETAIL_OFFSET)


def add_arguments(parser):
    parser.add_argument("--in", dest="input", required=True, help="input image (.ppm/.pgm/.png)")
    parser.add_argument("--out-dir", required=True, help="directory for the sub-band images")
    parser.add_argument("--wavelet", default="haar", choices=BASIS_NAMES)
    parser.add_argument("--levels", type=int, default=2, choices=SUPPORTED_LEVELS)


def run(args) -> None:
    out_dir = Path(args.out_dir)
    buffer = read_buffer(args.input)
    image = buffer.to_tensor()
    padded, box = pad_reflectless(image, 2 ** args.levels)
    pyramid = decompose(padded, args.levels, build_basis(args.wavelet))

    save_image(encode_ll(pyramid.top_ll.data, args.levels), out_dir / band_file("ll", args.levels), BAND_BITS)
    for k, details in enumerate(pyramid.details, start=1):
        for band, tensor in zip(("lh", "hl", "hh"), details):
            save_image(encode_detail(tensor.data, k), out_dir / band_file(band, k), BAND_BITS)

    manifest = {
        "levels": args.levels,
        "wavelet": args.wavelet,
        "height": box.height,
        "width": box.width,
        "channels": image.shape[1],
        "bit_depth": buffer.bit_depth,
    }
    write_text(out_dir / MANIFEST, "".join(f"{k}={v}\n" for k, v in manifest.items()))
    logger.info(f"dwt: {args.input} -> {out_dir} ({args.levels} levels, {args.wavelet})")
