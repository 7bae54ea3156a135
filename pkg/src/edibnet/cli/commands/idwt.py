# edibnet/cli/commands/idwt.py
from pathlib import Path
import logging

from ...errors import DataError
from ...io import CropBox, crop, load_config_file, load_image, save_image
from ...tensor import Tensor
from ...wavelet import BASIS_NAMES, WaveletPyramid, build_basis, reconstruct
from .dwt import DETAIL_OFFSET, MANIFEST, band_file

logger = logging.getLogger(__name__)

HELP = "rebuild an image from the sub-band images written by dwt"


def add_arguments(parser):
    parser.add_argument("--in-dir", required=True, help="directory written by dwt")
    parser.add_argument("--out", required=True, help="output image")
    parser.add_argument("--wavelet", default=None, choices=BASIS_NAMES, help="defaults to the manifest's basis")


def _load_band(path: Path, channels: int) -> Tensor:
    band = load_image(path)
    if band.shape[1] != channels:
        raise DataError(f"{path}: expected {channels} channels, found {band.shape[1]}")
    return band


def run(args) -> None:
    in_dir = Path(args.in_dir)
    manifest_path = in_dir / MANIFEST
    if not manifest_path.is_file():
        raise DataError(f"--in-dir {in_dir}: no {MANIFEST}")
    manifest = load_config_file(manifest_path)
    try:
        levels = int(manifest["levels"])
        height, width = int(manifest["height"]), int(manifest["width"])
        channels, bit_depth = int(manifest["channels"]), int(manifest["bit_depth"])
    except (KeyError, ValueError) as e:
        raise DataError(f"{manifest_path}: malformed manifest ({e})") from e
    wavelet = args.wavelet or manifest.get("wavelet", "haar")

    top = _load_band(in_dir / band_file("ll", levels), channels)
    details = []
    for k in range(1, levels + 1):
        triple = tuple(
            Tensor((_load_band(in_dir / band_file(band, k), channels).data - DETAIL_OFFSET) * 2 ** k)
            for band in ("lh", "hl", "hh")
        )
        details.append(triple)
    pyramid = WaveletPyramid(levels=levels, top_ll=Tensor(top.data * 2 ** levels), details=details)
    image = crop(reconstruct(pyramid, build_basis(wavelet)), CropBox(0, 0, height, width))
    save_image(image, args.out, bit_depth)
    logger.info(f"idwt: {in_dir} -> {args.out}")
