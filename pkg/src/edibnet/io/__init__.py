from .images import ImageBuffer, load_image, load_rgb, read_buffer, save_image, write_buffer
from .depth import UNITS_PER_METER, DepthNormalization, load_depth, normalize_depth
from .weights import (
    decode_weights,
    encode_weights,
    load_params,
    load_weights,
    params_from_arrays,
    save_weights,
)
from .padding import CropBox, crop, pad_reflectless
from .configfile import dump_config, load_config_file, parse_config_text, resolve_model_config
from .dataset import EvalPair, TrainSample, list_images, load_dataset, load_pairs

__all__ = [
    "ImageBuffer", "load_image", "load_rgb", "read_buffer", "save_image", "write_buffer",
    "UNITS_PER_METER", "DepthNormalization", "load_depth", "normalize_depth",
    "decode_weights", "encode_weights", "load_params", "load_weights", "params_from_arrays", "save_weights",
    "CropBox", "crop", "pad_reflectless",
    "dump_config", "load_config_file", "parse_config_text", "resolve_model_config",
    "EvalPair", "TrainSample", "list_images", "load_dataset", "load_pairs",
]
