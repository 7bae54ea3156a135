from .config import PRESETS, ModelConfig, build_model_config, preset
from .params import Init, ParamScope, ParamSpec, ParamStore, count_params, init_params, param_specs
from .layers import channel_attention, conv, residual_block
from .adapter import DepthLike, DepthMap, adapter_forward, adapter_fused, depth_encoder, depth_gate
from .edibnet import (
    WaveletFeatures,
    decoder_forward,
    encoder_forward,
    forward,
    predict_and_reconstruct,
    wavelet_transform_block,
)

__all__ = [
    "PRESETS", "ModelConfig", "build_model_config", "preset",
    "Init", "ParamScope", "ParamSpec", "ParamStore", "count_params", "init_params", "param_specs",
    "channel_attention", "conv", "residual_block",
    "DepthLike", "DepthMap", "adapter_forward", "adapter_fused", "depth_encoder", "depth_gate",
    "WaveletFeatures", "decoder_forward", "encoder_forward", "forward", "predict_and_reconstruct",
    "wavelet_transform_block",
]
