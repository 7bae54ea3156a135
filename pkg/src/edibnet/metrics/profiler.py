# edibnet/metrics/profiler.py
"""
Static complexity accounting and wall-clock benchmarking of the forward pass.

The walker below mirrors ``edibnet.model.edibnet.forward`` layer by layer
without allocating tensors. Conv FLOPs are 2*c_in*c_out*kh*kw*h_out*w_out
(one multiply-accumulate = 2 FLOPs, bias adds not counted). Every other op
is charged ``FLOPS_PER_ELEMENT[kind]`` per element it produces (per input
element for pooling and the forward DWT).
"""
from typing import Dict, List, Optional, Tuple
import logging
import os
import time

import numpy as np
from pydantic import BaseModel

from ..errors import ConfigError
from ..model import ModelConfig, ParamStore, forward
from ..tensor import DTYPE, Tensor

logger = logging.getLogger(__name__)

Shape = Tuple[int, int, int, int]

FLOPS_PER_ELEMENT: Dict[str, int] = {
    "add": 1,             # residual and head additions
    "mul": 1,             # gate products
    "scale": 1,           # channel attention rescale
    "silu": 4,            # exp, add, divide, multiply
    "sigmoid": 3,         # exp, add, divide
    "channel_norm": 4,    # subtract mean, multiply inv-std, scale, shift
    "global_avg_pool": 1,
    "bilinear": 4,        # separable 2-tap interpolation per axis
    "dwt": 6,             # two 2-tap passes: 2 mul + 1 add each
    "idwt": 6,
    "upsample": 0,        # pure copies
}


class LayerCost(BaseModel):
    name: str
    kind: str
    params: int
    flops: int
    output_shape: Tuple[int, int, int, int]


class ComplexityReport(BaseModel):
    image_hw: Tuple[int, int]
    depth_hw: Tuple[int, int]
    params: int
    flops: int
    macs: int
    peak_activation_bytes: int
    per_layer: List[LayerCost]

    def to_text(self) -> str:
        """Line-oriented key=value rendering; per-layer lines are prefixed ``layer.<name>``."""
        lines = [
            f"image_hw={self.image_hw[0]}x{self.image_hw[1]}",
            f"depth_hw={self.depth_hw[0]}x{self.depth_hw[1]}",
            f"params={self.params}",
            f"flops={self.flops}",
            f"macs={self.macs}",
            f"peak_activation_bytes={self.peak_activation_bytes}",
        ]
        for layer in self.per_layer:
            shape = "x".join(str(s) for s in layer.output_shape)
            lines.append(f"layer.{layer.name}={layer.kind} params={layer.params} flops={layer.flops} shape={shape}")
        return "\n".join(lines) + "\n"


class _Walker:
    """Symbolic forward pass that records costs and a coarse activation-liveness peak."""

    def __init__(self, bytes_per_value: int):
        self.bytes_per_value = bytes_per_value
        self.layers: List[LayerCost] = []
        self.held: Dict[str, int] = {}
        self.peak = 0

    def _bytes(self, shape: Shape) -> int:
        return int(np.prod(shape)) * self.bytes_per_value

    def _record(self, name: str, kind: str, params: int, flops: int, inputs: List[Shape], out: Shape) -> Shape:
        self.layers.append(LayerCost(name=name, kind=kind, params=params, flops=flops, output_shape=out))
        live = sum(self.held.values()) + sum(self._bytes(s) for s in inputs) + self._bytes(out)
        self.peak = max(self.peak, live)
        return out

    def hold(self, key: str, shape: Shape, count: int = 1) -> None:
        self.held[key] = self._bytes(shape) * count

    def release(self, key: str) -> None:
        self.held.pop(key, None)

    def conv(self, name: str, x: Shape, c_out: int, k: int, stride: int = 1) -> Shape:
        n, c_in, h, w = x
        pad = k // 2
        h_out = (h + 2 * pad - k) // stride + 1
        w_out = (w + 2 * pad - k) // stride + 1
        params = c_in * c_out * k * k + c_out
        flops = 2 * c_in * c_out * k * k * h_out * w_out * n
        return self._record(name, "conv", params, flops, [x], (n, c_out, h_out, w_out))

    def elementwise(self, name: str, kind: str, x: Shape, inputs: int = 1, params: int = 0) -> Shape:
        flops = FLOPS_PER_ELEMENT[kind] * int(np.prod(x))
        return self._record(name, kind, params, flops, [x] * inputs, x)

    def pool(self, name: str, x: Shape) -> Shape:
        n, c, _, _ = x
        return self._record(name, "global_avg_pool", 0, int(np.prod(x)), [x], (n, c, 1, 1))

    def resample(self, name: str, kind: str, x: Shape, out: Shape, per_input: bool = False) -> Shape:
        count = int(np.prod(x if per_input else out))
        return self._record(name, kind, 0, FLOPS_PER_ELEMENT[kind] * count, [x], out)

    def residual_block(self, name: str, x: Shape) -> Shape:
        c = x[1]
        h = self.conv(f"{name}.conv1", x, c, 3)
        h = self.elementwise(f"{name}.silu", "silu", h)
        h = self.conv(f"{name}.conv2", h, c, 3)
        return self.elementwise(f"{name}.add", "add", h, inputs=2)

    def attention(self, name: str, x: Shape, ratio: int) -> Shape:
        c = x[1]
        s = self.pool(f"{name}.pool", x)
        s = self.conv(f"{name}.reduce", s, c // ratio, 1)
        s = self.elementwise(f"{name}.silu", "silu", s)
        s = self.conv(f"{name}.expand", s, c, 1)
        s = self.elementwise(f"{name}.sigmoid", "sigmoid", s)
        return self.elementwise(f"{name}.scale", "scale", x)

    def adapter(self, name: str, z: Shape, ratio: int, next_width: Optional[int]) -> Optional[Shape]:
        n, c, h, w = z
        zn = self.elementwise(f"{name}.norm_z", "channel_norm", z, params=2 * c)
        zn = self.conv(f"{name}.bias_z", zn, c, 1)
        dn = self.elementwise(f"{name}.norm_d", "channel_norm", z, params=2 * c)
        dn = self.conv(f"{name}.bias_d", dn, c, 1)
        a = self.conv(f"{name}.conv_a", dn, c, 3)
        self.conv(f"{name}.conv_b", dn, c, 3)
        g = self.elementwise(f"{name}.product", "mul", a, inputs=2)
        g = self.elementwise(f"{name}.gate", "sigmoid", g)
        self.elementwise(f"{name}.condition", "mul", g, inputs=2)
        f = self.conv(f"{name}.fusion", (n, 2 * c, h, w), c, 3)
        f = self.attention(f"{name}.attn", f, ratio)
        self.elementwise(f"{name}.residual", "add", f, inputs=2)
        d = self.attention(f"{name}.attn_d", z, ratio)
        if next_width is None:
            return None
        d = self.conv(f"{name}.propagate", d, next_width, 1)
        return self.resample(f"{name}.upsample", "upsample", d, (n, next_width, 2 * h, 2 * w))


def count_complexity(
    config: ModelConfig,
    image_hw: Tuple[int, int] = (1440, 1920),
    depth_hw: Tuple[int, int] = (192, 256),
) -> ComplexityReport:
    """Parameters, FLOPs and a peak-activation estimate for one forward pass at batch 1."""
    walker = _Walker(np.dtype(DTYPE).itemsize)
    H, W = image_hw
    levels = config.decomposition_levels
    widths = config.level_channels
    ratio = config.attention_ratio

    x: Shape = (1, 3, H, W)
    walker.hold("image", x)
    for k in range(1, levels + 1):
        n, c, h, w = x
        walker.resample(f"wavelet.dwt{k}", "dwt", x, (n, 4 * c, h // 2, w // 2), per_input=True)
        x = (n, c, h // 2, w // 2)
        if k < levels or levels == 1:
            walker.hold(f"skip{k}", x, count=3)
    walker.release("image")
    walker.hold("subbands", x, count=4)
    bands = config.processed_bands
    per_band = config.base_channels // len(bands)
    for band in bands:
        walker.conv(f"wavelet.{band}", x, per_band, 3)
    n, _, h, w = x
    z: Shape = (n, widths[0], h, w)

    for level in (1, 2, 3):
        for j in range(config.blocks_at("encoder", level)):
            z = walker.residual_block(f"encoder.level{level}.block{j}", z)
        if level < 3:
            walker.hold(f"encoder_skip{level}", z)
            z = walker.conv(f"encoder.down{level}", z, widths[level], 3, stride=2)

    d: Optional[Shape] = None
    if config.use_depth:
        hd, wd = depth_hw
        d = walker.conv("depth_encoder.conv1", (1, 1, hd, wd), widths[2], 3)
        d = walker.elementwise("depth_encoder.silu", "silu", d)
        d = walker.conv("depth_encoder.conv2", d, widths[2], 3)
        if d[2:] != z[2:]:
            d = walker.resample("depth_encoder.align", "bilinear", d, z)

    for level in (3, 2, 1):
        prefix = f"decoder.level{level}"
        below = widths[level - 2] if level > 1 else None
        d_next = None
        if d is not None:
            d_next = walker.adapter(f"{prefix}.adapter", z, ratio, below)
        for j in range(config.blocks_at("decoder", level)):
            z = walker.residual_block(f"{prefix}.block{j}", z)
        if below is None:
            break
        n, c, h, w = z
        up = walker.resample(f"{prefix}.upsample", "upsample", z, (n, c, 2 * h, 2 * w))
        z = walker.conv(f"{prefix}.up", up, below, 3)
        walker.release(f"encoder_skip{level - 1}")
        z = walker.conv(f"{prefix}.fuse", (n, 2 * below, 2 * h, 2 * w), below, 1)
        d = d_next

    for band in bands:
        head = walker.conv(f"heads.{band}", z, 3, 3)
        walker.elementwise(f"heads.{band}.residual", "add", head, inputs=2)
    walker.release("subbands")
    x = (1, 3, H // 2 ** levels, W // 2 ** levels)
    for k in range(levels, 0, -1):
        n, c, h, w = x
        x = walker.resample(f"wavelet.idwt{k}", "idwt", x, (n, c, 2 * h, 2 * w))
        walker.release(f"skip{k}")

    flops = sum(layer.flops for layer in walker.layers)
    report = ComplexityReport(
        image_hw=tuple(image_hw),
        depth_hw=tuple(depth_hw),
        params=sum(layer.params for layer in walker.layers),
        flops=flops,
        macs=flops // 2,
        peak_activation_bytes=walker.peak,
        per_layer=walker.layers,
    )
    logger.debug(
        f"count_complexity: params={report.params} flops={report.flops / 1e9:.2f}G "
        f"peak={report.peak_activation_bytes / 2 ** 20:.1f}MiB over {len(report.per_layer)} layers"
    )
    return report


class BenchmarkResult(BaseModel):
    median_s: float
    iqr_s: float
    repeats: int
    samples: List[float]
    threads: int

    def to_text(self) -> str:
        return (
            f"median_s={self.median_s:.6f}\niqr_s={self.iqr_s:.6f}\n"
            f"repeats={self.repeats}\nthreads={self.threads}\n"
        )


def thread_setting() -> int:
    """Thread count of the numeric libraries: OMP_NUM_THREADS if it is a positive integer, else the CPU count."""
    pinned = os.environ.get("OMP_NUM_THREADS", "").strip()
    if pinned.isdigit() and int(pinned) > 0:
        return int(pinned)
    if pinned:
        logger.warning(f"Ignoring OMP_NUM_THREADS={pinned!r}; it is not a positive integer")
    return os.cpu_count() or 1


def benchmark_forward(
    config: ModelConfig,
    params: ParamStore,
    image_hw: Tuple[int, int],
    depth_hw: Tuple[int, int],
    repeats: int = 5,
    seed: int = 0,
    logger: logging.Logger = None,
) -> BenchmarkResult:
    """Median and interquartile range of ``repeats`` timed forward passes after one warm-up run."""
    logger = logger or logging.getLogger(__name__)
    if repeats < 1:
        raise ConfigError(f"repeats must be >= 1, got {repeats}")
    rng = np.random.default_rng(seed)
    image = Tensor(rng.random((1, 3, *image_hw)))
    depth = Tensor(rng.random((1, 1, *depth_hw))) if config.use_depth else None

    forward(image, depth, config, params)
    samples = []
    for i in range(repeats):
        start = time.perf_counter()
        forward(image, depth, config, params)
        samples.append(time.perf_counter() - start)
        logger.debug(f"benchmark_forward: run {i + 1}/{repeats} took {samples[-1]:.4f}s")
    q1, median, q3 = np.percentile(samples, [25, 50, 75])
    result = BenchmarkResult(
        median_s=float(median),
        iqr_s=float(q3 - q1),
        repeats=repeats,
        samples=samples,
        threads=thread_setting(),
    )
    logger.info(f"benchmark_forward: median {result.median_s:.4f}s iqr {result.iqr_s:.4f}s threads={result.threads}")
    return result
