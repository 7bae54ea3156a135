# edibnet/tensor/ops.py
"""
Numerical kernels on rank-4 tensors with their vector-Jacobian products.

Every function validates shapes, computes its result in float64, stores it as
float32 and, when a tape is active and an input needs a gradient, records a
closure that maps the output gradient to the input gradients.
"""
from functools import lru_cache
from typing import Optional, Sequence
import logging

import numpy as np
from numpy.lib.stride_tricks import as_strided
from scipy.special import expit

from ..errors import ShapeError
from .tensor import SCALAR_SHAPE, Tensor, record_op

logger = logging.getLogger(__name__)

ACC = np.float64


def _require_same_shape(op: str, a: Tensor, b: Tensor) -> None:
    if a.shape != b.shape:
        raise ShapeError(f"{op}: shapes {a.shape} and {b.shape} differ (no broadcasting)")


# --- convolution -------------------------------------------------------------

def _windows(xp: np.ndarray, kh: int, kw: int, stride: int) -> np.ndarray:
    """View (n, c, kh, kw, h_out, w_out) over a padded input; no copy."""
    n, c, h, w = xp.shape
    h_out = (h - kh) // stride + 1
    w_out = (w - kw) // stride + 1
    sn, sc, sh, sw = xp.strides
    return as_strided(
        xp,
        shape=(n, c, kh, kw, h_out, w_out),
        strides=(sn, sc, sh, sw, sh * stride, sw * stride),
        writeable=False,
    )


def conv2d(
    x: Tensor,
    weight: Tensor,
    bias: Optional[Tensor] = None,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """
    Zero-padded 2D cross-correlation.

    ``weight`` is (c_out, c_in, kh, kw); ``bias`` is stored as (1, c_out, 1, 1).
    Accumulation runs in float64 so results do not depend on summation order
    at float32 precision.
    """
    if stride < 1 or padding < 0:
        raise ShapeError(f"conv2d: stride must be >= 1 and padding >= 0, got stride={stride} padding={padding}")
    n, c_in, h, w = x.shape
    c_out, w_in, kh, kw = weight.shape
    if w_in != c_in:
        raise ShapeError(f"conv2d: input has {c_in} channels but weight expects {w_in} (weight shape {weight.shape})")
    if h + 2 * padding < kh or w + 2 * padding < kw:
        raise ShapeError(
            f"conv2d: padded input {h + 2 * padding}x{w + 2 * padding} smaller than kernel {kh}x{kw}"
        )
    if bias is not None and bias.shape != (1, c_out, 1, 1):
        raise ShapeError(f"conv2d: bias must have shape {(1, c_out, 1, 1)}, got {bias.shape}")

    xp = np.pad(x.data.astype(ACC), ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    wd = weight.data.astype(ACC)
    cols = _windows(xp, kh, kw, stride)
    out = np.tensordot(cols, wd, axes=([1, 2, 3], [1, 2, 3])).transpose(0, 3, 1, 2)
    if bias is not None:
        out = out + bias.data.astype(ACC)
    h_out, w_out = out.shape[2], out.shape[3]

    def vjp(g: np.ndarray):
        g = g.astype(ACC, copy=False)
        windows = _windows(xp, kh, kw, stride)
        grad_w = np.tensordot(g, windows, axes=([0, 2, 3], [0, 4, 5])) if weight.requires_grad else None
        grad_b = g.sum(axis=(0, 2, 3)).reshape(1, c_out, 1, 1) if bias is not None and bias.requires_grad else None
        grad_x = None
        if x.requires_grad:
            # (n, h_out, w_out, c_in, kh, kw)
            dcols = np.tensordot(g, wd, axes=([1], [0]))
            gxp = np.zeros_like(xp)
            for i in range(kh):
                for j in range(kw):
                    gxp[:, :, i:i + stride * h_out:stride, j:j + stride * w_out:stride] += (
                        dcols[:, :, :, :, i, j].transpose(0, 3, 1, 2)
                    )
            grad_x = gxp[:, :, padding:padding + h, padding:padding + w]
        return grad_x, grad_w, grad_b

    inputs = (x, weight) if bias is None else (x, weight, bias)
    return record_op("conv2d", inputs, out, vjp)


# --- activations ---------------------------------------------------------------

def sigmoid(x: Tensor) -> Tensor:
    s = expit(x.data.astype(ACC))

    def vjp(g):
        return (g * s * (1.0 - s),)

    return record_op("sigmoid", (x,), s, vjp)


def silu(x: Tensor) -> Tensor:
    xd = x.data.astype(ACC)
    s = expit(xd)

    def vjp(g):
        return (g * s * (1.0 + xd * (1.0 - s)),)

    return record_op("silu", (x,), xd * s, vjp)


# --- channel plumbing ----------------------------------------------------------

def concat_channels(parts: Sequence[Tensor]) -> Tensor:
    if not parts:
        raise ShapeError("concat_channels: nothing to concatenate")
    n, _, h, w = parts[0].shape
    for p in parts[1:]:
        if (p.shape[0], p.shape[2], p.shape[3]) != (n, h, w):
            raise ShapeError(f"concat_channels: part {p.shape} does not match (n, h, w) = {(n, h, w)}")
    bounds = np.cumsum([0] + [p.shape[1] for p in parts])
    out = np.concatenate([p.data for p in parts], axis=1)

    def vjp(g):
        return tuple(g[:, bounds[k]:bounds[k + 1]] for k in range(len(parts)))

    return record_op("concat_channels", tuple(parts), out, vjp)


def slice_channels(x: Tensor, start: int, stop: int) -> Tensor:
    c = x.shape[1]
    if not 0 <= start < stop <= c:
        raise ShapeError(f"slice_channels: [{start}:{stop}] is not a valid range for {c} channels")

    def vjp(g):
        full = np.zeros(x.shape, dtype=ACC)
        full[:, start:stop] = g
        return (full,)

    return record_op("slice_channels", (x,), x.data[:, start:stop], vjp)


# --- pooling and resampling ----------------------------------------------------

def global_avg_pool(x: Tensor) -> Tensor:
    n, c, h, w = x.shape
    if h * w < 1:
        raise ShapeError(f"global_avg_pool: empty spatial extent in {x.shape}")
    out = x.data.astype(ACC).mean(axis=(2, 3), keepdims=True)

    def vjp(g):
        return (np.broadcast_to(g / (h * w), x.shape).copy(),)

    return record_op("global_avg_pool", (x,), out, vjp)


def upsample_nearest2x(x: Tensor) -> Tensor:
    n, c, h, w = x.shape
    out = np.repeat(np.repeat(x.data, 2, axis=2), 2, axis=3)

    def vjp(g):
        return (g.reshape(n, c, h, 2, w, 2).sum(axis=(3, 5)),)

    return record_op("upsample_nearest2x", (x,), out, vjp)


@lru_cache(maxsize=64)
def _interp_matrix(in_size: int, out_size: int, start: float, extent: float) -> np.ndarray:
    scale = extent / out_size
    src = start + (np.arange(out_size, dtype=ACC) + 0.5) * scale - 0.5
    src = np.clip(src, 0.0, in_size - 1)
    lo = np.floor(src).astype(np.int64)
    hi = np.minimum(lo + 1, in_size - 1)
    frac = src - lo
    m = np.zeros((out_size, in_size), dtype=ACC)
    rows = np.arange(out_size)
    np.add.at(m, (rows, lo), 1.0 - frac)
    np.add.at(m, (rows, hi), frac)
    m.setflags(write=False)
    return m


def bilinear_matrix(
    in_size: int, out_size: int, start: float = 0.0, extent: Optional[float] = None
) -> np.ndarray:
    """
    Row-stochastic (out_size, in_size) interpolation matrix, half-pixel centres.

    ``start``/``extent`` select a sub-interval of the source axis in source
    pixel units; the default covers the whole axis.
    """
    if in_size < 1 or out_size < 1:
        raise ShapeError(f"bilinear_matrix: sizes must be >= 1, got {in_size} -> {out_size}")
    return _interp_matrix(in_size, out_size, float(start), float(in_size if extent is None else extent))


def resample_bilinear(x: Tensor, rows: np.ndarray, cols: np.ndarray) -> Tensor:
    """Apply separable interpolation matrices to the spatial axes of ``x``."""
    if rows.shape[1] != x.shape[2] or cols.shape[1] != x.shape[3]:
        raise ShapeError(
            f"resample_bilinear: matrices {rows.shape}/{cols.shape} do not fit spatial dims {x.shape[2:]}"
        )
    out = np.einsum("oh,nchw,pw->ncop", rows, x.data.astype(ACC), cols, optimize=True)

    def vjp(g):
        return (np.einsum("oh,ncop,pw->nchw", rows, g, cols, optimize=True),)

    return record_op("resize_bilinear", (x,), out, vjp)


def resize_bilinear(x: Tensor, out_h: int, out_w: int) -> Tensor:
    """Align-corners-false bilinear resize."""
    if out_h < 1 or out_w < 1:
        raise ShapeError(f"resize_bilinear: target {out_h}x{out_w} must be at least 1x1")
    _, _, h, w = x.shape
    return resample_bilinear(x, bilinear_matrix(h, out_h), bilinear_matrix(w, out_w))


# --- elementwise arithmetic ----------------------------------------------------

def add(a: Tensor, b: Tensor) -> Tensor:
    _require_same_shape("add", a, b)
    return record_op("add", (a, b), a.data.astype(ACC) + b.data, lambda g: (g, g))


def sub(a: Tensor, b: Tensor) -> Tensor:
    _require_same_shape("sub", a, b)
    return record_op("sub", (a, b), a.data.astype(ACC) - b.data, lambda g: (g, -g))


def mul(a: Tensor, b: Tensor) -> Tensor:
    _require_same_shape("mul", a, b)
    ad, bd = a.data.astype(ACC), b.data.astype(ACC)
    return record_op("mul", (a, b), ad * bd, lambda g: (g * bd, g * ad))


def scale_channels(x: Tensor, s: Tensor) -> Tensor:
    """Multiply each (sample, channel) plane of ``x`` by the matching entry of ``s`` (n, c, 1, 1)."""
    n, c, _, _ = x.shape
    if s.shape != (n, c, 1, 1):
        raise ShapeError(f"scale_channels: scale shape {s.shape} must be {(n, c, 1, 1)}")
    xd, sd = x.data.astype(ACC), s.data.astype(ACC)

    def vjp(g):
        return g * sd, (g * xd).sum(axis=(2, 3), keepdims=True)

    return record_op("scale_channels", (x, s), xd * sd, vjp)


def affine(x: Tensor, scale: float = 1.0, shift: float = 0.0) -> Tensor:
    """``scale * x + shift`` with Python-float constants."""
    return record_op("affine", (x,), x.data.astype(ACC) * scale + shift, lambda g: (g * scale,))


def absolute(x: Tensor) -> Tensor:
    xd = x.data.astype(ACC)
    return record_op("abs", (x,), np.abs(xd), lambda g: (g * np.sign(xd),))


def total(x: Tensor) -> Tensor:
    def vjp(g):
        return (np.full(x.shape, float(g.reshape(())), dtype=ACC),)

    return record_op("sum", (x,), x.data.astype(ACC).sum().reshape(SCALAR_SHAPE), vjp)


def mean(x: Tensor) -> Tensor:
    size = x.numel

    def vjp(g):
        return (np.full(x.shape, float(g.reshape(())) / size, dtype=ACC),)

    return record_op("mean", (x,), x.data.astype(ACC).mean().reshape(SCALAR_SHAPE), vjp)


# --- normalization and similarity ----------------------------------------------

def channel_norm(x: Tensor, scale: Tensor, shift: Tensor, eps: float = 1e-5) -> Tensor:
    """Per-sample, per-channel standardization over spatial positions followed by a learned affine map."""
    n, c, h, w = x.shape
    for label, p in (("scale", scale), ("shift", shift)):
        if p.shape != (1, c, 1, 1):
            raise ShapeError(f"channel_norm: {label} shape {p.shape} must be {(1, c, 1, 1)}")
    xd = x.data.astype(ACC)
    mu = xd.mean(axis=(2, 3), keepdims=True)
    inv_std = 1.0 / np.sqrt(xd.var(axis=(2, 3), keepdims=True) + eps)
    xhat = (xd - mu) * inv_std
    gamma = scale.data.astype(ACC)
    out = xhat * gamma + shift.data

    def vjp(g):
        count = h * w
        dxhat = g * gamma
        grad_x = inv_std / count * (
            count * dxhat
            - dxhat.sum(axis=(2, 3), keepdims=True)
            - xhat * (dxhat * xhat).sum(axis=(2, 3), keepdims=True)
        )
        grad_scale = (g * xhat).sum(axis=(0, 2, 3), keepdims=True)
        grad_shift = g.sum(axis=(0, 2, 3), keepdims=True)
        return grad_x, grad_scale, grad_shift

    return record_op("channel_norm", (x, scale, shift), out, vjp)


def cosine_similarity(a: Tensor, b: Tensor, eps: float = 1e-8) -> Tensor:
    """
    Cosine similarity of each sample's flattened values, shape (n, 1, 1, 1).

    The denominator is ``max(|a|·|b|, eps)``, so a zero vector yields 0.
    """
    _require_same_shape("cosine_similarity", a, b)
    n = a.shape[0]
    af = a.data.astype(ACC).reshape(n, -1)
    bf = b.data.astype(ACC).reshape(n, -1)
    na = np.linalg.norm(af, axis=1)
    nb = np.linalg.norm(bf, axis=1)
    prod = na * nb
    denom = np.maximum(prod, eps)
    dot = (af * bf).sum(axis=1)
    cos = dot / denom
    guarded = prod <= eps

    def vjp(g):
        gs = g.reshape(n, 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ga = np.where(
                guarded[:, None],
                bf / eps,
                bf / denom[:, None] - (cos / np.maximum(na * na, eps))[:, None] * af,
            )
            gb = np.where(
                guarded[:, None],
                af / eps,
                af / denom[:, None] - (cos / np.maximum(nb * nb, eps))[:, None] * bf,
            )
        return (gs * ga).reshape(a.shape), (gs * gb).reshape(b.shape)

    return record_op("cosine_similarity", (a, b), cos.reshape(n, 1, 1, 1), vjp)
