import numpy as np
import pytest

from edibnet.model import adapter_forward, channel_attention, depth_encoder, forward, init_params, residual_block
from edibnet.tensor import (
    Tensor,
    absolute,
    add,
    affine,
    channel_norm,
    concat_channels,
    conv2d,
    cosine_similarity,
    global_avg_pool,
    mean,
    mul,
    resize_bilinear,
    scale_channels,
    sigmoid,
    silu,
    slice_channels,
    sub,
    total,
    upsample_nearest2x,
)
from edibnet.training import loss
from edibnet.wavelet import BASIS_NAMES, SubbandSet, dwt2, idwt2


def t(rng, *shape, scale=1.0):
    return Tensor(rng.standard_normal(shape) * scale)


class TestPrimitiveGradients:
    def test_conv2d(self, rng, check_gradients):
        check_gradients(
            lambda x, w, b: conv2d(x, w, b, stride=2, padding=1),
            [t(rng, 2, 3, 6, 6), t(rng, 4, 3, 3, 3, scale=0.3), t(rng, 1, 4, 1, 1)],
            rng,
        )

    def test_conv2d_1x1(self, rng, check_gradients):
        check_gradients(lambda x, w: conv2d(x, w), [t(rng, 1, 3, 4, 5), t(rng, 2, 3, 1, 1)], rng)

    @pytest.mark.parametrize("op", [sigmoid, silu])
    def test_activation(self, rng, check_gradients, op):
        check_gradients(op, [t(rng, 1, 2, 3, 3)], rng)

    def test_concat_and_slice(self, rng, check_gradients):
        check_gradients(
            lambda a, b: slice_channels(concat_channels([a, b]), 1, 4),
            [t(rng, 1, 2, 3, 3), t(rng, 1, 3, 3, 3)],
            rng,
        )

    def test_global_avg_pool(self, rng, check_gradients):
        check_gradients(global_avg_pool, [t(rng, 2, 3, 4, 4)], rng)

    def test_upsample(self, rng, check_gradients):
        check_gradients(upsample_nearest2x, [t(rng, 1, 2, 3, 2)], rng)

    def test_resize_bilinear(self, rng, check_gradients):
        check_gradients(lambda x: resize_bilinear(x, 7, 5), [t(rng, 1, 2, 4, 3)], rng)

    def test_arithmetic(self, rng, check_gradients):
        check_gradients(
            lambda a, b, c: affine(mul(add(a, b), sub(c, a)), scale=-0.5, shift=2.0),
            [t(rng, 1, 2, 3, 3), t(rng, 1, 2, 3, 3), t(rng, 1, 2, 3, 3)],
            rng,
        )

    def test_scale_channels(self, rng, check_gradients):
        check_gradients(scale_channels, [t(rng, 2, 3, 4, 4), t(rng, 2, 3, 1, 1)], rng)

    def test_absolute_away_from_kink(self, rng, check_gradients):
        x = Tensor(np.sign(rng.standard_normal((1, 1, 4, 4))) * rng.uniform(0.2, 1.0, (1, 1, 4, 4)))
        check_gradients(absolute, [x], rng)

    def test_reductions(self, rng, check_gradients):
        check_gradients(lambda x: add(mean(x), total(x)), [t(rng, 2, 2, 3, 3)], rng)

    def test_channel_norm(self, rng, check_gradients):
        check_gradients(
            channel_norm,
            [t(rng, 2, 3, 4, 4), Tensor(rng.uniform(0.5, 1.5, (1, 3, 1, 1))), t(rng, 1, 3, 1, 1)],
            rng,
        )

    def test_cosine_similarity(self, rng, check_gradients):
        check_gradients(cosine_similarity, [t(rng, 2, 2, 3, 3), t(rng, 2, 2, 3, 3)], rng)


class TestWaveletGradients:
    @pytest.mark.parametrize("basis", BASIS_NAMES)
    def test_dwt2(self, rng, check_gradients, basis):
        check_gradients(lambda x: concat_channels(list(dwt2(x, basis).bands())), [t(rng, 1, 2, 4, 6)], rng)

    @pytest.mark.parametrize("basis", BASIS_NAMES)
    def test_idwt2(self, rng, check_gradients, basis):
        def rebuild(stacked):
            return idwt2(SubbandSet(*(slice_channels(stacked, 2 * k, 2 * k + 2) for k in range(4))), basis)

        check_gradients(rebuild, [t(rng, 1, 8, 3, 2)], rng)


class TestNetworkGradients:
    def test_residual_block(self, rng, check_gradients, tiny_config, randomize):
        params = randomize(init_params(tiny_config), rng)
        scope = params.scope("encoder.level1.block0")
        check_gradients(
            lambda z, w: residual_block(z, scope),
            [t(rng, 1, 4, 5, 5), params["encoder.level1.block0.conv1.weight"]],
            rng,
        )

    def test_channel_attention(self, rng, check_gradients, tiny_config, randomize):
        params = randomize(init_params(tiny_config), rng)
        scope = params.scope("decoder.level1.adapter.attn")
        check_gradients(
            lambda x, w: channel_attention(x, scope),
            [t(rng, 1, 4, 4, 4), params["decoder.level1.adapter.attn.reduce.weight"]],
            rng,
        )

    def test_depth_encoder(self, rng, check_gradients, tiny_config, randomize):
        params = randomize(init_params(tiny_config), rng)
        scope = params.scope("depth_encoder")
        check_gradients(
            lambda d, w: depth_encoder(d, 3, 3, 16, scope),
            [Tensor(rng.uniform(0, 1, (1, 1, 6, 6))), params["depth_encoder.conv1.weight"]],
            rng,
        )

    def test_full_adapter(self, rng, check_gradients, tiny_config, randomize):
        params = randomize(init_params(tiny_config), rng)
        scope = params.scope("decoder.level2.adapter")
        checked = [params[f"decoder.level2.adapter.{name}"] for name in (
            "conv_a.weight", "conv_b.weight", "fusion.weight", "norm_d.scale", "bias_z.weight", "attn.expand.bias",
        )]

        def run(z, d, *_):
            z_out, d_next = adapter_forward(z, d, scope)
            return concat_channels([z_out, d_next])

        check_gradients(run, [t(rng, 1, 8, 6, 6), t(rng, 1, 8, 6, 6)] + checked, rng)

    def test_forward_and_loss(self, rng, check_gradients, tiny_config, randomize, make_image):
        params = randomize(init_params(tiny_config), rng, scale=0.1)
        image = make_image(rng, 16, 16)
        depth = Tensor(rng.uniform(0, 1, (1, 1, 8, 8)))
        # Offset keeps |pred - target| away from the kink of the L1 term.
        target = Tensor(image.data + 0.5 + rng.normal(0, 0.05, image.shape))
        checked = [params[name] for name in (
            "wavelet.ll.weight", "encoder.down1.weight", "depth_encoder.conv2.weight",
            "decoder.level3.adapter.conv_a.weight", "decoder.level2.fuse.weight",
            "heads.ll.weight",
        )]
        check_gradients(
            lambda *_: loss(forward(image, depth, tiny_config, params), target, 0.1),
            checked,
            rng,
            rtol=5e-2,
            atol=5e-3,
            samples=4,
        )
