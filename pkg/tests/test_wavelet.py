import numpy as np
import pytest
import pywt

from edibnet.errors import ConfigError, ShapeError
from edibnet.tensor import Tensor
from edibnet.wavelet import (
    BASIS_NAMES,
    SubbandSet,
    WaveletName,
    WaveletPyramid,
    build_basis,
    decompose,
    dwt2,
    idwt2,
    reconstruct,
)


def energy(*tensors) -> float:
    return float(sum((t.data.astype(np.float64) ** 2).sum() for t in tensors))


class TestBases:
    @pytest.mark.parametrize("name", BASIS_NAMES)
    def test_two_tap_banks(self, name):
        basis = build_basis(name)
        assert len(basis.analysis_lo) == 2 and len(basis.synthesis_hi) == 2

    def test_case_insensitive(self):
        assert build_basis("HAAR") is build_basis(WaveletName.HAAR)

    def test_orthonormal_haar_taps(self):
        basis = build_basis("haar")
        np.testing.assert_allclose(basis.analysis_lo, [1 / np.sqrt(2)] * 2)

    def test_unknown_basis(self):
        with pytest.raises(ConfigError, match="Unknown wavelet"):
            build_basis("db4")


class TestDwt2:
    def test_constant_image(self):
        bands = dwt2(Tensor(np.full((1, 3, 4, 6), 0.3)))
        np.testing.assert_allclose(bands.ll.data, 0.6, atol=1e-6)
        for detail in bands.details:
            np.testing.assert_allclose(detail.data, 0.0, atol=1e-6)

    @pytest.mark.parametrize("name", BASIS_NAMES)
    def test_constant_image_has_no_detail(self, name):
        bands = dwt2(Tensor(np.full((2, 3, 6, 8), 0.45)), name)
        for detail in bands.details:
            np.testing.assert_allclose(detail.data, 0.0, atol=1e-6)
        assert np.ptp(bands.ll.data) < 1e-6

    def test_two_by_two_butterfly(self):
        bands = dwt2(Tensor(np.array([[1.0, 2.0], [3.0, 4.0]]).reshape(1, 1, 2, 2)))
        assert bands.ll.item() == pytest.approx(5.0)
        # lo vertical / hi horizontal, then hi vertical / lo horizontal
        assert bands.lh.item() == pytest.approx(-1.0)
        assert bands.hl.item() == pytest.approx(-2.0)
        assert bands.hh.item() == pytest.approx(0.0, abs=1e-6)

    @pytest.mark.parametrize("name", BASIS_NAMES)
    def test_matches_pywavelets(self, rng, name):
        x = rng.standard_normal((1, 2, 8, 6))
        ca, (ch, cv, cd) = pywt.dwt2(x, name, mode="periodization", axes=(-2, -1))
        bands = dwt2(Tensor(x), name)
        np.testing.assert_allclose(bands.ll.data, ca, atol=1e-5)
        np.testing.assert_allclose(bands.lh.data, cv, atol=1e-5)
        np.testing.assert_allclose(bands.hl.data, ch, atol=1e-5)
        np.testing.assert_allclose(bands.hh.data, cd, atol=1e-5)

    def test_parseval(self, rng):
        for _ in range(100):
            x = Tensor(rng.standard_normal((1, 3, 8, 8)))
            assert energy(*dwt2(x).bands()) == pytest.approx(energy(x), rel=1e-5)

    def test_odd_size_rejected(self):
        with pytest.raises(ShapeError, match="even"):
            dwt2(Tensor.zeros((1, 1, 4, 5)))


class TestIdwt2:
    def test_zero_bands(self):
        zero = Tensor.zeros((1, 3, 2, 2))
        np.testing.assert_array_equal(idwt2(SubbandSet(zero, zero, zero, zero)).data, 0.0)

    def test_inverts_constant(self):
        zero = Tensor.zeros((1, 1, 3, 3))
        out = idwt2(SubbandSet(Tensor(np.full((1, 1, 3, 3), 1.4)), zero, zero, zero))
        assert out.shape == (1, 1, 6, 6)
        np.testing.assert_allclose(out.data, 0.7, atol=1e-6)

    def test_mismatched_bands(self):
        with pytest.raises(ShapeError):
            SubbandSet(Tensor.zeros((1, 1, 2, 2)), Tensor.zeros((1, 1, 2, 2)), Tensor.zeros((1, 1, 2, 2)),
                       Tensor.zeros((1, 1, 2, 3)))


class TestPyramid:
    @pytest.mark.parametrize("name", BASIS_NAMES)
    @pytest.mark.parametrize("levels", [1, 2, 3])
    def test_round_trip(self, rng, name, levels):
        for _ in range(100):
            x = Tensor(rng.standard_normal((1, 3, 16, 24)))
            back = reconstruct(decompose(x, levels, name), name)
            err = np.abs(back.data - x.data).max() / np.abs(x.data).max()
            assert err < 1e-6

    @pytest.mark.parametrize("name", BASIS_NAMES)
    def test_linear(self, rng, name):
        x, y = rng.standard_normal((1, 3, 16, 16)), rng.standard_normal((1, 3, 16, 16))
        a, b = 1.7, -0.6
        mixed = decompose(Tensor(a * x + b * y), 2, name)
        px, py = decompose(Tensor(x), 2, name), decompose(Tensor(y), 2, name)
        pairs = [(mixed.top_ll, px.top_ll, py.top_ll)]
        for level in range(2):
            pairs += list(zip(mixed.details[level], px.details[level], py.details[level]))
        for m, u, v in pairs:
            np.testing.assert_allclose(m.data, a * u.data + b * v.data, rtol=1e-6, atol=1e-5)

    def test_shift_by_two_shifts_bands_by_one(self, rng):
        x = rng.standard_normal((1, 3, 16, 20))
        shifted = np.roll(x, (2, 2), axis=(2, 3))
        plain, moved = decompose(Tensor(x), 1), decompose(Tensor(shifted), 1)
        for a, b in zip((plain.top_ll, *plain.details[0]), (moved.top_ll, *moved.details[0])):
            expected = np.roll(a.data, (1, 1), axis=(2, 3))
            np.testing.assert_allclose(b.data[:, :, 1:-1, 1:-1], expected[:, :, 1:-1, 1:-1], atol=1e-6)

    def test_single_level_equals_dwt2(self, rng):
        x = Tensor(rng.standard_normal((1, 3, 4, 4)))
        pyramid = decompose(x, 1)
        bands = dwt2(x)
        np.testing.assert_array_equal(pyramid.top_ll.data, bands.ll.data)
        for a, b in zip(pyramid.details[0], bands.details):
            np.testing.assert_array_equal(a.data, b.data)
        np.testing.assert_array_equal(reconstruct(pyramid).data, idwt2(bands).data)

    def test_full_resolution(self):
        pyramid = decompose(Tensor.zeros((1, 3, 1440, 1920)), 2)
        assert pyramid.top_ll.shape == (1, 3, 360, 480)
        assert pyramid.details[0][0].shape == (1, 3, 720, 960)

    def test_three_levels_large(self, rng):
        x = Tensor(rng.random((1, 3, 256, 256)))
        back = reconstruct(decompose(x, 3))
        assert np.abs(back.data - x.data).max() / np.abs(x.data).max() < 1e-6

    def test_dropping_fine_details_removes_energy(self, rng):
        x = Tensor(rng.standard_normal((1, 3, 16, 16)))
        pyramid = decompose(x, 2)
        zeros = tuple(Tensor.zeros(d.shape) for d in pyramid.details[0])
        smoothed = reconstruct(WaveletPyramid(2, pyramid.top_ll, [zeros, pyramid.details[1]]))
        assert energy(smoothed) <= energy(x)

    def test_unsupported_level(self):
        with pytest.raises(ConfigError):
            decompose(Tensor.zeros((1, 1, 32, 32)), 4)

    def test_indivisible_size(self):
        with pytest.raises(ShapeError, match="divisible by 4"):
            decompose(Tensor.zeros((1, 1, 12, 10)), 2)

    def test_pyramid_shape_validation(self):
        with pytest.raises(ShapeError):
            WaveletPyramid(1, Tensor.zeros((1, 1, 2, 2)), [])
