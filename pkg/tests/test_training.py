import math

import numpy as np
import pytest

from edibnet.blur import BlurKernel, KernelBank, apply_blur, load_kernel
from edibnet.errors import ConfigError, DataError, NumericError, ShapeError
from edibnet.io import TrainSample
from edibnet.metrics import psnr
from edibnet.model import DepthMap, build_model_config, forward
from edibnet.tensor import Tensor
from edibnet.training import (
    CURVE_FIELDS,
    DEFAULT_ALIGN,
    Trainer,
    build_train_config,
    cosine_lr,
    crop_depth,
    depth_patch_size,
    load_checkpoint,
    loss,
    loss_terms,
    sample_offsets,
    sample_patch,
    save_checkpoint,
    sidecar_paths,
    train,
)


def tiny_train_config(**overrides):
    values = dict(lr0=1e-3, epochs=1, patch=32, batch=2, cosine_weight=0.1, seed=7, max_steps=2, prefetch=0)
    values.update(overrides)
    return build_train_config(**values)


def assert_same_params(a, b):
    assert sorted(a.names()) == sorted(b.names())
    for name in a.names():
        np.testing.assert_array_equal(a[name].data, b[name].data, err_msg=name)


class TestLoss:
    def test_perfect_prediction(self, rng):
        t = Tensor(rng.random((2, 3, 8, 8)))
        assert loss(t, t, 0.5).item() == pytest.approx(0.0, abs=1e-6)

    def test_negated_prediction(self, rng):
        t = rng.random((2, 3, 8, 8)) + 0.1
        terms = loss_terms(Tensor(-t), Tensor(t), 0.3)
        assert terms.l1.item() == pytest.approx(2 * np.abs(t).mean(), rel=1e-5)
        assert terms.cosine.item() == pytest.approx(2.0, abs=1e-5)
        assert terms.total.item() == pytest.approx(2 * np.abs(t).mean() + 0.6, rel=1e-5)

    def test_zero_prediction(self, rng):
        t = rng.random((1, 3, 8, 8)) + 0.1
        assert loss(Tensor.zeros(t.shape), Tensor(t), 0.2).item() == pytest.approx(np.abs(t).mean() + 0.2, rel=1e-5)

    def test_both_zero(self):
        zeros = Tensor.zeros((1, 3, 4, 4))
        assert loss(zeros, zeros, 0.25).item() == pytest.approx(0.25)

    def test_without_cosine_term(self, rng):
        a, b = rng.random((1, 3, 4, 4)), rng.random((1, 3, 4, 4))
        assert loss(Tensor(a), Tensor(b), 0.0).item() == pytest.approx(np.abs(a - b).mean(), rel=1e-5)

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError, match="differ"):
            loss(Tensor.zeros((1, 3, 4, 4)), Tensor.zeros((1, 3, 4, 8)), 0.1)


class TestCosineLr:
    def test_endpoints(self):
        assert cosine_lr(0, 100, 1e-3) == pytest.approx(1e-3)
        assert cosine_lr(100, 100, 1e-3) == pytest.approx(0.0, abs=1e-15)
        assert cosine_lr(50, 100, 1e-3) == pytest.approx(5e-4)

    def test_monotone(self):
        values = [cosine_lr(s, 37, 2e-4) for s in range(38)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_zero_total(self):
        assert cosine_lr(0, 0, 1e-4) == 1e-4

    @pytest.mark.parametrize("step", [-1, 11])
    def test_out_of_range(self, step):
        with pytest.raises(ConfigError, match="outside"):
            cosine_lr(step, 10, 1e-4)


class TestSampling:
    def test_exact_size_is_whole_image(self, rng):
        image = Tensor(rng.random((1, 3, 32, 32)))
        depth = DepthMap(Tensor(rng.uniform(0, 1, (1, 1, 8, 8))))
        patch = sample_patch(image, depth, 32, rng)
        assert (patch.top, patch.left) == (0, 0)
        np.testing.assert_array_equal(patch.image.data, image.data)
        np.testing.assert_allclose(patch.depth.data, depth.tensor.data, atol=1e-6)

    def test_same_seed_same_crop(self, rng):
        image = Tensor(rng.random((1, 3, 96, 128)))
        first = sample_patch(image, None, 32, np.random.default_rng(5))
        second = sample_patch(image, None, 32, np.random.default_rng(5))
        assert (first.top, first.left) == (second.top, second.left)
        assert first.depth is None

    def test_margin_replicates_edges(self, rng):
        image = Tensor(rng.random((1, 3, 32, 48)))
        plain = sample_patch(image, None, 32, np.random.default_rng(2))
        padded = sample_patch(image, None, 32, np.random.default_rng(2), margin=3)
        assert (padded.top, padded.left) == (plain.top, plain.left)
        assert padded.image.shape == (1, 3, 38, 38)
        np.testing.assert_array_equal(padded.image.data[:, :, 3:35, 3:35], plain.image.data)
        np.testing.assert_array_equal(padded.image.data[:, :, 0, 3:35], image.data[:, :, 0, plain.left:plain.left + 32])

    def test_negative_margin(self, rng):
        with pytest.raises(ShapeError, match="margin"):
            sample_patch(Tensor(rng.random((1, 3, 32, 32))), None, 32, rng, margin=-1)

    def test_offsets_are_aligned(self, rng):
        for _ in range(200):
            top, left = sample_offsets(100, 130, 32, rng)
            assert top % DEFAULT_ALIGN == 0 and left % DEFAULT_ALIGN == 0
            assert top + 32 <= 100 and left + 32 <= 130

    def test_offsets_cover_the_grid(self, rng):
        seen = {sample_offsets(512, 512, 256, rng) for _ in range(10_000)}
        grid = (512 - 256) // DEFAULT_ALIGN + 1
        assert len(seen) >= 0.9 * grid * grid

    def test_unaligned_offsets(self, rng):
        seen = {sample_offsets(40, 40, 32, rng, align=1) for _ in range(2_000)}
        assert len(seen) == 81

    def test_too_small(self, rng):
        with pytest.raises(ShapeError, match="smaller than the"):
            sample_offsets(31, 64, 32, rng)

    def test_depth_patch_size(self):
        assert depth_patch_size(256, 1440, 192) == 32
        assert depth_patch_size(32, 32, 8) == 8
        assert depth_patch_size(16, 1440, 192) == 4

    def test_depth_crop_follows_image_region(self):
        ramp = np.tile(np.linspace(0.0, 1.0, 16), (16, 1)).reshape(1, 1, 16, 16)
        left_half = crop_depth(Tensor(ramp), (64, 64), 0, 0, 32).data
        right_half = crop_depth(Tensor(ramp), (64, 64), 0, 32, 32).data
        assert left_half.shape == right_half.shape == (1, 1, 8, 8)
        np.testing.assert_allclose(left_half[0, 0, 3], np.arange(8) / 15.0, atol=1e-6)
        np.testing.assert_allclose(right_half[0, 0, 3], np.arange(8, 16) / 15.0, atol=1e-6)


class TestTrainConfig:
    def test_defaults(self):
        config = build_train_config()
        assert (config.lr0, config.beta1, config.beta2, config.eps) == (1e-4, 0.9, 0.999, 1e-8)
        assert config.cosine_weight == 0.1

    @pytest.mark.parametrize("field, value", [
        ("lr0", 0.0), ("beta1", 1.0), ("cosine_weight", -0.1), ("patch", 0), ("prefetch", -1), ("extra", 1),
    ])
    def test_invalid(self, field, value):
        with pytest.raises(ConfigError, match="Invalid train config"):
            build_train_config(**{field: value})

    def test_patch_must_fit_model(self, tiny_config_l2):
        with pytest.raises(ConfigError, match="divisible by 16"):
            build_train_config(patch=24).check_model(tiny_config_l2)

    def test_hash(self, tiny_config, tiny_config_l2):
        config = tiny_train_config()
        assert config.config_hash() == tiny_train_config().config_hash()
        assert config.config_hash() != tiny_train_config(seed=8).config_hash()
        assert config.config_hash(tiny_config) != config.config_hash(tiny_config_l2)

    def test_shipped_tiny_config(self, fixtures_dir):
        from edibnet.io import load_config_file

        config = build_train_config(**load_config_file(fixtures_dir / "configs" / "tiny_train.txt"))
        assert (config.patch, config.batch, config.max_steps) == (32, 2, 2)


class TestTrainer:
    def test_deterministic(self, train_samples, tiny_config, kernel_bank, tmp_path):
        paths = [tmp_path / "a.edbw", tmp_path / "b.edbw"]
        a, b = (train(train_samples, tiny_config, tiny_train_config(), kernel_bank, checkpoint_path=p) for p in paths)
        assert a.curve == b.curve
        assert paths[0].read_bytes() == paths[1].read_bytes()
        for first, second in zip(sidecar_paths(paths[0]), sidecar_paths(paths[1])):
            assert first.read_bytes() == second.read_bytes()

    def test_patches_match_blurring_the_whole_image(self, rng, make_image, tiny_config):
        image = make_image(rng, 56, 72)
        sample = TrainSample("wide", image, DepthMap(Tensor(rng.uniform(0, 1, (1, 1, 14, 18)))))
        bank = KernelBank([BlurKernel.box(5), BlurKernel("corner3", np.eye(3))])
        trainer = Trainer([sample], tiny_config, tiny_train_config(batch=1, max_steps=8), bank)
        for step in range(8):
            batch = trainer.batch_for_step(step)
            full = apply_blur(image, bank.by_name(batch.kernel_ids[0])).data
            origins = [
                (top, left)
                for top in range(0, 56 - 32 + 1, 8)
                for left in range(0, 72 - 32 + 1, 8)
                if np.array_equal(image.data[:, :, top:top + 32, left:left + 32], batch.sharp.data)
            ]
            assert len(origins) == 1
            top, left = origins[0]
            np.testing.assert_allclose(batch.blurred.data, full[:, :, top:top + 32, left:left + 32], atol=1e-6)

    def test_prefetch_does_not_change_result(self, train_samples, tiny_config, kernel_bank):
        plain = train(train_samples, tiny_config, tiny_train_config(max_steps=3, prefetch=0), kernel_bank)
        ahead = train(train_samples, tiny_config, tiny_train_config(max_steps=3, prefetch=2), kernel_bank)
        assert plain.curve == ahead.curve
        assert_same_params(plain.checkpoint.params, ahead.checkpoint.params)

    def test_step_changes_params(self, train_samples, tiny_config, kernel_bank):
        trainer = Trainer(train_samples, tiny_config, tiny_train_config(), kernel_bank)
        before = trainer.params.copy()
        record = trainer.step(trainer.batch_for_step(0))
        assert record.step == 0 and record.lr == pytest.approx(1e-3)
        changed = [n for n in before.names() if not np.array_equal(before[n].data, trainer.params[n].data)]
        assert changed
        assert trainer.state.step == 1

    def test_zero_lr_on_fixed_batch_gives_flat_curve(self, rng, tiny_config):
        image = Tensor(rng.random((1, 3, 32, 32)))
        sample = TrainSample("only", image, DepthMap(Tensor(rng.uniform(0, 1, (1, 1, 8, 8)))))
        trainer = Trainer(
            [sample], tiny_config, tiny_train_config(batch=1, max_steps=4, cosine_weight=0.0),
            KernelBank([BlurKernel.box(3)]), schedule=lambda step, total: 0.0,
        )
        curve = trainer.run().curve
        assert len(curve) == 4
        assert len({record.total for record in curve}) == 1
        assert all(record.lr == 0.0 for record in curve)

    def test_batch_is_function_of_step(self, train_samples, tiny_config, kernel_bank):
        trainer = Trainer(train_samples, tiny_config, tiny_train_config(), kernel_bank)
        a, b = trainer.batch_for_step(1), trainer.batch_for_step(1)
        np.testing.assert_array_equal(a.blurred.data, b.blurred.data)
        assert a.kernel_ids == b.kernel_ids
        assert a.blurred.shape == (2, 3, 32, 32)
        assert a.depth.shape == (2, 1, 8, 8)

    def test_resume_matches_uninterrupted_run(self, train_samples, tiny_config, kernel_bank, tmp_path):
        config = tiny_train_config(max_steps=4)
        full = train(train_samples, tiny_config, config, kernel_bank)

        first = Trainer(train_samples, tiny_config, config, kernel_bank)
        for batch in first.batches(0, 2):
            first.step(batch)
        path = tmp_path / "half.edbw"
        save_checkpoint(first.checkpoint(2), path)
        assert all(p.is_file() for p in sidecar_paths(path))

        resumed = Trainer(train_samples, tiny_config, config, kernel_bank, resume=load_checkpoint(path, tiny_config))
        result = resumed.run()
        assert result.curve == full.curve[2:]
        assert_same_params(result.checkpoint.params, full.checkpoint.params)

    def test_resume_past_end(self, train_samples, tiny_config, kernel_bank):
        trainer = Trainer(train_samples, tiny_config, tiny_train_config(), kernel_bank)
        with pytest.raises(ConfigError, match="past the last step"):
            Trainer(train_samples, tiny_config, tiny_train_config(), kernel_bank, resume=trainer.checkpoint(5))

    def test_non_finite_loss_reports_step(self, train_samples, tiny_config, kernel_bank, monkeypatch):
        def broken_forward(blurred, depth, config, params):
            return Tensor(np.full(blurred.shape, np.nan))

        monkeypatch.setattr("edibnet.training.trainer.forward", broken_forward)
        trainer = Trainer(train_samples, tiny_config, tiny_train_config(), kernel_bank)
        with pytest.raises(NumericError, match="step 0, lr 1.000e-03"):
            trainer.run()

    def test_validation_each_epoch(self, train_samples, tiny_config, kernel_bank):
        config = tiny_train_config(epochs=2, max_steps=None, val_images=1)
        result = train(train_samples, tiny_config, config, kernel_bank)
        assert len(result.curve) == 2
        assert len(result.val_psnr) == 2
        assert all(math.isfinite(value) for value in result.val_psnr)

    def test_curve_and_checkpoint_files(self, train_samples, tiny_config, kernel_bank, tmp_path):
        curve_path, weights = tmp_path / "curve.csv", tmp_path / "w.edbw"
        train(train_samples, tiny_config, tiny_train_config(max_steps=3), kernel_bank,
              curve_path=curve_path, checkpoint_path=weights)
        lines = curve_path.read_text().splitlines()
        assert lines[0] == ",".join(CURVE_FIELDS)
        assert [line.split(",")[0] for line in lines[1:]] == ["0", "1", "2"]
        assert load_checkpoint(weights, tiny_config).step == 3

    def test_no_training_images_left(self, train_samples, tiny_config, kernel_bank):
        with pytest.raises(ConfigError, match="leaves no training images"):
            Trainer(train_samples, tiny_config, tiny_train_config(val_images=3), kernel_bank)

    def test_image_smaller_than_patch(self, rng, tiny_config, kernel_bank):
        sample = TrainSample("small", Tensor(rng.random((1, 3, 16, 16))), DepthMap.constant(0.5, 1, 4, 4))
        with pytest.raises(DataError, match="smaller than patch"):
            Trainer([sample], tiny_config, tiny_train_config(), kernel_bank)

    def test_missing_depth(self, rng, tiny_config, kernel_bank):
        sample = TrainSample("flat", Tensor(rng.random((1, 3, 32, 32))), None)
        with pytest.raises(DataError, match="has no depth map"):
            Trainer([sample], tiny_config, tiny_train_config(), kernel_bank)

    def test_depth_free_model_ignores_depth(self, rng, make_config, kernel_bank):
        config = make_config(use_depth=False)
        sample = TrainSample("flat", Tensor(rng.random((1, 3, 32, 32))), None)
        result = train([sample], config, tiny_train_config(batch=1), kernel_bank)
        assert len(result.curve) == 2


class TestCheckpoint:
    def test_round_trip(self, train_samples, tiny_config, kernel_bank, tmp_path):
        trainer = Trainer(train_samples, tiny_config, tiny_train_config(), kernel_bank)
        trainer.step(trainer.batch_for_step(0))
        path = tmp_path / "ck.edbw"
        save_checkpoint(trainer.checkpoint(1), path)
        loaded = load_checkpoint(path, tiny_config)
        assert (loaded.step, loaded.optimizer.step, loaded.config_hash) == (1, 1, trainer.config_hash)
        assert_same_params(loaded.params, trainer.params)
        for name in trainer.params.names():
            np.testing.assert_array_equal(loaded.optimizer.m[name], trainer.state.m[name])
            np.testing.assert_array_equal(loaded.optimizer.v[name], trainer.state.v[name])

    def test_missing_sidecar(self, train_samples, tiny_config, kernel_bank, tmp_path):
        trainer = Trainer(train_samples, tiny_config, tiny_train_config(), kernel_bank)
        path = tmp_path / "ck.edbw"
        save_checkpoint(trainer.checkpoint(0), path)
        sidecar_paths(path)[0].unlink()
        with pytest.raises(DataError, match="lacks its sidecars"):
            load_checkpoint(path, tiny_config)

    def test_malformed_metadata(self, train_samples, tiny_config, kernel_bank, tmp_path):
        trainer = Trainer(train_samples, tiny_config, tiny_train_config(), kernel_bank)
        path = tmp_path / "ck.edbw"
        save_checkpoint(trainer.checkpoint(0), path)
        sidecar_paths(path)[1].write_text('{"step": "x"}')
        with pytest.raises(DataError, match="Malformed checkpoint metadata"):
            load_checkpoint(path, tiny_config)



def textured_scene(rng, side):
    """Flat rectangles over mid-frequency stripes, with a depth ramp; values in [0, 1]."""
    yy, xx = np.mgrid[0:side, 0:side].astype(np.float64)
    planes = np.empty((3, side, side))
    for c in range(3):
        period, angle = rng.uniform(10.0, 30.0), rng.uniform(0.0, np.pi)
        phase = 2 * np.pi * (xx * np.cos(angle) + yy * np.sin(angle)) / period
        planes[c] = 0.5 + 0.2 * np.sin(phase)
    for _ in range(12):
        top, left = rng.integers(0, side - 32, size=2)
        h, w = rng.integers(16, 96, size=2)
        planes[:, top:top + h, left:left + w] = rng.uniform(0.1, 0.9, (3, 1, 1))
    depth = np.linspace(0.2, 0.9, side // 4)[:, None] * np.ones((1, side // 4))
    return Tensor(planes[None]), DepthMap(Tensor(depth[None, None]))


@pytest.mark.slow
class TestOverfit:
    def test_loss_drops_on_one_image(self, make_image, tiny_config):
        sample = TrainSample("one", make_image(np.random.default_rng(3), 32, 32), DepthMap.constant(0.5, 1, 8, 8))
        config = tiny_train_config(batch=1, max_steps=150, lr0=2e-3)
        curve = train([sample], tiny_config, config, KernelBank([BlurKernel.box(5)])).curve
        assert np.mean([r.total for r in curve[-10:]]) < 0.9 * np.mean([r.total for r in curve[:10]])

    def test_restores_training_set(self, repo_root):
        rng = np.random.default_rng(11)
        samples = [TrainSample(f"scene{i}", *textured_scene(rng, 256)) for i in range(5)]
        bank = KernelBank([load_kernel(repo_root / "kernels" / f"{name}.txt")
                           for name in ("gauss9", "disk7", "motion_h9", "motion_v11")])
        config = tiny_train_config(patch=256, batch=1, max_steps=2000, lr0=2e-3)
        gains = {}
        for use_depth in (True, False):
            model = build_model_config(
                base_channels=8, use_depth=use_depth, encoder_blocks=(1, 1, 2), decoder_blocks=(2, 1, 1)
            )
            params = train(samples, model, config, bank).checkpoint.params
            before, after = [], []
            for sample in samples:
                for kernel in bank:
                    blurred = apply_blur(sample.image, kernel)
                    restored = forward(blurred, sample.depth if use_depth else None, model, params)
                    before.append(psnr(blurred, sample.image))
                    after.append(psnr(Tensor(np.clip(restored.data, 0.0, 1.0)), sample.image))
            gains[use_depth] = float(np.mean(after) - np.mean(before))
        assert gains[True] >= 3.0 and gains[False] >= 3.0, gains
        assert gains[True] >= gains[False] - 0.5, gains
