# edibnet/training/trainer.py
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterator, List, NamedTuple, Optional, Sequence, Union
import csv
import logging
import math
import queue
import threading

import numpy as np

from ..blur import KernelBank, apply_blur, choose_kernel, make_pair
from ..errors import ConfigError, DataError, NumericError
from ..io import TrainSample, crop, pad_reflectless
from ..metrics import psnr
from ..model import ModelConfig, ParamStore, forward, init_params
from ..tensor import AdamState, GradTape, Tensor, adam_step, backward
from ..utils.messages import epoch_message
from .checkpoint import Checkpoint, save_checkpoint
from .config import TrainConfig
from .losses import loss_terms
from .sampling import sample_patch
from .schedule import cosine_lr

# Seed-stream tags; training slots use [seed, step, slot, tag].
KERNEL_STREAM = 0
CROP_STREAM = 1
VALIDATION_STREAM = 2 ** 31 - 1

CURVE_FIELDS = ("step", "lr", "l1", "cosine", "total")

Schedule = Callable[[int, int], float]


class Batch(NamedTuple):
    step: int
    blurred: Tensor
    sharp: Tensor
    depth: Optional[Tensor]
    kernel_ids: List[str]


@dataclass(frozen=True)
class LossRecord:
    step: int
    lr: float
    l1: float
    cosine: float
    total: float


class EvalSummary(NamedTuple):
    psnr_blurred: float
    psnr_pred: float


class TrainResult(NamedTuple):
    checkpoint: Checkpoint
    curve: List[LossRecord]
    val_psnr: List[float]


class Trainer:
    """
    Single-threaded optimization loop.

    Batch composition is a pure function of (seed, step): the epoch order is a
    permutation drawn from ``[seed, epoch]`` and every slot draws its kernel and
    crop from ``[seed, step, slot, stream]``. A background producer may build
    batches ahead of time; it runs the same function in step order, so
    prefetching never changes what the optimizer sees.
    """

    def __init__(
        self,
        samples: Sequence[TrainSample],
        model_config: ModelConfig,
        train_config: TrainConfig,
        bank: KernelBank,
        resume: Optional[Checkpoint] = None,
        schedule: Optional[Schedule] = None,
        curve_path: Optional[Union[str, Path]] = None,
        checkpoint_path: Optional[Union[str, Path]] = None,
        logger: logging.Logger = None,
    ):
        self.logger = logger or logging.getLogger(self.__class__.__name__)
        train_config.check_model(model_config)
        if len(samples) <= train_config.val_images:
            raise ConfigError(
                f"val_images={train_config.val_images} leaves no training images out of {len(samples)}"
            )
        split = len(samples) - train_config.val_images
        self.train_samples = list(samples[:split])
        self.val_samples = list(samples[split:])
        for sample in self.train_samples:
            _, _, h, w = sample.image.shape
            if h < train_config.patch or w < train_config.patch:
                raise DataError(f"Training image '{sample.name}' ({h}x{w}) is smaller than patch {train_config.patch}")
        for sample in samples:
            if model_config.use_depth and sample.depth is None:
                raise DataError(f"Training image '{sample.name}' has no depth map but the model uses depth")

        self.model = model_config
        self.config = train_config
        self.bank = bank
        self.margin = max(max(kernel.shape) // 2 for kernel in bank)
        self.schedule = schedule or (lambda step, total: cosine_lr(step, total, train_config.lr0))
        self.curve_path = Path(curve_path) if curve_path else None
        self.checkpoint_path = Path(checkpoint_path) if checkpoint_path else None
        self.config_hash = train_config.config_hash(model_config)

        self.steps_per_epoch = math.ceil(len(self.train_samples) / train_config.batch)
        self.total_steps = train_config.max_steps or train_config.epochs * self.steps_per_epoch

        if resume is not None:
            if resume.config_hash != self.config_hash:
                self.logger.warning("Resuming from a checkpoint written with a different configuration")
            self.params = resume.params
            self.state = resume.optimizer
            self.start_step = resume.step
        else:
            self.params = init_params(model_config, seed=train_config.seed)
            self.state = AdamState.for_params(self.params)
            self.start_step = 0
        if self.start_step > self.total_steps:
            raise ConfigError(f"Checkpoint step {self.start_step} is past the last step {self.total_steps}")

    # --- batches ---------------------------------------------------------------

    def sample_index(self, step: int, slot: int) -> int:
        epoch, within = divmod(step, self.steps_per_epoch)
        order = np.random.default_rng([self.config.seed, epoch]).permutation(len(self.train_samples))
        return int(order[(within * self.config.batch + slot) % len(self.train_samples)])

    def _slot(self, step: int, slot: int):
        sample = self.train_samples[self.sample_index(step, slot)]
        patch, m = self.config.patch, self.margin
        rng = np.random.default_rng([self.config.seed, step, slot, CROP_STREAM])
        depth = sample.depth if self.model.use_depth else None
        cut = sample_patch(sample.image, depth, patch, rng, align=self.model.spatial_multiple, margin=m)

        # Blurring the edge-replicated window equals blurring the whole image and cropping.
        pair = make_pair(cut.image, self.bank, [self.config.seed, step, slot, KERNEL_STREAM])
        inner = (slice(None), slice(None), slice(m, m + patch), slice(m, m + patch))
        depth_crop = None if cut.depth is None else cut.depth.data
        return pair.blurred.data[inner], pair.sharp.data[inner], depth_crop, pair.kernel_id

    def batch_for_step(self, step: int) -> Batch:
        slots = [self._slot(step, b) for b in range(self.config.batch)]
        depth = None
        if self.model.use_depth:
            shapes = {s[2].shape for s in slots}
            if len(shapes) != 1:
                raise DataError(f"Step {step}: depth patches of different sizes {sorted(shapes)} in one batch")
            depth = Tensor(np.concatenate([s[2] for s in slots]))
        return Batch(
            step=step,
            blurred=Tensor(np.concatenate([s[0] for s in slots])),
            sharp=Tensor(np.concatenate([s[1] for s in slots])),
            depth=depth,
            kernel_ids=[s[3] for s in slots],
        )

    def batches(self, start: int, stop: int) -> Iterator[Batch]:
        if self.config.prefetch == 0:
            for step in range(start, stop):
                yield self.batch_for_step(step)
            return

        ready: "queue.Queue" = queue.Queue(maxsize=self.config.prefetch)
        done = threading.Event()

        def offer(item) -> bool:
            while not done.is_set():
                try:
                    ready.put(item, timeout=0.1)
                    return True
                except queue.Full:
                    continue
            return False

        def produce():
            try:
                for step in range(start, stop):
                    if not offer(self.batch_for_step(step)):
                        return
            except Exception as e:  # re-raised by the consumer
                offer(e)

        worker = threading.Thread(target=produce, name="edibnet-prefetch", daemon=True)
        worker.start()
        try:
            for _ in range(start, stop):
                item = ready.get()
                if isinstance(item, Exception):
                    raise item
                yield item
        finally:
            done.set()
            worker.join(timeout=5.0)

    # --- evaluation ------------------------------------------------------------

    def evaluate(self, samples: Sequence[TrainSample], params: Optional[ParamStore] = None) -> EvalSummary:
        """Mean PSNR of blurred and restored full images, kernels drawn from the validation stream."""
        params = params or self.params
        before, after = [], []
        for i, sample in enumerate(samples):
            kernel = choose_kernel(self.bank, [self.config.seed, VALIDATION_STREAM, i])
            blurred = apply_blur(sample.image, kernel)
            padded, box = pad_reflectless(blurred, self.model.spatial_multiple)
            depth = sample.depth.tensor if (self.model.use_depth and sample.depth) else None
            pred = crop(forward(padded, depth, self.model, params), box)
            before.append(psnr(blurred, sample.image))
            after.append(psnr(pred, sample.image))
        return EvalSummary(float(np.mean(before)), float(np.mean(after)))

    # --- loop ------------------------------------------------------------------

    def _open_curve(self):
        if self.curve_path is None:
            return None, None
        append = self.start_step > 0 and self.curve_path.exists()
        handle = self.curve_path.open("a" if append else "w", newline="")
        writer = csv.writer(handle)
        if not append:
            writer.writerow(CURVE_FIELDS)
        return handle, writer

    def step(self, batch: Batch) -> LossRecord:
        lr = self.schedule(batch.step, self.total_steps)
        terms = None
        try:
            with GradTape() as tape:
                pred = forward(batch.blurred, batch.depth, self.model, self.params)
                terms = loss_terms(pred, batch.sharp, self.config.cosine_weight)
            grads = backward(tape, terms.total)
        except NumericError as e:
            detail = "" if terms is None else f" l1={terms.l1.item():.6g} cosine={terms.cosine.item():.6g}"
            self.logger.error(f"Non-finite values at step {batch.step} (lr={lr:.3e}){detail}")
            raise NumericError(f"step {batch.step}, lr {lr:.3e}{detail}: {e}") from e
        adam_step(self.params, grads, self.state, lr, self.config.beta1, self.config.beta2, self.config.eps)
        return LossRecord(batch.step, lr, terms.l1.item(), terms.cosine.item(), terms.total.item())

    def checkpoint(self, step: int) -> Checkpoint:
        return Checkpoint(params=self.params, optimizer=self.state, step=step, config_hash=self.config_hash)

    def run(self) -> TrainResult:
        self.logger.info(
            f"Training {len(self.train_samples)} images ({len(self.val_samples)} held out), "
            f"steps {self.start_step}..{self.total_steps}, {self.steps_per_epoch} per epoch"
        )
        curve: List[LossRecord] = []
        val_psnr: List[float] = []
        handle, writer = self._open_curve()
        try:
            for batch in self.batches(self.start_step, self.total_steps):
                record = self.step(batch)
                curve.append(record)
                if writer is not None:
                    writer.writerow([record.step, f"{record.lr:.9g}", f"{record.l1:.9g}",
                                     f"{record.cosine:.9g}", f"{record.total:.9g}"])
                self.logger.info(
                    f"step {record.step} lr={record.lr:.3e} l1={record.l1:.5f} "
                    f"cosine={record.cosine:.5f} total={record.total:.5f} kernels={','.join(batch.kernel_ids)}"
                )
                done = record.step + 1
                if done % self.steps_per_epoch == 0 or done == self.total_steps:
                    self._end_epoch(done, val_psnr)
        finally:
            if handle is not None:
                handle.close()
        return TrainResult(self.checkpoint(self.total_steps), curve, val_psnr)

    def _end_epoch(self, done: int, val_psnr: List[float]) -> None:
        epoch = math.ceil(done / self.steps_per_epoch)
        if self.val_samples:
            summary = self.evaluate(self.val_samples)
            val_psnr.append(summary.psnr_pred)
            self.logger.info(epoch_message(epoch, summary.psnr_pred, summary.psnr_blurred))
        if self.checkpoint_path is not None:
            save_checkpoint(self.checkpoint(done), self.checkpoint_path)


def train(
    dataset: Sequence[TrainSample],
    model_config: ModelConfig,
    train_config: TrainConfig,
    bank: KernelBank,
    **kwargs,
) -> TrainResult:
    """Build a Trainer and run it to the last step; see Trainer for the keyword options."""
    return Trainer(dataset, model_config, train_config, bank, **kwargs).run()
