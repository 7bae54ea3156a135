# edibnet/cli/commands/train.py
from pathlib import Path
import logging

from ...blur import load_kernel_bank
from ...io import DepthNormalization, load_config_file, load_dataset
from ...training import build_train_config, load_checkpoint, save_checkpoint, train
from ..common import add_config_argument, add_depth_arguments, model_config

logger = logging.getLogger(__name__)

HELP = "train on sharp images blurred on the fly with bank kernels"


def add_arguments(parser):
    parser.add_argument("--data", required=True, help="directory of sharp images, depth maps under depth/")
    parser.add_argument("--kernels", required=True, help="directory of kernel .txt files")
    add_config_argument(parser)
    parser.add_argument("--train-config", default=None, help="key=value training config (omitted: defaults)")
    parser.add_argument("--out-ckpt", required=True, help="checkpoint path; .optim and .json sidecars are written")
    parser.add_argument("--resume", default=None, help="checkpoint to continue from")
    parser.add_argument("--curve", default=None, help="CSV loss curve (step,lr,l1,cosine,total)")
    add_depth_arguments(parser)


def run(args) -> None:
    config = model_config(args)
    values = load_config_file(args.train_config) if args.train_config else {}
    train_config = build_train_config(**values)
    bank = load_kernel_bank(args.kernels)
    dataset = load_dataset(args.data, DepthNormalization(args.depth_normalization), args.depth_units)
    resume = load_checkpoint(args.resume, config) if args.resume else None

    result = train(
        dataset,
        config,
        train_config,
        bank,
        resume=resume,
        curve_path=args.curve,
        checkpoint_path=Path(args.out_ckpt),
    )
    save_checkpoint(result.checkpoint, args.out_ckpt)
    if result.curve:
        last = result.curve[-1]
        logger.info(f"train: finished at step {result.checkpoint.step}, last loss {last.total:.5f}")
