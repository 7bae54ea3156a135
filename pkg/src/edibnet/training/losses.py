# edibnet/training/losses.py
from typing import NamedTuple

from ..errors import ShapeError
from ..tensor import Tensor, absolute, add, affine, cosine_similarity, mean, sub


class LossTerms(NamedTuple):
    total: Tensor
    l1: Tensor
    cosine: Tensor


def loss_terms(pred: Tensor, target: Tensor, cosine_weight: float) -> LossTerms:
    """
    mean|pred - target| + lambda * mean_n(1 - cos(pred_n, target_n)).

    Cosine similarity is taken over each sample's flattened values; a zero
    vector has similarity 0.
    """
    if pred.shape != target.shape:
        raise ShapeError(f"loss: prediction {pred.shape} and target {target.shape} differ")
    l1 = mean(absolute(sub(pred, target)))
    cosine = affine(mean(cosine_similarity(pred, target)), scale=-1.0, shift=1.0)
    return LossTerms(add(l1, affine(cosine, scale=cosine_weight)), l1, cosine)


def loss(pred: Tensor, target: Tensor, cosine_weight: float) -> Tensor:
    return loss_terms(pred, target, cosine_weight).total
