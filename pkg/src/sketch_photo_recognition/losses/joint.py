"""
Weighted joint objective.
"""

import math
from dataclasses import dataclass, fields
from typing import Dict, Union

import torch

from ..config.settings import LossWeights
from ..utils.exception_handler import NumericError

Scalar = Union[float, torch.Tensor]


@dataclass
class LossComponents:
    """Unweighted loss terms for one batch; GAN and similarity are summed over directions."""
    adacos: Scalar = 0.0
    gan: Scalar = 0.0
    similarity: Scalar = 0.0
    collaborative: Scalar = 0.0

    def as_floats(self) -> Dict[str, float]:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        return {name: v.item() if isinstance(v, torch.Tensor) else float(v) for name, v in values.items()}


@dataclass
class JointLoss:
    total: Scalar
    components: LossComponents


def joint_loss(components: LossComponents, weights: LossWeights) -> JointLoss:
    """L = L_AdaCos + λ_GAN·L_GAN + λ_s·L_s + λ_w·L_w."""
    for name, value in components.as_floats().items():
        if not math.isfinite(value):
            raise NumericError(f"Loss component '{name}' is not finite ({value})")
    total = (
        components.adacos
        + weights.lambda_gan * components.gan
        + weights.lambda_s * components.similarity
        + weights.lambda_w * components.collaborative
    )
    return JointLoss(total=total, components=components)
