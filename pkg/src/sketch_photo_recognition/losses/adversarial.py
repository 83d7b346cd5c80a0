"""
Conditional GAN losses on patch logit maps.
"""

import torch
import torch.nn.functional as F

from ..utils.exception_handler import NumericError


def _check_finite(*logit_maps: torch.Tensor) -> None:
    for logits in logit_maps:
        if not bool(torch.isfinite(logits).all()):
            raise NumericError("Discriminator produced non-finite logits")


def _bce(logits: torch.Tensor, target: float) -> torch.Tensor:
    return F.binary_cross_entropy_with_logits(logits, torch.full_like(logits, target))


def loss_gan_discriminator(real_logits: torch.Tensor, fake_logits: torch.Tensor) -> torch.Tensor:
    """Mean of the real-as-1 and fake-as-0 cross-entropies (ln 2 at zero logits)."""
    _check_finite(real_logits, fake_logits)
    return 0.5 * (_bce(real_logits, 1.0) + _bce(fake_logits, 0.0))


def loss_gan_generator(fake_logits: torch.Tensor) -> torch.Tensor:
    """Non-saturating generator loss."""
    _check_finite(fake_logits)
    return _bce(fake_logits, 1.0)
