"""
AdaCos identity head.

Logits are ``s · cos(θ)`` between the normalized latent code and the
normalized class weights. In dynamic mode the scale s is re-estimated from
the current batch before the loss is computed, treated as a constant for
backpropagation, and clamped to ``[MIN_SCALE, fixed_scale(C)]``.
"""

import math
from typing import Optional, Tuple

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..utils.exception_handler import ConfigError, NumericError, ShapeError

MIN_SCALE = 1e-3
_COS_CLAMP = 1.0 - 1e-7


def fixed_scale(n_classes: int) -> float:
    """√2 · ln(C − 1), floored at MIN_SCALE (it is zero for C = 2)."""
    if n_classes < 2:
        raise ConfigError(f"AdaCos needs at least 2 classes, got {n_classes}")
    return max(math.sqrt(2.0) * math.log(n_classes - 1), MIN_SCALE)


class AdaCosHead(nn.Module):
    """Class weights plus the adaptive scale."""

    def __init__(self, n_classes: int, latent_dim: int, mode: str = "dynamic",
                 scale: Optional[float] = None):
        super().__init__()
        if mode not in ("dynamic", "fixed"):
            raise ConfigError(f"Unknown AdaCos mode '{mode}'")
        self.n_classes = n_classes
        self.latent_dim = latent_dim
        self.mode = mode
        self.max_scale = fixed_scale(n_classes)
        initial = self.max_scale if scale is None else float(scale)
        if not math.isfinite(initial) or initial <= 0:
            raise ConfigError(f"AdaCos scale must be positive and finite, got {initial}")

        self.class_weights = nn.Parameter(F.normalize(torch.randn(n_classes, latent_dim), dim=1))
        # float64 so checkpoints and reports keep the exact scale
        self.register_buffer("scale", torch.tensor(initial, dtype=torch.float64))

    @torch.no_grad()
    def renormalize_(self) -> None:
        """Project class weights back onto the unit sphere."""
        self.class_weights.copy_(F.normalize(self.class_weights, dim=1))

    def cosine(self, w: torch.Tensor) -> torch.Tensor:
        if w.dim() != 2 or w.shape[1] != self.latent_dim:
            raise ShapeError(f"AdaCos expects N×{self.latent_dim} codes, got {tuple(w.shape)}")
        if bool((w.norm(dim=1) == 0).any()):
            raise NumericError("AdaCos received a zero-norm latent code")
        return F.linear(F.normalize(w, dim=1), F.normalize(self.class_weights, dim=1))

    @torch.no_grad()
    def update_scale(self, cos: torch.Tensor, labels: torch.Tensor) -> float:
        """Re-estimate s from one batch of cosines and return the new value."""
        cos = cos.detach().to(torch.float64)
        one_hot = F.one_hot(labels, num_classes=self.n_classes).bool()
        s = float(self.scale)

        others = torch.where(one_hot, torch.zeros_like(cos), torch.exp(s * cos))
        b_avg = float(others.sum(dim=1).mean())
        theta = torch.acos(cos.clamp(-_COS_CLAMP, _COS_CLAMP))
        theta_med = float(torch.median(theta[one_hot]))
        if b_avg <= 0 or not math.isfinite(b_avg):
            raise NumericError(f"AdaCos batch statistic B_avg={b_avg} is not usable")

        new_scale = math.log(b_avg) / math.cos(min(math.pi / 4, theta_med))
        new_scale = min(max(new_scale, MIN_SCALE), self.max_scale)
        self.scale.fill_(new_scale)
        return new_scale

    def forward(self, w: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
        if labels.shape[0] != w.shape[0]:
            raise ShapeError(f"{w.shape[0]} codes but {labels.shape[0]} labels")
        if bool(((labels < 0) | (labels >= self.n_classes)).any()):
            raise ShapeError(f"Label out of range for {self.n_classes} classes")
        cos = self.cosine(w)
        if self.mode == "dynamic" and self.training:
            self.update_scale(cos, labels)
        logits = self.scale.to(cos.dtype) * cos
        return F.cross_entropy(logits, labels)

    @torch.no_grad()
    def predict(self, w: torch.Tensor) -> torch.Tensor:
        return self.cosine(w).argmax(dim=1)


def loss_adacos(w: torch.Tensor, labels: torch.Tensor, head: AdaCosHead) -> Tuple[torch.Tensor, AdaCosHead]:
    """Cross-entropy over scaled cosine logits; returns the (possibly rescaled) head."""
    return head(w, labels), head
