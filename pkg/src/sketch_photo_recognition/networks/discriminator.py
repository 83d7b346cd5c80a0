"""
70×70 patch discriminators D_p and D_s over channel-concatenated image pairs.
"""

from typing import List, Sequence, Tuple

import torch
import torch.nn as nn

from ..config.settings import ModelConfig
from ..utils.exception_handler import ShapeError

# (kernel, stride) for C64-C128-C256-C512(stride 1)-C1(stride 1)
LAYER_SCHEDULE: Tuple[Tuple[int, int], ...] = ((4, 2), (4, 2), (4, 2), (4, 1), (4, 1))
PADDING = 1


def receptive_field(schedule: Sequence[Tuple[int, int]] = LAYER_SCHEDULE) -> int:
    """Input pixels per side seen by one output unit."""
    field = 1
    for kernel, stride in reversed(schedule):
        field = (field - 1) * stride + kernel
    return field


def output_size(input_size: int, schedule: Sequence[Tuple[int, int]] = LAYER_SCHEDULE,
                padding: int = PADDING) -> int:
    size = input_size
    for kernel, stride in schedule:
        size = (size + 2 * padding - kernel) // stride + 1
    return size


class PatchDiscriminator(nn.Module):
    """Patch classifier returning a map of pre-sigmoid logits."""

    def __init__(self, config: ModelConfig, in_channels: int):
        super().__init__()
        base = config.disc_base_channels
        slope = config.leaky_slope
        (k1, s1), (k2, s2), (k3, s3), (k4, s4), (k5, s5) = LAYER_SCHEDULE

        self.model = nn.Sequential(
            nn.Conv2d(in_channels, base, kernel_size=k1, stride=s1, padding=PADDING),
            nn.LeakyReLU(slope),
            nn.Conv2d(base, base * 2, kernel_size=k2, stride=s2, padding=PADDING),
            nn.InstanceNorm2d(base * 2, affine=True),
            nn.LeakyReLU(slope),
            nn.Conv2d(base * 2, base * 4, kernel_size=k3, stride=s3, padding=PADDING),
            nn.InstanceNorm2d(base * 4, affine=True),
            nn.LeakyReLU(slope),
            nn.Conv2d(base * 4, base * 8, kernel_size=k4, stride=s4, padding=PADDING),
            nn.InstanceNorm2d(base * 8, affine=True),
            nn.LeakyReLU(slope),
            nn.Conv2d(base * 8, 1, kernel_size=k5, stride=s5, padding=PADDING),
        )

    def norm_layers(self) -> List[nn.InstanceNorm2d]:
        return [m for m in self.model if isinstance(m, nn.InstanceNorm2d)]

    def forward(self, conditioning: torch.Tensor, candidate: torch.Tensor) -> torch.Tensor:
        if conditioning.shape[0] != candidate.shape[0] or conditioning.shape[-2:] != candidate.shape[-2:]:
            raise ShapeError(
                f"Discriminator inputs differ in batch or spatial size: "
                f"{tuple(conditioning.shape)} vs {tuple(candidate.shape)}"
            )
        return self.model(torch.cat([conditioning, candidate], dim=1))


def discriminate(conditioning: torch.Tensor, candidate: torch.Tensor, disc: PatchDiscriminator) -> torch.Tensor:
    single = conditioning.dim() == 3
    if single:
        conditioning, candidate = conditioning.unsqueeze(0), candidate.unsqueeze(0)
    logits = disc(conditioning, candidate)
    return logits[0] if single else logits
