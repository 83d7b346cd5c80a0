"""
Shared mapping network F.

One parameter set encodes both photos and sketches into the intermediate
latent space W. Single-channel sketches are replicated to the photo channel
count so the same first convolution applies.
"""

import torch
import torch.nn as nn

from ..config.settings import ModelConfig
from ..utils.exception_handler import ConfigError, ShapeError


class MappingNetwork(nn.Module):
    """conv(3×3) + leaky-rectifier + maxpool(2×2) stages, then a fully connected head."""

    def __init__(self, config: ModelConfig, image_size: int, in_channels: int = 3):
        super().__init__()
        stride = 2 ** config.encoder_stages
        if image_size % stride:
            raise ConfigError(f"image_size {image_size} is not divisible by 2**encoder_stages={stride}")

        self.image_size = image_size
        self.in_channels = in_channels
        self.latent_dim = config.latent_dim

        layers = []
        channels_prev = in_channels
        channels = config.encoder_base_channels
        for stage in range(config.encoder_stages):
            channels = config.encoder_base_channels * 2 ** stage
            layers += [
                nn.Conv2d(channels_prev, channels, kernel_size=3, padding=1),
                nn.LeakyReLU(config.leaky_slope),
                nn.MaxPool2d(2),
            ]
            channels_prev = channels

        spatial = image_size // stride
        self.features = nn.Sequential(*layers)
        self.fc = nn.Linear(channels * spatial * spatial, config.latent_dim)

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        if images.dim() != 4 or tuple(images.shape[-2:]) != (self.image_size, self.image_size):
            raise ShapeError(
                f"Mapping network expects N×C×{self.image_size}×{self.image_size} input, got {tuple(images.shape)}"
            )
        if images.shape[1] == 1 and self.in_channels != 1:
            images = images.expand(-1, self.in_channels, -1, -1)
        elif images.shape[1] != self.in_channels:
            raise ShapeError(f"Mapping network expects {self.in_channels} channels, got {images.shape[1]}")
        return self.fc(self.features(images).flatten(1))


def encode(image: torch.Tensor, mapping: MappingNetwork) -> torch.Tensor:
    """Latent code(s) for a ``C×H×W`` image or an ``N×C×H×W`` batch."""
    single = image.dim() == 3
    codes = mapping(image.unsqueeze(0) if single else image)
    return codes[0] if single else codes
