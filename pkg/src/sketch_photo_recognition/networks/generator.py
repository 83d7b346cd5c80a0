"""
Style generators G_p and G_s.

A learned constant is upsampled by style blocks, each
deconvolution → convolution → AdaIN(w) → nonlinearity, then projected to
image channels through tanh. There are no noise inputs and no progressive
growing, so synthesis is a pure function of (w, parameters).
"""

import math

import torch
import torch.nn as nn
import torch.nn.functional as F

from ..config.settings import ModelConfig
from ..utils.exception_handler import ConfigError, ShapeError


def adain(features: torch.Tensor, style_scale: torch.Tensor, style_bias: torch.Tensor,
          eps: float = 1e-5) -> torch.Tensor:
    """Per-sample per-channel normalization followed by a style affine.

    ``style_scale`` and ``style_bias`` are ``N×C`` (or ``C``) tensors.
    """
    channels = features.shape[1]
    if style_scale.shape[-1] != channels or style_bias.shape[-1] != channels:
        raise ShapeError(
            f"AdaIN channel mismatch: features have {channels}, "
            f"style has {style_scale.shape[-1]}/{style_bias.shape[-1]}"
        )
    normalized = F.instance_norm(features, eps=eps)
    return style_scale.reshape(-1, channels, 1, 1) * normalized + style_bias.reshape(-1, channels, 1, 1)


class StyleAffine(nn.Module):
    """Maps a latent code to per-channel AdaIN scale and bias."""

    def __init__(self, latent_dim: int, channels: int):
        super().__init__()
        self.scale = nn.Linear(latent_dim, channels)
        self.bias = nn.Linear(latent_dim, channels)

    def forward(self, w: torch.Tensor):
        return self.scale(w), self.bias(w)


class StyleBlock(nn.Module):
    def __init__(self, in_channels: int, out_channels: int, latent_dim: int, config: ModelConfig):
        super().__init__()
        self.up = nn.ConvTranspose2d(in_channels, out_channels, kernel_size=4, stride=2, padding=1)
        self.conv = nn.Conv2d(out_channels, out_channels, kernel_size=3, padding=1)
        self.style = StyleAffine(latent_dim, out_channels)
        self.eps = config.adain_eps
        if config.generator_activation == "softplus":
            self.act = nn.Softplus()
        else:
            self.act = nn.LeakyReLU(config.leaky_slope)

    def forward(self, x: torch.Tensor, w: torch.Tensor) -> torch.Tensor:
        x = self.conv(self.up(x))
        scale, bias = self.style(w)
        return self.act(adain(x, scale, bias, self.eps))


class StyleGenerator(nn.Module):
    """Light style-based decoder from W to one image modality."""

    def __init__(self, config: ModelConfig, image_size: int, out_channels: int):
        super().__init__()
        ratio = image_size / config.const_size
        n_blocks = round(math.log2(ratio)) if ratio >= 1 else -1
        if n_blocks < 1 or config.const_size * 2 ** n_blocks != image_size:
            raise ConfigError(
                f"image_size {image_size} must be const_size {config.const_size} times a power of two"
            )

        self.latent_dim = config.latent_dim
        self.image_size = image_size
        self.const = nn.Parameter(torch.ones(1, config.generator_base_channels, config.const_size, config.const_size))

        blocks = []
        channels = config.generator_base_channels
        for i in range(n_blocks):
            out_channels_block = max(config.generator_min_channels, config.generator_base_channels // 2 ** (i + 1))
            blocks.append(StyleBlock(channels, out_channels_block, config.latent_dim, config))
            channels = out_channels_block
        self.blocks = nn.ModuleList(blocks)
        self.to_image = nn.Conv2d(channels, out_channels, kernel_size=1)

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def forward(self, w: torch.Tensor) -> torch.Tensor:
        if w.dim() != 2 or w.shape[1] != self.latent_dim:
            raise ShapeError(f"Generator expects N×{self.latent_dim} codes, got {tuple(w.shape)}")
        x = self.const.expand(w.shape[0], -1, -1, -1)
        for block in self.blocks:
            x = block(x, w)
        return torch.tanh(self.to_image(x))


def synthesize(w: torch.Tensor, generator: StyleGenerator) -> torch.Tensor:
    """Image(s) in [-1, 1] for a code ``d`` or a batch ``N×d``."""
    single = w.dim() == 1
    images = generator(w.unsqueeze(0) if single else w)
    return images[0] if single else images
