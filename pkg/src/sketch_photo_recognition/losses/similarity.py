"""
Image similarity losses between synthesized and target images.
"""

import torch
import torch.nn.functional as F

from ..utils.exception_handler import ConfigError, ShapeError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
# images live in [-1, 1]
DATA_RANGE = 2.0
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA,
                    dtype: torch.dtype = torch.float32) -> torch.Tensor:
    coords = torch.arange(size, dtype=torch.float64) - (size - 1) / 2.0
    g = torch.exp(-(coords ** 2) / (2 * sigma ** 2))
    g = g / g.sum()
    return torch.outer(g, g).to(dtype)


def _as_batch(image: torch.Tensor) -> torch.Tensor:
    return image.unsqueeze(0) if image.dim() == 3 else image


def ssim(x: torch.Tensor, y: torch.Tensor, window_size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA,
         data_range: float = DATA_RANGE) -> torch.Tensor:
    """Mean structural similarity over valid Gaussian windows and channels."""
    x, y = _as_batch(x), _as_batch(y)
    if x.shape != y.shape:
        raise ShapeError(f"SSIM inputs differ in shape: {tuple(x.shape)} vs {tuple(y.shape)}")
    if min(x.shape[-2:]) < window_size:
        raise ShapeError(f"Images of size {tuple(x.shape[-2:])} are smaller than the SSIM window {window_size}")

    channels = x.shape[1]
    window = gaussian_window(window_size, sigma, x.dtype).to(x.device)
    window = window.expand(channels, 1, window_size, window_size)

    def filt(t: torch.Tensor) -> torch.Tensor:
        return F.conv2d(t, window, groups=channels)

    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    mu_x, mu_y = filt(x), filt(y)
    sigma_x = filt(x * x) - mu_x * mu_x
    sigma_y = filt(y * y) - mu_y * mu_y
    sigma_xy = filt(x * y) - mu_x * mu_y

    numerator = (2 * mu_x * mu_y + c1) * (2 * sigma_xy + c2)
    denominator = (mu_x * mu_x + mu_y * mu_y + c1) * (sigma_x + sigma_y + c2)
    return (numerator / denominator).mean()


def loss_similarity(generated: torch.Tensor, target: torch.Tensor, mode: str = "l1") -> torch.Tensor:
    """L1, 1 − SSIM, or their sum."""
    if generated.shape != target.shape:
        raise ShapeError(f"Similarity inputs differ in shape: {tuple(generated.shape)} vs {tuple(target.shape)}")
    if mode == "l1":
        return F.l1_loss(generated, target)
    if mode == "ssim":
        return 1.0 - ssim(generated, target)
    if mode == "l1_plus_ssim":
        return F.l1_loss(generated, target) + (1.0 - ssim(generated, target))
    raise ConfigError(f"Unknown similarity mode '{mode}'")
