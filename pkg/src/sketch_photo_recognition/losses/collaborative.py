import torch
import torch.nn.functional as F

from ..utils.exception_handler import ShapeError


def loss_collaborative(w_photo: torch.Tensor, w_sketch: torch.Tensor) -> torch.Tensor:
    """Mean absolute difference between paired photo and sketch codes."""
    if w_photo.shape != w_sketch.shape:
        raise ShapeError(f"Latent codes differ in shape: {tuple(w_photo.shape)} vs {tuple(w_sketch.shape)}")
    return F.l1_loss(w_photo, w_sketch)
