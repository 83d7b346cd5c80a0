"""
Image buffers: PNG I/O, eye alignment and cropping.

An ImageBuffer is a float32 ``H×W×C`` array with values in [-1, 1].
"""

import math
from pathlib import Path
from typing import Optional, Tuple

import cv2
import numpy as np
import numpy.typing as npt
import torch
from PIL import Image

from ..utils.exception_handler import AlignmentError, CropSizeError, DataError
from .manifest import Modality, SampleRecord

ImageBuffer = npt.NDArray[np.float32]
Point = Tuple[float, float]
EyePair = Tuple[Point, Point]


def uint8_to_buffer(pixels: npt.NDArray[np.uint8]) -> ImageBuffer:
    buffer = pixels.astype(np.float32) / 127.5 - 1.0
    if buffer.ndim == 2:
        buffer = buffer[:, :, None]
    return buffer


def buffer_to_uint8(image: ImageBuffer) -> npt.NDArray[np.uint8]:
    pixels = np.clip(np.rint((np.asarray(image, dtype=np.float32) + 1.0) * 127.5), 0, 255).astype(np.uint8)
    if pixels.ndim == 3 and pixels.shape[2] == 1:
        pixels = pixels[:, :, 0]
    return pixels


def load_image(path: Path, channels: int = 3) -> ImageBuffer:
    """Read an 8-bit PNG and map it to [-1, 1] via v/127.5 − 1."""
    try:
        with Image.open(path) as handle:
            pixels = np.asarray(handle.convert("L" if channels == 1 else "RGB"))
    except (OSError, ValueError) as e:
        raise DataError(f"Cannot read image {path}: {e}") from e
    return uint8_to_buffer(pixels)


def save_image(image: ImageBuffer, path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(buffer_to_uint8(image)).save(path, format="PNG")


def to_tensor(image: ImageBuffer) -> torch.Tensor:
    """``H×W×C`` buffer → ``C×H×W`` float32 tensor."""
    return torch.from_numpy(np.ascontiguousarray(np.transpose(image, (2, 0, 1))))


def from_tensor(tensor: torch.Tensor) -> ImageBuffer:
    return np.ascontiguousarray(tensor.detach().cpu().float().numpy().transpose(1, 2, 0))


def similarity_transform(source_eyes: EyePair, target_eyes: EyePair) -> np.ndarray:
    """2×3 rotation+scale+translation matrix taking ``source_eyes`` onto ``target_eyes``."""
    (sx1, sy1), (sx2, sy2) = source_eyes
    (tx1, ty1), (tx2, ty2) = target_eyes
    src_dx, src_dy = sx2 - sx1, sy2 - sy1
    dst_dx, dst_dy = tx2 - tx1, ty2 - ty1
    src_norm = math.hypot(src_dx, src_dy)
    dst_norm = math.hypot(dst_dx, dst_dy)
    if src_norm == 0.0 or dst_norm == 0.0:
        raise AlignmentError("Degenerate eye pair: inter-ocular distance is zero")

    scale = dst_norm / src_norm
    angle = math.atan2(dst_dy, dst_dx) - math.atan2(src_dy, src_dx)
    a, b = scale * math.cos(angle), scale * math.sin(angle)
    tx = tx1 - (a * sx1 - b * sy1)
    ty = ty1 - (b * sx1 + a * sy1)
    return np.array([[a, -b, tx], [b, a, ty]], dtype=np.float64)


def apply_transform(matrix: np.ndarray, point: Point) -> Point:
    x, y = point
    return (matrix[0, 0] * x + matrix[0, 1] * y + matrix[0, 2],
            matrix[1, 0] * x + matrix[1, 1] * y + matrix[1, 2])


def _integer_translation(matrix: np.ndarray) -> Optional[Tuple[int, int]]:
    if not np.allclose(matrix[:, :2], np.eye(2), rtol=0.0, atol=1e-12):
        return None
    tx, ty = matrix[0, 2], matrix[1, 2]
    if abs(tx - round(tx)) > 1e-9 or abs(ty - round(ty)) > 1e-9:
        return None
    return int(round(tx)), int(round(ty))


def warp_image(image: ImageBuffer, matrix: np.ndarray, size: int) -> ImageBuffer:
    """Warp into a ``size×size`` frame with replicated borders.

    Pure integer translations are done by slicing so they stay exact.
    """
    shift = _integer_translation(matrix)
    if shift is not None:
        tx, ty = shift
        h, w, _ = image.shape
        pad = max(0, abs(tx), abs(ty), size - h + abs(ty), size - w + abs(tx))
        padded = np.pad(image, ((pad, pad), (pad, pad), (0, 0)), mode="edge")
        top, left = pad - ty, pad - tx
        return np.ascontiguousarray(padded[top:top + size, left:left + size])

    warped = cv2.warpAffine(
        np.ascontiguousarray(image, dtype=np.float32),
        matrix,
        (size, size),
        flags=cv2.INTER_LINEAR,
        borderMode=cv2.BORDER_REPLICATE,
    )
    if warped.ndim == 2:
        warped = warped[:, :, None]
    return np.clip(warped, -1.0, 1.0)


def align_image(image: ImageBuffer, left_eye: Point, right_eye: Point,
                canonical_eyes: EyePair, initial_size: int = 272) -> ImageBuffer:
    """Similarity-align an in-memory image so its eyes land on ``canonical_eyes``."""
    h, w, _ = image.shape
    for x, y in (left_eye, right_eye):
        if not (0 <= x < w and 0 <= y < h):
            raise AlignmentError(f"Eye coordinate ({x}, {y}) lies outside the {w}×{h} image")
    matrix = similarity_transform((left_eye, right_eye), canonical_eyes)
    return warp_image(image, matrix, initial_size)


def align_and_crop(record: SampleRecord, canonical_eyes: EyePair, initial_size: int = 272,
                   channels: Optional[int] = None) -> ImageBuffer:
    """Load ``record`` and align it by eye position into an ``initial_size`` square."""
    if channels is None:
        channels = 3 if record.modality == Modality.PHOTO else 1
    image = load_image(record.resolved_path, channels=channels)
    return align_image(image, record.left_eye, record.right_eye, canonical_eyes, initial_size)


def crop_at(image: ImageBuffer, top: int, left: int, crop_size: int) -> ImageBuffer:
    return image[top:top + crop_size, left:left + crop_size].copy()


def draw_crop_offset(shape: Tuple[int, ...], crop_size: int, rng: np.random.Generator) -> Tuple[int, int]:
    h, w = shape[0], shape[1]
    if crop_size > h or crop_size > w:
        raise CropSizeError(f"Crop size {crop_size} exceeds image size {h}×{w}")
    top = int(rng.integers(0, h - crop_size + 1))
    left = int(rng.integers(0, w - crop_size + 1))
    return top, left


def random_crop(image: ImageBuffer, crop_size: int, rng: np.random.Generator) -> ImageBuffer:
    """Contiguous ``crop_size`` window at an offset drawn from ``rng``."""
    top, left = draw_crop_offset(image.shape, crop_size, rng)
    return crop_at(image, top, left, crop_size)


def center_crop(image: ImageBuffer, crop_size: int) -> ImageBuffer:
    h, w = image.shape[0], image.shape[1]
    if crop_size > h or crop_size > w:
        raise CropSizeError(f"Crop size {crop_size} exceeds image size {h}×{w}")
    return crop_at(image, (h - crop_size) // 2, (w - crop_size) // 2, crop_size)
