"""
Procedural paired photo/sketch dataset for desk-scale runs.

Each identity is a seeded composition of colored geometric primitives with
two dark "eyes"; each view applies a small seeded rotation, shift and
brightness jitter. Sketches are derived from photos by a fixed transform:
grayscale → Sobel edge magnitude → inversion → soft binarization.
Output is a pure function of the spec.
"""

import math
import shutil
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

import cv2
import numpy as np
from PIL import Image, ImageDraw, ImageFilter

from ..utils.exception_handler import ConfigError, ToyDatasetSpecError
from ..utils.logging_utils import ProgressTracker, WorkflowLogger
from .images import ImageBuffer, apply_transform, save_image, uint8_to_buffer
from .manifest import Manifest, Modality, SampleRecord, build_pairing, write_manifest

MANIFEST_NAME = "manifest.tsv"

EYE_HEIGHT = 0.35
EYE_SEPARATION = 0.46

EDGE_SCALE = 1.0
BINARIZE_GAIN = 10.0
BINARIZE_THRESHOLD = 0.7

MAX_ROTATION_DEG = 6.0
MAX_SHIFT = 0.04
MAX_BRIGHTNESS = 12


@dataclass(frozen=True)
class ToyDatasetSpec:
    n_identities: int
    images_per_identity: int = 1
    image_size: int = 64
    seed: int = 0
    identity_offset: int = 0
    photo_only: bool = False

    def validate(self) -> None:
        if self.n_identities < 2:
            raise ToyDatasetSpecError(
                f"n_identities={self.n_identities}: recognition needs at least 2 identities"
            )
        if self.image_size < 16:
            raise ToyDatasetSpecError(f"image_size={self.image_size} is below the 16 px minimum")
        if self.images_per_identity < 1:
            raise ToyDatasetSpecError("images_per_identity must be at least 1")

    def identity_label(self, index: int) -> str:
        return f"id{self.identity_offset + index:05d}"


def _soft_binarize(values: np.ndarray) -> np.ndarray:
    def logistic(x):
        return 1.0 / (1.0 + np.exp(-BINARIZE_GAIN * (x - BINARIZE_THRESHOLD)))

    low, high = logistic(0.0), logistic(1.0)
    return (logistic(values.astype(np.float64)) - low) / (high - low)


def sketch_transform(image: ImageBuffer) -> ImageBuffer:
    """Map any [-1, 1] image to a single-channel sketch-range image."""
    unit = (np.asarray(image, dtype=np.float32) + 1.0) * 0.5
    if unit.shape[2] == 3:
        gray = cv2.cvtColor(np.ascontiguousarray(unit), cv2.COLOR_RGB2GRAY)
    else:
        gray = np.ascontiguousarray(unit[:, :, 0])

    dx = cv2.Sobel(gray, cv2.CV_32F, 1, 0, ksize=3, borderType=cv2.BORDER_REPLICATE)
    dy = cv2.Sobel(gray, cv2.CV_32F, 0, 1, ksize=3, borderType=cv2.BORDER_REPLICATE)
    edges = np.clip(np.sqrt(dx * dx + dy * dy) / EDGE_SCALE, 0.0, 1.0)
    sketch = _soft_binarize(1.0 - edges)
    return np.clip(2.0 * sketch - 1.0, -1.0, 1.0).astype(np.float32)[:, :, None]


def _color(rng: np.random.Generator) -> Tuple[int, int, int]:
    return tuple(int(c) for c in rng.integers(30, 226, size=3))


def render_identity(spec: ToyDatasetSpec, index: int) -> Tuple[Image.Image, Tuple[Tuple[float, float], Tuple[float, float]]]:
    """Un-jittered composition for one identity plus its eye centers."""
    size = spec.image_size
    rng = np.random.default_rng([spec.seed, spec.identity_offset + index])
    canvas = Image.new("RGB", (size, size), _color(rng))
    draw = ImageDraw.Draw(canvas)

    head_w, head_h = rng.uniform(0.55, 0.8) * size, rng.uniform(0.65, 0.9) * size
    draw.ellipse([(size - head_w) / 2, (size - head_h) / 2, (size + head_w) / 2, (size + head_h) / 2],
                 fill=_color(rng))

    for _ in range(int(rng.integers(3, 6))):
        kind = rng.integers(0, 3)
        cx, cy = rng.uniform(0.15, 0.85, size=2) * size
        rx, ry = rng.uniform(0.06, 0.2, size=2) * size
        fill = _color(rng)
        if kind == 0:
            draw.ellipse([cx - rx, cy - ry, cx + rx, cy + ry], fill=fill)
        elif kind == 1:
            draw.rectangle([cx - rx, cy - ry, cx + rx, cy + ry], fill=fill)
        else:
            angle = rng.uniform(0, 2 * math.pi)
            points = [(cx + rx * math.cos(angle + k * 2 * math.pi / 3),
                       cy + ry * math.sin(angle + k * 2 * math.pi / 3)) for k in range(3)]
            draw.polygon(points, fill=fill)

    eye_y = EYE_HEIGHT * size
    half = 0.5 * EYE_SEPARATION * size
    eyes = ((size / 2 - half, eye_y), (size / 2 + half, eye_y))
    radius = max(1.5, 0.045 * size)
    eye_color = tuple(int(c) for c in rng.integers(0, 40, size=3))
    for x, y in eyes:
        draw.ellipse([x - radius, y - radius, x + radius, y + radius], fill=eye_color)
    return canvas, eyes


def render_view(spec: ToyDatasetSpec, index: int, view: int):
    """Jittered photo of one identity and its transformed eye centers."""
    base, eyes = render_identity(spec, index)
    size = spec.image_size
    rng = np.random.default_rng([spec.seed, spec.identity_offset + index, view])
    if view == 0:
        angle, shift, brightness = 0.0, np.zeros(2), 0
    else:
        angle = rng.uniform(-MAX_ROTATION_DEG, MAX_ROTATION_DEG)
        shift = rng.uniform(-MAX_SHIFT, MAX_SHIFT, size=2) * size
        brightness = int(rng.integers(-MAX_BRIGHTNESS, MAX_BRIGHTNESS + 1))

    matrix = cv2.getRotationMatrix2D((size / 2, size / 2), angle, 1.0)
    matrix[:, 2] += shift
    pixels = cv2.warpAffine(np.asarray(base), matrix, (size, size),
                            flags=cv2.INTER_LINEAR, borderMode=cv2.BORDER_REPLICATE)
    smoothed = Image.fromarray(pixels).filter(ImageFilter.GaussianBlur(radius=size / 64))
    pixels = np.clip(np.asarray(smoothed).astype(np.int16) + brightness, 0, 255).astype(np.uint8)
    left, right = (apply_transform(matrix, eye) for eye in eyes)
    return uint8_to_buffer(pixels), left, right


def _prepare_output(output_dir: Path, force: bool) -> None:
    if output_dir.exists() and any(output_dir.iterdir()):
        if not force:
            raise ConfigError(f"Output directory {output_dir} is not empty; pass --force to overwrite")
        for name in ("photos", "sketches"):
            shutil.rmtree(output_dir / name, ignore_errors=True)
        (output_dir / MANIFEST_NAME).unlink(missing_ok=True)
    output_dir.mkdir(parents=True, exist_ok=True)


def generate_toy_dataset(spec: ToyDatasetSpec, output_dir: Path, force: bool = False) -> Manifest:
    """Materialize the dataset under ``output_dir`` and return its manifest."""
    spec.validate()
    output_dir = Path(output_dir)
    _prepare_output(output_dir, force)

    records: List[SampleRecord] = []
    with ProgressTracker.create_spinner("Rendering toy identities") as progress:
        task = progress.add_task("Rendering toy identities", total=spec.n_identities)
        for index in range(spec.n_identities):
            identity = spec.identity_label(index)
            for view in range(spec.images_per_identity):
                photo, left, right = render_view(spec, index, view)
                photo_rel = f"photos/{identity}_v{view}.png"
                save_image(photo, output_dir / photo_rel)
                records.append(SampleRecord(identity, Modality.PHOTO, photo_rel, left, right, root=str(output_dir)))
                if not spec.photo_only:
                    sketch_rel = f"sketches/{identity}_v{view}.png"
                    save_image(sketch_transform(photo), output_dir / sketch_rel)
                    records.append(SampleRecord(identity, Modality.SKETCH, sketch_rel, left, right, root=str(output_dir)))
            progress.advance(task)

    header = (f"toy dataset: identities={spec.n_identities} per_id={spec.images_per_identity} "
              f"size={spec.image_size} seed={spec.seed} offset={spec.identity_offset} photo_only={spec.photo_only}")
    manifest_path = output_dir / MANIFEST_NAME
    write_manifest(records, manifest_path, header=header)
    pairing = {} if spec.photo_only else build_pairing(records)
    WorkflowLogger.print_success(f"Wrote {len(records)} images and manifest {manifest_path}")
    return Manifest(records=records, pairing=pairing, path=str(manifest_path))
