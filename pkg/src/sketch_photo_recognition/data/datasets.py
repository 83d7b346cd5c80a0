"""
Torch datasets over aligned manifest images.

Each record is aligned once and cached. Training items are randomly
cropped with a generator derived from (seed, epoch, index), so crops do not
depend on iteration order or on how many items were drawn before; paired
photo/sketch items share one crop window. Evaluation items are center crops.
"""

from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch
from torch.utils.data import DataLoader, Dataset

from ..config.settings import DataConfig
from .images import ImageBuffer, align_and_crop, center_crop, crop_at, draw_crop_offset, to_tensor
from .manifest import Manifest, Modality, SampleRecord


class AlignedImageCache:
    """Aligned ``initial_size`` buffers keyed by record."""

    def __init__(self, data_config: DataConfig):
        self.data_config = data_config
        self._cache: Dict[Tuple[str, str], ImageBuffer] = {}

    def channels_for(self, record: SampleRecord) -> int:
        if record.modality == Modality.PHOTO:
            return self.data_config.photo_channels
        return self.data_config.sketch_channels

    def get(self, record: SampleRecord) -> ImageBuffer:
        key = (str(record.resolved_path), record.modality.value)
        if key not in self._cache:
            self._cache[key] = align_and_crop(
                record,
                self.data_config.canonical_eyes,
                self.data_config.initial_size,
                channels=self.channels_for(record),
            )
        return self._cache[key]


class _CroppingDataset(Dataset):
    def __init__(self, data_config: DataConfig, train: bool, seed: int,
                 cache: Optional[AlignedImageCache] = None):
        self.data_config = data_config
        self.train = train
        self.seed = seed
        self.epoch = 0
        self.cache = cache or AlignedImageCache(data_config)

    def set_epoch(self, epoch: int) -> None:
        self.epoch = epoch

    def _crops(self, index: int, images: Sequence[ImageBuffer]) -> List[torch.Tensor]:
        size = self.data_config.image_size
        if not self.train:
            return [to_tensor(center_crop(image, size)) for image in images]
        rng = np.random.default_rng([self.seed, self.epoch, index])
        top, left = draw_crop_offset(images[0].shape, size, rng)
        return [to_tensor(crop_at(image, top, left, size)) for image in images]


class PairedImageDataset(_CroppingDataset):
    """(photo, sketch, class index) triples from a paired manifest."""

    def __init__(self, manifest: Manifest, data_config: DataConfig, train: bool = True, seed: int = 0,
                 class_index: Optional[Dict[str, int]] = None, cache: Optional[AlignedImageCache] = None):
        super().__init__(data_config, train, seed, cache)
        self.class_index = class_index or manifest.class_index()
        self.items = [(photo, sketch, self.class_index[photo.identity]) for photo, sketch in manifest.pairs()]

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, index: int):
        photo, sketch, label = self.items[index]
        photo_tensor, sketch_tensor = self._crops(index, [self.cache.get(photo), self.cache.get(sketch)])
        return photo_tensor, sketch_tensor, label


class RecordImageDataset(_CroppingDataset):
    """(image, class index) pairs for single-modality records."""

    def __init__(self, records: Sequence[SampleRecord], data_config: DataConfig, train: bool = True,
                 seed: int = 0, class_index: Optional[Dict[str, int]] = None,
                 cache: Optional[AlignedImageCache] = None):
        super().__init__(data_config, train, seed, cache)
        if class_index is None:
            class_index = {identity: i for i, identity in enumerate(sorted({r.identity for r in records}))}
        self.class_index = class_index
        self.records = list(records)

    def __len__(self) -> int:
        return len(self.records)

    def __getitem__(self, index: int):
        record = self.records[index]
        (image,) = self._crops(index, [self.cache.get(record)])
        return image, self.class_index[record.identity]


def make_loader(dataset: _CroppingDataset, batch_size: int, seed: int, epoch: int,
                shuffle: bool = True) -> DataLoader:
    """Single-process loader whose order is a function of (seed, epoch)."""
    dataset.set_epoch(epoch)
    generator = torch.Generator().manual_seed(seed * 1_000_003 + epoch)
    return DataLoader(dataset, batch_size=batch_size, shuffle=shuffle, generator=generator, num_workers=0)
