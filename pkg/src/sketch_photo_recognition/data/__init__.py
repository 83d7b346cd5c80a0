"""
Data ingestion, alignment and the procedural toy dataset
"""
from .manifest import Manifest, Modality, SampleRecord, build_pairing, load_manifest, write_manifest
from .images import (
    ImageBuffer,
    align_and_crop,
    align_image,
    center_crop,
    from_tensor,
    load_image,
    random_crop,
    save_image,
    similarity_transform,
    to_tensor,
)
from .toy_dataset import ToyDatasetSpec, generate_toy_dataset, sketch_transform
from .datasets import AlignedImageCache, PairedImageDataset, RecordImageDataset, make_loader

__all__ = [
    'Manifest',
    'Modality',
    'SampleRecord',
    'build_pairing',
    'load_manifest',
    'write_manifest',
    'ImageBuffer',
    'align_and_crop',
    'align_image',
    'center_crop',
    'from_tensor',
    'load_image',
    'random_crop',
    'save_image',
    'similarity_transform',
    'to_tensor',
    'ToyDatasetSpec',
    'generate_toy_dataset',
    'sketch_transform',
    'AlignedImageCache',
    'PairedImageDataset',
    'RecordImageDataset',
    'make_loader',
]
