"""
Utility modules for the sketch-photo recognition pipeline
"""
from .exception_handler import (
    SketchRecognitionError,
    ConfigError,
    ToyDatasetSpecError,
    DataError,
    ManifestError,
    PairingError,
    AlignmentError,
    CropSizeError,
    ShapeError,
    GalleryError,
    CheckpointError,
    NumericError,
    ExceptionHandler,
    safe_execute,
    ErrorHandlingContext,
)
from .logging_utils import WorkflowLogger, ProgressTracker

__all__ = [
    'SketchRecognitionError',
    'ConfigError',
    'ToyDatasetSpecError',
    'DataError',
    'ManifestError',
    'PairingError',
    'AlignmentError',
    'CropSizeError',
    'ShapeError',
    'GalleryError',
    'CheckpointError',
    'NumericError',
    'ExceptionHandler',
    'safe_execute',
    'ErrorHandlingContext',
    'WorkflowLogger',
    'ProgressTracker',
]
