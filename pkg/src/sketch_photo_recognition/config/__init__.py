"""
Configuration module for the sketch-photo recognition pipeline
"""
from .settings import (
    AppConfig,
    ConfigLoader,
    DataConfig,
    EvalConfig,
    LossWeights,
    ModelConfig,
    StepConfig,
    TrainConfig,
)
from .presets import get_preset_names, get_preset_description

__all__ = [
    'AppConfig',
    'ConfigLoader',
    'DataConfig',
    'EvalConfig',
    'LossWeights',
    'ModelConfig',
    'StepConfig',
    'TrainConfig',
    'get_preset_names',
    'get_preset_description',
]
