"""
Mapping network, style generators, patch discriminators and their container
"""
from .mapping import MappingNetwork, encode
from .generator import StyleAffine, StyleBlock, StyleGenerator, adain, synthesize
from .discriminator import PatchDiscriminator, discriminate, output_size, receptive_field
from .model import BidirectionalSynthesisNetwork, init_params, initialize_adacos, initialize_weights
from .serialization import load_model, model_from_payload, model_payload, read_payload, save_model

__all__ = [
    'MappingNetwork',
    'encode',
    'StyleAffine',
    'StyleBlock',
    'StyleGenerator',
    'adain',
    'synthesize',
    'PatchDiscriminator',
    'discriminate',
    'output_size',
    'receptive_field',
    'BidirectionalSynthesisNetwork',
    'init_params',
    'initialize_adacos',
    'initialize_weights',
    'load_model',
    'model_from_payload',
    'model_payload',
    'read_payload',
    'save_model',
]
