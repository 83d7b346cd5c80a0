"""
Container for every trainable component of the system.
"""

from typing import Dict, Iterator, List

import torch
import torch.nn as nn

from ..config.settings import AppConfig
from ..losses.adacos import AdaCosHead
from .discriminator import PatchDiscriminator
from .generator import StyleAffine, StyleGenerator
from .mapping import MappingNetwork


class BidirectionalSynthesisNetwork(nn.Module):
    """Mapping network, both generators, both discriminators and the AdaCos head."""

    def __init__(self, config: AppConfig, n_classes: int = 2):
        super().__init__()
        data, model = config.data, config.model
        self.config = config
        self.mapping = MappingNetwork(model, data.image_size, in_channels=data.photo_channels)
        self.gen_sketch = StyleGenerator(model, data.image_size, data.sketch_channels)
        self.gen_photo = StyleGenerator(model, data.image_size, data.photo_channels)
        pair_channels = data.photo_channels + data.sketch_channels
        self.disc_sketch = PatchDiscriminator(model, pair_channels)
        self.disc_photo = PatchDiscriminator(model, pair_channels)
        self.adacos = AdaCosHead(n_classes, model.latent_dim, mode=model.adacos_mode)

    # variant switches

    @property
    def synthesizes_sketches(self) -> bool:
        return self.config.model.synthesis in ("bidirectional", "photo2sketch")

    @property
    def synthesizes_photos(self) -> bool:
        return self.config.model.synthesis in ("bidirectional", "sketch2photo")

    def generators(self) -> List[StyleGenerator]:
        active = []
        if self.synthesizes_sketches:
            active.append(self.gen_sketch)
        if self.synthesizes_photos:
            active.append(self.gen_photo)
        return active

    def discriminators(self) -> List[PatchDiscriminator]:
        active = []
        if self.synthesizes_sketches:
            active.append(self.disc_sketch)
        if self.synthesizes_photos:
            active.append(self.disc_photo)
        return active

    def generator_parameters(self, include_adacos: bool = True) -> Iterator[nn.Parameter]:
        """Parameters updated by the generator-side optimizer."""
        yield from self.mapping.parameters()
        for generator in self.generators():
            yield from generator.parameters()
        if include_adacos:
            yield from self.adacos.parameters()

    def discriminator_parameters(self) -> Iterator[nn.Parameter]:
        for disc in self.discriminators():
            yield from disc.parameters()

    def encode(self, images: torch.Tensor) -> torch.Tensor:
        return self.mapping(images)

    def reset_adacos(self, n_classes: int, generator: torch.Generator) -> None:
        """Fresh class weights for a new identity set; the scale policy carries over."""
        device = self.adacos.class_weights.device
        self.adacos = AdaCosHead(n_classes, self.config.model.latent_dim, mode=self.config.model.adacos_mode)
        initialize_adacos(self.adacos, generator)
        self.adacos.to(device)

    def reset_discriminators(self, generator: torch.Generator) -> None:
        for disc in (self.disc_sketch, self.disc_photo):
            initialize_weights(disc, self.config.model.init_std, generator)

    def tensor_shapes(self) -> Dict[str, List[int]]:
        return {name: list(t.shape) for name, t in self.state_dict().items()}


@torch.no_grad()
def initialize_weights(module: nn.Module, std: float, generator: torch.Generator) -> None:
    """Normal(0, std) weights and zero biases drawn from ``generator``.

    AdaIN scale projections start with bias 1 so the initial style is the
    identity; instance-norm affines start at (1, 0).
    """
    for sub in module.modules():
        if isinstance(sub, (nn.Conv2d, nn.ConvTranspose2d, nn.Linear)):
            sub.weight.copy_(torch.randn(sub.weight.shape, generator=generator) * std)
            if sub.bias is not None:
                sub.bias.zero_()
        elif isinstance(sub, nn.InstanceNorm2d) and sub.affine:
            sub.weight.fill_(1.0)
            sub.bias.zero_()
    for sub in module.modules():
        if isinstance(sub, StyleAffine):
            sub.scale.bias.fill_(1.0)
        elif isinstance(sub, StyleGenerator):
            sub.const.fill_(1.0)


@torch.no_grad()
def initialize_adacos(head: AdaCosHead, generator: torch.Generator) -> None:
    head.class_weights.copy_(torch.randn(head.class_weights.shape, generator=generator))
    head.renormalize_()


def init_params(config: AppConfig, seed: int, n_classes: int = 2) -> BidirectionalSynthesisNetwork:
    """Deterministic model construction: the same (config, seed) gives identical tensors."""
    generator = torch.Generator().manual_seed(seed)
    model = BidirectionalSynthesisNetwork(config, n_classes)
    initialize_weights(model, config.model.init_std, generator)
    initialize_adacos(model.adacos, generator)
    return model
