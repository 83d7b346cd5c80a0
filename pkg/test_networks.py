"""
Tests for the mapping network, generators, discriminators and model files
"""

import pytest
import torch

from sketch_photo_recognition.networks import (
    BidirectionalSynthesisNetwork,
    MappingNetwork,
    StyleAffine,
    StyleGenerator,
    adain,
    discriminate,
    encode,
    init_params,
    load_model,
    model_from_payload,
    model_payload,
    output_size,
    receptive_field,
    save_model,
    synthesize,
)
from sketch_photo_recognition.utils.exception_handler import CheckpointError, ConfigError, ShapeError


@pytest.fixture
def model(tiny_config):
    return init_params(tiny_config, seed=0)


def _images(n, channels, size=32, seed=0):
    generator = torch.Generator().manual_seed(seed)
    return torch.rand(n, channels, size, size, generator=generator) * 2 - 1


# mapping network

def test_encode_returns_one_code_per_image(model, tiny_config):
    codes = model.encode(_images(3, 3))
    assert codes.shape == (3, tiny_config.model.latent_dim)
    single = encode(_images(1, 3)[0], model.mapping)
    assert single.shape == (tiny_config.model.latent_dim,)


def test_encode_is_deterministic(model):
    images = _images(2, 3)
    torch.testing.assert_close(model.encode(images), model.encode(images), rtol=0, atol=0)


def test_sketches_share_the_photo_encoder(model):
    sketch = _images(2, 1)
    torch.testing.assert_close(model.encode(sketch), model.encode(sketch.expand(-1, 3, -1, -1)))


def test_encode_rejects_wrong_spatial_size(model):
    with pytest.raises(ShapeError):
        model.encode(_images(1, 3, size=16))


def test_image_size_must_divide_by_pooling_stride(tiny_config):
    with pytest.raises(ConfigError):
        MappingNetwork(tiny_config.model, image_size=36)


# generators

def test_synthesized_images_are_in_range_and_deterministic(model, tiny_config):
    w = torch.randn(2, tiny_config.model.latent_dim, generator=torch.Generator().manual_seed(1))
    sketches = synthesize(w, model.gen_sketch)
    photos = synthesize(w, model.gen_photo)
    assert sketches.shape == (2, 1, 32, 32)
    assert photos.shape == (2, 3, 32, 32)
    assert sketches.abs().max() <= 1.0 and photos.abs().max() <= 1.0
    torch.testing.assert_close(synthesize(w, model.gen_photo), photos, rtol=0, atol=0)
    assert synthesize(w[0], model.gen_sketch).shape == (1, 32, 32)


def test_generators_use_a_smooth_rectifier_by_default(model, tiny_config):
    assert tiny_config.model.generator_activation == "softplus"
    assert all(isinstance(block.act, torch.nn.Softplus) for block in model.gen_sketch.blocks)

    leaky = tiny_config.model.model_copy(update={"generator_activation": "leaky_relu"})
    generator = StyleGenerator(leaky, image_size=32, out_channels=1)
    assert all(isinstance(block.act, torch.nn.LeakyReLU) for block in generator.blocks)


@pytest.mark.parametrize("seed", range(5))
def test_synthesis_is_continuous_in_the_code(model, tiny_config, seed):
    generator = model.gen_photo.double()
    rng = torch.Generator().manual_seed(seed)
    w = torch.randn(1, tiny_config.model.latent_dim, generator=rng, dtype=torch.float64)
    direction = torch.randn(w.shape, generator=rng, dtype=torch.float64)
    direction /= direction.norm()

    steps = [1e-2, 1e-3, 1e-4, 1e-5]
    base = synthesize(w, generator)
    deltas = [(synthesize(w + eps * direction, generator) - base).abs().max().item() for eps in steps]
    ratios = [delta / eps for delta, eps in zip(deltas, steps)]
    # per-pixel change shrinks with the perturbation at a steady rate
    assert deltas == sorted(deltas, reverse=True)
    assert deltas[-1] < 1e-3
    assert max(ratios) <= 2 * min(ratios)


def test_generator_rejects_wrong_code_length(model):
    with pytest.raises(ShapeError):
        model.gen_photo(torch.zeros(1, 5))


def test_generator_needs_power_of_two_upsampling(tiny_config):
    with pytest.raises(ConfigError):
        StyleGenerator(tiny_config.model, image_size=24, out_channels=3)


def test_adain_with_unit_scale_and_zero_bias_normalizes():
    features = torch.tensor([[[[1.0, 3.0], [1.0, 3.0]]]])
    out = adain(features, torch.ones(1, 1), torch.zeros(1, 1), eps=0.0)
    torch.testing.assert_close(out, torch.tensor([[[[-1.0, 1.0], [-1.0, 1.0]]]]))


def test_adain_applies_style_affine():
    features = torch.tensor([[[[1.0, 3.0], [1.0, 3.0]]]])
    out = adain(features, torch.full((1, 1), 2.0), torch.full((1, 1), 0.5), eps=0.0)
    torch.testing.assert_close(out, torch.tensor([[[[-1.5, 2.5], [-1.5, 2.5]]]]))


def test_adain_constant_feature_map_becomes_bias():
    features = torch.full((1, 2, 3, 3), 7.0)
    out = adain(features, torch.tensor([[3.0, 3.0]]), torch.tensor([[0.25, -0.5]]))
    torch.testing.assert_close(out[0, 0], torch.full((3, 3), 0.25))
    torch.testing.assert_close(out[0, 1], torch.full((3, 3), -0.5))


def test_adain_channel_mismatch_is_a_shape_error():
    with pytest.raises(ShapeError):
        adain(torch.zeros(1, 2, 2, 2), torch.ones(1, 3), torch.zeros(1, 3))


# discriminators

def test_patch_geometry():
    assert receptive_field() == 70
    assert output_size(256) == 30


def test_discriminator_output_is_a_logit_map(model):
    photos, sketches = _images(2, 3), _images(2, 1, seed=1)
    logits = discriminate(photos, sketches, model.disc_sketch)
    assert logits.shape == (2, 1, output_size(32), output_size(32))
    assert abs(logits.mean().item()) < 0.5


def test_discriminator_instance_norm_zero_mean(model):
    outputs = []
    hooks = [layer.register_forward_hook(lambda _m, _i, out: outputs.append(out))
             for layer in model.disc_photo.norm_layers()]
    try:
        model.disc_photo(_images(2, 1), _images(2, 3, seed=2))
    finally:
        for hook in hooks:
            hook.remove()
    assert len(outputs) == 3
    for out in outputs:
        assert out.mean(dim=(2, 3)).abs().max() < 1e-4


def test_discriminator_rejects_mismatched_pairs(model):
    with pytest.raises(ShapeError):
        model.disc_sketch(_images(2, 3), _images(1, 1))


# initialization

def test_init_is_deterministic_per_seed(tiny_config):
    a = init_params(tiny_config, seed=11).state_dict()
    b = init_params(tiny_config, seed=11).state_dict()
    c = init_params(tiny_config, seed=12).state_dict()
    for name in a:
        torch.testing.assert_close(a[name], b[name], rtol=0, atol=0)
    assert any(not torch.equal(a[name], c[name]) for name in a)


def test_init_starts_styles_at_identity(model):
    affines = [m for m in model.modules() if isinstance(m, StyleAffine)]
    assert affines
    for affine in affines:
        assert torch.all(affine.scale.bias == 1.0)
        assert torch.all(affine.bias.bias == 0.0)
    assert torch.all(model.gen_photo.const == 1.0)


def test_init_normalizes_class_weights(model):
    norms = model.adacos.class_weights.norm(dim=1)
    torch.testing.assert_close(norms, torch.ones_like(norms))


def test_variant_controls_active_components(tiny_config):
    config = tiny_config.model_copy(deep=True)
    config.model.synthesis = "photo2sketch"
    network = BidirectionalSynthesisNetwork(config)
    assert network.generators() == [network.gen_sketch]
    assert network.discriminators() == [network.disc_sketch]
    config.model.synthesis = "none"
    assert network.generators() == [] and network.discriminators() == []


# model files

def test_model_file_round_trip(model, tmp_path):
    path = save_model(model, tmp_path / "model.pt")
    loaded = load_model(path)
    assert loaded.config == model.config
    expected = model.state_dict()
    for name, tensor in loaded.state_dict().items():
        torch.testing.assert_close(tensor, expected[name], rtol=0, atol=0)


def test_missing_tensor_is_named(model):
    payload = model_payload(model)
    missing = "gen_photo.to_image.weight"
    del payload["state_dict"][missing]
    with pytest.raises(CheckpointError) as info:
        model_from_payload(payload)
    assert missing in info.value.missing
    assert missing in str(info.value)


def test_wrong_tensor_shape_is_rejected(model):
    payload = model_payload(model)
    payload["state_dict"]["mapping.fc.bias"] = torch.zeros(3)
    with pytest.raises(CheckpointError):
        model_from_payload(payload)


def test_unsupported_format_version(model):
    payload = model_payload(model)
    payload["format_version"] = 99
    with pytest.raises(CheckpointError):
        model_from_payload(payload)


def test_missing_model_file(tmp_path):
    with pytest.raises(CheckpointError):
        load_model(tmp_path / "absent.pt")
