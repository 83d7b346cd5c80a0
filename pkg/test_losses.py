"""
Tests for the joint objective and its terms
"""

import math

import pytest
import torch

from sketch_photo_recognition.config.settings import LossWeights
from sketch_photo_recognition.losses import (
    MIN_SCALE,
    AdaCosHead,
    LossComponents,
    fixed_scale,
    joint_loss,
    loss_adacos,
    loss_collaborative,
    loss_gan_discriminator,
    loss_gan_generator,
    loss_similarity,
    ssim,
)
from sketch_photo_recognition.losses.similarity import DATA_RANGE, SSIM_K1
from sketch_photo_recognition.utils.exception_handler import ConfigError, NumericError, ShapeError


# collaborative

def test_collaborative_examples():
    assert loss_collaborative(torch.tensor([1.0, 2.0, 3.0]), torch.tensor([1.0, 2.0, 3.0])).item() == 0.0
    assert loss_collaborative(torch.tensor([1.0, 0.0]), torch.tensor([0.0, 1.0])).item() == pytest.approx(1.0)


def test_collaborative_is_symmetric():
    generator = torch.Generator().manual_seed(0)
    a, b = torch.randn(4, 8, generator=generator), torch.randn(4, 8, generator=generator)
    assert loss_collaborative(a, b).item() == loss_collaborative(b, a).item()


def test_collaborative_dimension_mismatch():
    with pytest.raises(ShapeError):
        loss_collaborative(torch.zeros(3), torch.zeros(4))


# similarity

@pytest.mark.parametrize("mode", ["l1", "ssim", "l1_plus_ssim"])
def test_similarity_of_identical_images_is_zero(mode):
    x = torch.rand(2, 3, 16, 16, generator=torch.Generator().manual_seed(1), dtype=torch.float64) * 2 - 1
    assert abs(loss_similarity(x, x, mode).item()) < 1e-9


def test_ssim_self_similarity_is_one():
    x = torch.rand(1, 1, 20, 20, generator=torch.Generator().manual_seed(2), dtype=torch.float64) * 2 - 1
    assert abs(ssim(x, x).item() - 1.0) < 1e-9


def test_constant_images_match_closed_form():
    zeros = torch.zeros(1, 1, 16, 16, dtype=torch.float64)
    ones = torch.ones(1, 1, 16, 16, dtype=torch.float64)
    c1 = (SSIM_K1 * DATA_RANGE) ** 2
    assert loss_similarity(zeros, ones, "l1").item() == pytest.approx(1.0)
    assert loss_similarity(zeros, ones, "ssim").item() == pytest.approx(1.0 - c1 / (1.0 + c1), abs=1e-9)
    assert loss_similarity(zeros, ones, "l1_plus_ssim").item() == pytest.approx(2.0 - c1 / (1.0 + c1), abs=1e-9)


def test_similarity_rejects_unknown_mode_and_shape_mismatch():
    x = torch.zeros(1, 1, 16, 16)
    with pytest.raises(ConfigError):
        loss_similarity(x, x, "l2")
    with pytest.raises(ShapeError):
        loss_similarity(x, torch.zeros(1, 3, 16, 16))


def test_ssim_needs_a_full_window():
    with pytest.raises(ShapeError):
        ssim(torch.zeros(1, 1, 8, 8), torch.zeros(1, 1, 8, 8))


# adversarial

def test_gan_losses_at_zero_logits_are_ln2():
    zeros = torch.zeros(1, 1, 4, 4, dtype=torch.float64)
    assert abs(loss_gan_discriminator(zeros, zeros).item() - math.log(2)) < 1e-9
    assert abs(loss_gan_generator(zeros).item() - math.log(2)) < 1e-9


def test_perfect_discriminator_has_near_zero_loss():
    real = torch.full((2, 1, 3, 3), 20.0)
    fake = torch.full((2, 1, 3, 3), -20.0)
    assert loss_gan_discriminator(real, fake).item() < 1e-6
    assert loss_gan_generator(fake).item() == pytest.approx(20.0, rel=1e-6)


def test_non_finite_logits_are_numeric_errors():
    bad = torch.tensor([[float("nan")]])
    with pytest.raises(NumericError):
        loss_gan_discriminator(bad, torch.zeros(1, 1))
    with pytest.raises(NumericError):
        loss_gan_generator(torch.tensor([[float("inf")]]))


# adacos

def test_fixed_scale_closed_form():
    assert abs(fixed_scale(10) - math.sqrt(2) * math.log(9)) < 1e-9
    assert fixed_scale(10) == pytest.approx(3.10719, abs=1e-5)
    assert fixed_scale(2) == MIN_SCALE


def test_fewer_than_two_classes_is_a_config_error():
    with pytest.raises(ConfigError):
        fixed_scale(1)
    with pytest.raises(ConfigError):
        AdaCosHead(1, 4)


def _aligned_head():
    head = AdaCosHead(2, 3, mode="fixed", scale=1.0).double()
    with torch.no_grad():
        head.class_weights.copy_(torch.tensor([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
    return head


def test_aligned_code_loss_with_unit_scale():
    head = _aligned_head()
    w = torch.tensor([[1.0, 0.0, 0.0]], dtype=torch.float64)
    loss, returned = loss_adacos(w, torch.tensor([0]), head)
    assert returned is head
    assert loss.item() == pytest.approx(math.log(1 + math.exp(-1)), abs=1e-9)
    assert loss.item() == pytest.approx(0.31326, abs=1e-5)


def test_adacos_is_invariant_to_code_scale():
    head = AdaCosHead(5, 8, mode="fixed").double()
    generator = torch.Generator().manual_seed(3)
    w = torch.randn(6, 8, generator=generator, dtype=torch.float64)
    labels = torch.randint(0, 5, (6,), generator=generator)
    assert head(2 * w, labels).item() == pytest.approx(head(w, labels).item(), abs=1e-12)


def test_adacos_loss_decreases_as_true_cosine_grows():
    head = _aligned_head()
    labels = torch.tensor([0])
    near = head(torch.tensor([[1.0, 0.2, 0.0]], dtype=torch.float64), labels)
    far = head(torch.tensor([[1.0, 0.8, 0.0]], dtype=torch.float64), labels)
    assert near.item() < far.item()


def test_zero_code_is_a_numeric_error():
    head = AdaCosHead(3, 4)
    with pytest.raises(NumericError):
        head(torch.zeros(2, 4), torch.tensor([0, 1]))


def test_out_of_range_label_is_rejected():
    head = AdaCosHead(3, 4)
    with pytest.raises(ShapeError):
        head(torch.ones(1, 4), torch.tensor([3]))


def test_dynamic_scale_stays_within_bounds():
    generator = torch.Generator().manual_seed(4)
    head = AdaCosHead(10, 16, mode="dynamic")
    head.train()
    for _ in range(5):
        w = torch.randn(32, 16, generator=generator)
        labels = torch.randint(0, 10, (32,), generator=generator)
        head(w, labels)
        scale = float(head.scale)
        assert MIN_SCALE <= scale <= fixed_scale(10)
        assert math.isfinite(scale)


def test_scale_is_frozen_outside_training():
    head = AdaCosHead(10, 16, mode="dynamic")
    head.eval()
    before = float(head.scale)
    head(torch.randn(8, 16), torch.arange(8))
    assert float(head.scale) == before


def test_fixed_mode_never_rescales():
    head = AdaCosHead(10, 16, mode="fixed")
    head.train()
    head(torch.randn(8, 16), torch.arange(8))
    assert float(head.scale) == fixed_scale(10)


def test_renormalize_restores_unit_norm():
    head = AdaCosHead(4, 6)
    with torch.no_grad():
        head.class_weights.mul_(3.0)
    head.renormalize_()
    norms = head.class_weights.norm(dim=1)
    torch.testing.assert_close(norms, torch.ones_like(norms))


# joint

def test_joint_loss_weighted_sum():
    weights = LossWeights(lambda_gan=1.0, lambda_s=10.0, lambda_w=1.0)
    result = joint_loss(LossComponents(adacos=0.5, gan=0.7, similarity=0.02, collaborative=0.3), weights)
    assert result.total == pytest.approx(1.7)
    assert result.components.similarity == 0.02


def test_default_weights():
    weights = LossWeights()
    assert (weights.lambda_gan, weights.lambda_s, weights.lambda_w) == (1.0, 10.0, 1.0)


def test_zero_collaborative_weight_ignores_the_term():
    weights = LossWeights(lambda_w=0.0)
    a = joint_loss(LossComponents(adacos=0.5, gan=0.7, similarity=0.02, collaborative=0.3), weights)
    b = joint_loss(LossComponents(adacos=0.5, gan=0.7, similarity=0.02, collaborative=123.0), weights)
    assert a.total == b.total


def test_non_finite_component_is_a_numeric_error():
    with pytest.raises(NumericError):
        joint_loss(LossComponents(adacos=float("nan")), LossWeights())
