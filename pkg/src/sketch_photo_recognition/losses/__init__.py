"""
Loss functions of the joint objective
"""
from .adacos import MIN_SCALE, AdaCosHead, fixed_scale, loss_adacos
from .adversarial import loss_gan_discriminator, loss_gan_generator
from .collaborative import loss_collaborative
from .joint import JointLoss, LossComponents, joint_loss
from .similarity import gaussian_window, loss_similarity, ssim

__all__ = [
    'MIN_SCALE',
    'AdaCosHead',
    'fixed_scale',
    'loss_adacos',
    'loss_gan_discriminator',
    'loss_gan_generator',
    'loss_collaborative',
    'JointLoss',
    'LossComponents',
    'joint_loss',
    'gaussian_window',
    'loss_similarity',
    'ssim',
]
