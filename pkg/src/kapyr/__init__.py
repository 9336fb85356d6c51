"""Kernel-adaptive Laplacian pyramid translation for mixed-exposure correction.

A small hypernetwork predicts a per-image 5x5 kernel; that kernel drives a
Laplacian-pyramid decomposition whose bands are translated by lightweight
residual networks and reconstructed exactly. Training is adversarial with a
heavily weighted pixel loss and a Gaussian-anchored kernel loss.
"""

from .adversary import PatchDiscriminator
from .checkpoint import load_checkpoint, save_checkpoint
from .data import (
    SamplePair,
    compose_grad,
    compose_mix,
    load_image,
    load_scene_dataset,
    pairs_from_sequences,
    save_image,
    synthetic_pair,
)
from .hypernet import KernelPredictor, gaussian_anchor
from .losses import (
    GAN_TYPES,
    LossBundle,
    LossWeights,
    discriminator_gan_loss,
    generator_gan_loss,
    kernel_loss,
    pixel_loss,
    total_generator_loss,
)
from .metrics import MetricReport, psnr, ssim
from .pyramid import Pyramid, decompose, downsample, load_kernel, reconstruct, save_kernel, upsample
from .trainer import TrainConfig, Trainer, build_generator, param_checksum
from .translator import BaseTranslator, DetailTranslator, Generator, ResidualBlock

__version__ = "0.1.0"

__all__ = [
    "BaseTranslator",
    "DetailTranslator",
    "GAN_TYPES",
    "Generator",
    "KernelPredictor",
    "LossBundle",
    "LossWeights",
    "MetricReport",
    "PatchDiscriminator",
    "Pyramid",
    "ResidualBlock",
    "SamplePair",
    "TrainConfig",
    "Trainer",
    "build_generator",
    "compose_grad",
    "compose_mix",
    "decompose",
    "discriminator_gan_loss",
    "downsample",
    "gaussian_anchor",
    "generator_gan_loss",
    "kernel_loss",
    "load_checkpoint",
    "load_image",
    "load_kernel",
    "load_scene_dataset",
    "pairs_from_sequences",
    "param_checksum",
    "pixel_loss",
    "psnr",
    "reconstruct",
    "save_checkpoint",
    "save_image",
    "save_kernel",
    "ssim",
    "synthetic_pair",
    "total_generator_loss",
    "upsample",
]
