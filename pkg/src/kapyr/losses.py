"""Generator and discriminator objectives.

The generator minimizes an adversarial term plus a heavily weighted pixel MSE
and a lightly weighted kernel MSE that anchors the predicted kernel to the
fixed Gaussian. All adversarial variants act on raw (unsquashed) discriminator
scores.
"""

from dataclasses import dataclass

import torch
import torch.nn.functional as F

GAN_TYPES = ("vanilla", "lsgan", "wgan", "wgan_softplus", "hinge")


@dataclass
class LossWeights:
    eta_pix: float = 1000.0
    lambda_ker: float = 0.01

    def __post_init__(self):
        for name in ("eta_pix", "lambda_ker"):
            v = float(getattr(self, name))
            if not (v >= 0.0 and v == v and abs(v) != float("inf")):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")
            setattr(self, name, v)


@dataclass
class LossBundle:
    l_pix: object
    l_ker: object
    l_gan: object
    l_total: object


def pixel_loss(output, reference):
    """Mean squared error over all channels and pixels."""
    if output.shape != reference.shape:
        raise ValueError(f"shape mismatch {tuple(output.shape)} vs {tuple(reference.shape)}")
    return F.mse_loss(output, reference)


def kernel_loss(predicted, anchor):
    """Mean squared error over the 25 kernel entries (averaged over a batch)."""
    if predicted.shape[-2:] != (5, 5) or anchor.shape[-2:] != (5, 5):
        raise ValueError(
            f"kernels must be 5x5, got {tuple(predicted.shape)} and {tuple(anchor.shape)}"
        )
    return F.mse_loss(predicted, anchor.expand_as(predicted))


def generator_gan_loss(d_fake, gan_type):
    """Adversarial generator loss on raw scores of generated images."""
    if gan_type == "vanilla":
        return F.softplus(-d_fake).mean()
    if gan_type == "lsgan":
        return ((d_fake - 1.0) ** 2).mean()
    if gan_type == "wgan":
        return -d_fake.mean()
    if gan_type == "wgan_softplus":
        return F.softplus(-d_fake).mean()
    if gan_type == "hinge":
        return -d_fake.mean()
    raise ValueError(f"unknown gan_type {gan_type!r}, expected one of {GAN_TYPES}")


def discriminator_gan_loss(d_real, d_fake, gan_type):
    """Discriminator counterpart of each adversarial variant."""
    if gan_type in ("vanilla", "wgan_softplus"):
        return F.softplus(-d_real).mean() + F.softplus(d_fake).mean()
    if gan_type == "lsgan":
        return ((d_real - 1.0) ** 2).mean() + (d_fake**2).mean()
    if gan_type == "wgan":
        return d_fake.mean() - d_real.mean()
    if gan_type == "hinge":
        return F.relu(1.0 - d_real).mean() + F.relu(1.0 + d_fake).mean()
    raise ValueError(f"unknown gan_type {gan_type!r}, expected one of {GAN_TYPES}")


def total_generator_loss(l_gan, l_pix, l_ker, weights=None):
    """Weighted sum of the three generator terms, returned as a bundle."""
    weights = weights or LossWeights()
    for name, v in (("l_gan", l_gan), ("l_pix", l_pix), ("l_ker", l_ker)):
        val = float(v.detach()) if torch.is_tensor(v) else float(v)
        if val != val or abs(val) == float("inf"):
            raise ValueError(f"{name} is not finite: {val}")
    total = l_gan + weights.eta_pix * l_pix + weights.lambda_ker * l_ker
    return LossBundle(l_pix=l_pix, l_ker=l_ker, l_gan=l_gan, l_total=total)


def _scalar(v):
    return float(v.detach()) if torch.is_tensor(v) else float(v)


def bundle_floats(bundle, weights):
    """Logging view of a bundle: python floats with the total recomputed in
    float64 so the accounting identity holds exactly on every record."""
    l_pix = _scalar(bundle.l_pix)
    l_ker = _scalar(bundle.l_ker)
    l_gan = _scalar(bundle.l_gan)
    total = l_gan + weights.eta_pix * l_pix + weights.lambda_ker * l_ker
    return LossBundle(l_pix=l_pix, l_ker=l_ker, l_gan=l_gan, l_total=total)
