"""Translation modules and the full generator.

The base translator applies a residual correction to the low-frequency band
(global brightness and contrast live there). The detail translator multiplies
each high-frequency band by a predicted mask, estimated at the coarsest level
from the band together with the base before and after translation, then
upsampled and refined for the finer bands.
"""

from dataclasses import dataclass

import torch
import torch.nn as nn
import torch.nn.functional as F

from .hypernet import KernelPredictor, DEFAULT_CHANNEL_PLAN
from .pyramid import Pyramid, decompose, reconstruct, upsample


class ResidualBlock(nn.Module):
    def __init__(self, channels):
        super().__init__()
        self.conv1 = nn.Conv2d(channels, channels, 3, padding=1)
        self.conv2 = nn.Conv2d(channels, channels, 3, padding=1)

    def forward(self, x):
        return x + self.conv2(F.leaky_relu(self.conv1(x), 0.2))


class BaseTranslator(nn.Module):
    """Residual translation of the low-pass base band."""

    def __init__(self, blocks=2, channels=16):
        super().__init__()
        if blocks < 1:
            raise ValueError("need at least one residual block")
        self.conv_in = nn.Conv2d(3, channels, 3, padding=1)
        self.blocks = nn.Sequential(*[ResidualBlock(channels) for _ in range(blocks)])
        self.conv_out = nn.Conv2d(channels, 3, 3, padding=1)
        # near-identity at init so training starts from the input image
        nn.init.normal_(self.conv_out.weight, std=1e-3)
        nn.init.zeros_(self.conv_out.bias)

    def forward(self, base):
        x = F.leaky_relu(self.conv_in(base), 0.2)
        x = self.blocks(x)
        return base + self.conv_out(x)


class DetailTranslator(nn.Module):
    """Mask-based refinement of the high-frequency bands, coarse to fine."""

    def __init__(self, blocks=4, channels=16, levels=3):
        super().__init__()
        if blocks < 1:
            raise ValueError("need at least one residual block")
        if not 2 <= levels <= 5:
            raise ValueError(f"levels must be in [2, 5], got {levels}")
        self.levels = levels
        self.conv_in = nn.Conv2d(9, channels, 3, padding=1)
        self.blocks = nn.Sequential(*[ResidualBlock(channels) for _ in range(blocks)])
        self.conv_out = nn.Conv2d(channels, 3, 3, padding=1)
        self.refine = nn.ModuleList(
            [nn.Conv2d(3, 3, 3, padding=1) for _ in range(levels - 2)]
        )
        # the mask starts near all-ones and the refinements near zero, so the
        # bands pass through unchanged at init
        nn.init.normal_(self.conv_out.weight, std=1e-3)
        nn.init.ones_(self.conv_out.bias)
        for conv in self.refine:
            nn.init.normal_(conv.weight, std=1e-3)
            nn.init.zeros_(conv.bias)

    def forward(self, pyramid, base_out):
        bands = pyramid.bands
        if len(bands) != self.levels:
            raise ValueError(f"expected {self.levels} bands, got {len(bands)}")
        base_in = bands[-1]
        coarsest = bands[-2]
        size = coarsest.shape[-2:]
        feat = torch.cat(
            [coarsest, upsample(base_in, size), upsample(base_out, size)], dim=-3
        )
        mask = self.conv_out(self.blocks(F.leaky_relu(self.conv_in(feat), 0.2)))
        translated = [coarsest * mask]
        for conv, band in zip(self.refine, reversed(bands[:-2])):
            mask = upsample(mask, band.shape[-2:])
            mask = mask + conv(mask)
            translated.append(band * mask)
        translated.reverse()
        return Pyramid(bands=translated + [base_out], source_size=pyramid.source_size)


@dataclass
class GeneratorOutput:
    enhanced: torch.Tensor
    predicted_kernel: torch.Tensor
    pyramid_in: Pyramid
    pyramid_out: Pyramid


class Generator(nn.Module):
    """Kernel prediction, pyramid decomposition, band translation, reconstruction."""

    def __init__(
        self,
        ltm_blocks=2,
        utm_blocks=4,
        base_channels=16,
        levels=3,
        channel_plan=DEFAULT_CHANNEL_PLAN,
    ):
        super().__init__()
        self.levels = levels
        self.kernel_net = KernelPredictor(channel_plan)
        self.base_translator = BaseTranslator(ltm_blocks, base_channels)
        self.detail_translator = DetailTranslator(utm_blocks, base_channels, levels)

    def forward(self, image):
        kernel = self.kernel_net(image)
        pyr = decompose(image, kernel, self.levels)
        base_out = self.base_translator(pyr.bands[-1])
        pyr_out = self.detail_translator(pyr, base_out)
        enhanced = reconstruct(pyr_out)
        return GeneratorOutput(enhanced, kernel, pyr, pyr_out)
