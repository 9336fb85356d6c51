"""PSNR and SSIM image quality metrics."""

import math
from dataclasses import dataclass, field

import torch
import torch.nn.functional as F

PSNR_CAP = 100.0


def psnr(a, b, max_val=1.0):
    """10 log10(max_val^2 / MSE), capped at 100 dB for identical images."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {tuple(a.shape)} vs {tuple(b.shape)}")
    mse = torch.mean((a.double() - b.double()) ** 2).item()
    if mse == 0.0:
        return PSNR_CAP
    return min(10.0 * math.log10(max_val**2 / mse), PSNR_CAP)


def _gaussian_window(size=11, sigma=1.5):
    coords = torch.arange(size, dtype=torch.float64) - (size - 1) / 2.0
    g = torch.exp(-(coords**2) / (2.0 * sigma**2))
    g = g / g.sum()
    return torch.outer(g, g)


def ssim(a, b, max_val=1.0):
    """Single-scale SSIM: 11x11 Gaussian window (sigma 1.5), K1 0.01, K2 0.03,
    computed per channel on the valid interior and averaged."""
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {tuple(a.shape)} vs {tuple(b.shape)}")
    x, squeeze = (a.unsqueeze(0), True) if a.dim() == 3 else (a, False)
    y = b.unsqueeze(0) if squeeze else b
    h, w = x.shape[-2:]
    if h < 11 or w < 11:
        raise ValueError(f"image {h}x{w} smaller than the 11x11 window")
    c = x.shape[1]
    win = _gaussian_window().expand(c, 1, 11, 11)
    x = x.double()
    y = y.double()

    def blur(t):
        return F.conv2d(t, win, groups=c)

    mu_x = blur(x)
    mu_y = blur(y)
    var_x = blur(x * x) - mu_x**2
    var_y = blur(y * y) - mu_y**2
    cov = blur(x * y) - mu_x * mu_y
    c1 = (0.01 * max_val) ** 2
    c2 = (0.03 * max_val) ** 2
    num = (2 * mu_x * mu_y + c1) * (2 * cov + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (var_x + var_y + c2)
    return float((num / den).mean())


@dataclass
class MetricReport:
    """Per-image (id, psnr, ssim) rows plus arithmetic-mean aggregates.

    Aggregates are None for an empty report."""

    per_image: list = field(default_factory=list)
    psnr_db: float = None
    ssim: float = None
    skipped: list = field(default_factory=list)

    @classmethod
    def from_rows(cls, rows):
        rows = list(rows)
        if not rows:
            return cls(per_image=[])
        mean_p = sum(r[1] for r in rows) / len(rows)
        mean_s = sum(r[2] for r in rows) / len(rows)
        return cls(per_image=rows, psnr_db=mean_p, ssim=mean_s)
