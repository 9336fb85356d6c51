"""Kernel-parameterized Laplacian pyramid: decomposition and exact reconstruction.

The pyramid is driven by a single 5x5 kernel shared across channels. Each level
blurs with that kernel and keeps every second pixel; the high-frequency band is
the difference between the level and the bicubic upsampling of the next one.
Reconstruction telescopes, so it is exact for any finite kernel.
"""

from dataclasses import dataclass

import torch
import torch.nn.functional as F


@dataclass
class Pyramid:
    """Frequency bands ordered finest first; the last band is the low-pass base."""

    bands: list
    source_size: tuple

    def __iter__(self):
        return iter(self.bands)

    def __len__(self):
        return len(self.bands)


def _with_batch(x):
    if x.dim() == 3:
        return x.unsqueeze(0), True
    if x.dim() == 4:
        return x, False
    raise ValueError(f"expected a 3d or 4d image tensor, got {x.dim()}d")


def downsample(image, kernel):
    """Blur with a 5x5 kernel (reflect padding 2) and keep every second pixel.

    The kernel is applied identically to every channel. A batched kernel of
    shape (B, 5, 5) applies one kernel per batch element.
    """
    x, squeeze = _with_batch(image)
    b, c, h, w = x.shape
    if h % 2 or w % 2:
        raise ValueError(f"downsample needs even spatial dims, got {h}x{w}")
    if kernel.shape[-2:] != (5, 5) or kernel.dim() not in (2, 3):
        raise ValueError(f"kernel must be 5x5, got shape {tuple(kernel.shape)}")
    if kernel.dim() == 2:
        kernel = kernel.unsqueeze(0).expand(b, 5, 5)
    elif kernel.shape[0] != b:
        raise ValueError(f"batched kernel count {kernel.shape[0]} != batch {b}")

    x = F.pad(x, (2, 2, 2, 2), mode="reflect")
    # one group per (sample, channel) so each sample uses its own kernel
    weight = kernel.reshape(b, 1, 1, 5, 5).expand(b, c, 1, 5, 5).reshape(b * c, 1, 5, 5)
    out = F.conv2d(x.reshape(1, b * c, h + 4, w + 4), weight, stride=2, groups=b * c)
    out = out.reshape(b, c, h // 2, w // 2)
    return out.squeeze(0) if squeeze else out


def upsample(image, size):
    """Bicubic upsampling to exactly double the input size."""
    x, squeeze = _with_batch(image)
    h, w = x.shape[-2:]
    th, tw = int(size[0]), int(size[1])
    if (th, tw) != (2 * h, 2 * w):
        raise ValueError(f"target {th}x{tw} is not double the input {h}x{w}")
    if h < 2 or w < 2:
        raise ValueError(f"input {h}x{w} is below the bicubic support")
    out = F.interpolate(x, size=(th, tw), mode="bicubic", align_corners=False)
    return out.squeeze(0) if squeeze else out


def decompose(image, kernel, levels=3):
    """Split an image into levels-1 high-frequency bands plus the low-pass base.

    The base is kept as-is (not a residual), which is what makes
    reconstruct(decompose(x, k)) exact regardless of the kernel.
    """
    if not 2 <= levels <= 5:
        raise ValueError(f"levels must be in [2, 5], got {levels}")
    h, w = image.shape[-2:]
    div = 2 ** (levels - 1)
    if h % div or w % div:
        raise ValueError(f"image {h}x{w} not divisible by {div} for {levels} levels")
    bands = []
    current = image
    for _ in range(levels - 1):
        down = downsample(current, kernel)
        bands.append(current - upsample(down, current.shape[-2:]))
        current = down
    bands.append(current)
    return Pyramid(bands=bands, source_size=(h, w))


def reconstruct(pyramid):
    """Upsample-and-add from the base through the residual bands, finest last.

    Output is not clamped; clamping to [0, 1] happens only at image export.
    """
    bands = pyramid.bands
    if len(bands) < 2:
        raise ValueError("pyramid needs at least a base and one residual band")
    out = bands[-1]
    for band in reversed(bands[:-1]):
        up = upsample(out, band.shape[-2:])
        if up.shape != band.shape:
            raise ValueError(
                f"band shape {tuple(band.shape)} does not extend {tuple(out.shape)}"
            )
        out = up + band
    if out.shape[-2:] != tuple(pyramid.source_size):
        raise ValueError("pyramid bands do not telescope to the recorded source size")
    return out


def save_kernel(kernel, path):
    """Write a 5x5 kernel as 5 lines of 5 decimal numbers."""
    k = torch.as_tensor(kernel, dtype=torch.float32)
    if k.shape != (5, 5):
        raise ValueError(f"kernel must be 5x5, got shape {tuple(k.shape)}")
    with open(path, "w") as f:
        for row in k.tolist():
            f.write(" ".join(format(v, ".9g") for v in row) + "\n")


def load_kernel(path):
    """Read the 5-line text format written by save_kernel."""
    rows = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            rows.append([float(v) for v in line.split()])
    k = torch.tensor(rows, dtype=torch.float32)
    if k.shape != (5, 5):
        raise ValueError(f"{path}: expected 5 lines of 5 numbers, got {tuple(k.shape)}")
    if not torch.isfinite(k).all():
        raise ValueError(f"{path}: kernel has non-finite entries")
    return k
