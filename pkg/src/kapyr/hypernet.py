"""Hypernetwork that predicts a per-image 5x5 decomposition kernel.

Six convolution stages with progressively wider features: alternating 3x1 and
1x3 convs (each followed by ReLU and 2x max pooling), a 3x3 conv with pooling,
an adaptive average pool to 5x5, and a final 1x1 conv down to one channel. The
5x5 single-channel map is the kernel.
"""

import torch
import torch.nn as nn
import torch.nn.functional as F

DEFAULT_CHANNEL_PLAN = (8, 16, 32, 64, 64, 1)

MIN_INPUT = 32


def gaussian_anchor(dtype=torch.float32):
    """Fixed 5x5 binomial smoothing kernel: outer((1,4,6,4,1)/16)."""
    v = torch.tensor([1.0, 4.0, 6.0, 4.0, 1.0], dtype=torch.float64) / 16.0
    return torch.outer(v, v).to(dtype)


class KernelPredictor(nn.Module):
    """Maps an image (H, W >= 32) to a 5x5 kernel, any input size."""

    def __init__(self, channel_plan=DEFAULT_CHANNEL_PLAN):
        super().__init__()
        plan = tuple(int(c) for c in channel_plan)
        if len(plan) != 6:
            raise ValueError(f"channel_plan needs 6 entries, got {len(plan)}")
        if any(a > b for a, b in zip(plan[:4], plan[1:5])):
            raise ValueError(f"feature channels must be non-decreasing, got {plan[:5]}")
        if plan[5] != 1:
            raise ValueError("the final stage must emit a single channel")
        self.channel_plan = plan

        self.conv1 = nn.Conv2d(3, plan[0], (3, 1), padding=(1, 0))
        self.conv2 = nn.Conv2d(plan[0], plan[1], (1, 3), padding=(0, 1))
        self.conv3 = nn.Conv2d(plan[1], plan[2], (3, 1), padding=(1, 0))
        self.conv4 = nn.Conv2d(plan[2], plan[3], (1, 3), padding=(0, 1))
        self.conv5 = nn.Conv2d(plan[3], plan[4], 3, padding=1)
        self.head = nn.Conv2d(plan[4], 1, 1)
        self.pool = nn.MaxPool2d(2)

        # start as an approximate smoothing kernel: small head weights, bias at
        # the anchor mean, so early decompositions are well behaved
        nn.init.normal_(self.head.weight, std=1e-3)
        nn.init.constant_(self.head.bias, float(gaussian_anchor().mean()))

    def forward(self, image):
        x, squeeze = (image.unsqueeze(0), True) if image.dim() == 3 else (image, False)
        h, w = x.shape[-2:]
        if h < MIN_INPUT or w < MIN_INPUT:
            raise ValueError(f"input {h}x{w} is below the {MIN_INPUT}x{MIN_INPUT} minimum")
        x = self.pool(F.relu(self.conv1(x)))
        x = self.pool(F.relu(self.conv2(x)))
        x = self.pool(F.relu(self.conv3(x)))
        x = self.pool(F.relu(self.conv4(x)))
        x = self.pool(self.conv5(x))
        x = F.adaptive_avg_pool2d(x, 5)
        kernel = self.head(x).squeeze(1)
        return kernel.squeeze(0) if squeeze else kernel
