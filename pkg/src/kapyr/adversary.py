"""Patch discriminator emitting a spatial grid of raw realism scores."""

import torch.nn as nn
import torch.nn.functional as F


class PatchDiscriminator(nn.Module):
    """Strided 4x4 conv stages with leaky rectifiers, then a 3x3 conv to one
    channel. No normalization layers, so scores are batch-independent."""

    def __init__(self, layers=4, base_channels=16):
        super().__init__()
        if layers < 2:
            raise ValueError(f"need at least 2 stages, got {layers}")
        self.layers = layers
        stages = []
        prev = 3
        for i in range(layers):
            ch = base_channels * 2**i
            stages.append(nn.Conv2d(prev, ch, 4, stride=2, padding=1))
            prev = ch
        self.stages = nn.ModuleList(stages)
        self.head = nn.Conv2d(prev, 1, 3, padding=1)

    def forward(self, image):
        x, squeeze = (image.unsqueeze(0), True) if image.dim() == 3 else (image, False)
        h, w = x.shape[-2:]
        need = 2**self.layers
        if h < need or w < need:
            raise ValueError(f"input {h}x{w} too small for {self.layers} strided stages")
        for conv in self.stages:
            x = F.leaky_relu(conv(x), 0.2)
        score = self.head(x)
        return score.squeeze(0) if squeeze else score
