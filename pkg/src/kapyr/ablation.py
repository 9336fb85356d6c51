"""Structural ablations: the block-count grid and the adversarial-variant sweep.

Each configuration trains from scratch for a small number of smoke steps and
is scored on its own training pairs. At desk scale the numbers only show that
every configuration optimizes stably; they are not benchmark results.
"""

from dataclasses import replace

from .losses import GAN_TYPES
from .trainer import TrainConfig, Trainer

# (utm_blocks, ltm_blocks) pairs of the block-count study
BLOCK_CONFIGS = ((2, 3), (2, 4), (3, 2), (4, 2))


def _run_one(config, pairs):
    trainer = Trainer(config, pairs)
    trainer.fit()
    report = trainer.evaluate(pairs)
    return report.psnr_db, report.ssim


def run_block_ablation(pairs, steps=20, base=None):
    base = base or TrainConfig()
    rows = []
    for utm, ltm in BLOCK_CONFIGS:
        config = replace(base, utm_blocks=utm, ltm_blocks=ltm, max_steps=steps)
        psnr_db, ssim_val = _run_one(config, pairs)
        rows.append(
            {"utm_blocks": utm, "ltm_blocks": ltm, "psnr_db": psnr_db, "ssim": ssim_val}
        )
    return rows


def run_gan_ablation(pairs, steps=20, base=None):
    base = base or TrainConfig()
    rows = []
    for gan_type in GAN_TYPES:
        config = replace(base, gan_type=gan_type, max_steps=steps)
        psnr_db, ssim_val = _run_one(config, pairs)
        rows.append({"gan_type": gan_type, "psnr_db": psnr_db, "ssim": ssim_val})
    return rows
