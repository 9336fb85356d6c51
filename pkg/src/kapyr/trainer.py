"""Alternating generator/discriminator optimization, configuration, evaluation.

Each step first updates the discriminator on references vs detached generator
outputs, then updates the generator (hypernetwork included) with discriminator
parameters frozen. Freeze checksums are recorded every step so the invariant
is observable from outside.
"""

import copy
import hashlib
import warnings
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import torch
import yaml

from .adversary import PatchDiscriminator
from .checkpoint import save_checkpoint
from .hypernet import gaussian_anchor
from .losses import (
    GAN_TYPES,
    LossWeights,
    bundle_floats,
    discriminator_gan_loss,
    generator_gan_loss,
    kernel_loss,
    pixel_loss,
    total_generator_loss,
)
from .metrics import MetricReport, psnr, ssim
from .translator import Generator


@dataclass
class TrainConfig:
    learning_rate: float = 1e-4
    optimizer: str = "adam"
    gan_type: str = "wgan_softplus"
    eta_pix: float = 1000.0
    lambda_ker: float = 0.01
    ltm_blocks: int = 2
    utm_blocks: int = 4
    max_steps: int = 2000
    batch_size: int = 4
    seed: int = 0
    image_size: tuple = (608, 896)

    def __post_init__(self):
        self.learning_rate = float(self.learning_rate)
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.optimizer not in ("adam", "sgd"):
            raise ValueError(f"optimizer must be adam or sgd, got {self.optimizer!r}")
        if self.gan_type not in GAN_TYPES:
            raise ValueError(f"gan_type must be one of {GAN_TYPES}, got {self.gan_type!r}")
        LossWeights(self.eta_pix, self.lambda_ker)
        for name in ("ltm_blocks", "utm_blocks"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1")
        if int(self.max_steps) < 0:
            raise ValueError("max_steps must be >= 0")
        if int(self.batch_size) < 1:
            raise ValueError("batch_size must be >= 1")
        size = self.image_size
        if isinstance(size, int):
            size = (size, size)
        size = (int(size[0]), int(size[1]))
        if size[0] % 4 or size[1] % 4:
            raise ValueError(f"image_size {size} must be divisible by 4")
        if min(size) < 32:
            raise ValueError(f"image_size {size} is below the 32-pixel minimum")
        self.image_size = size

    @classmethod
    def from_yaml(cls, path):
        raw = yaml.safe_load(Path(path).read_text())
        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a mapping of keys to values")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"{path}: unknown config keys {unknown}; known keys: {sorted(known)}")
        return cls(**raw)

    def to_dict(self):
        return asdict(self)


def param_checksum(module):
    """Order-stable digest of every parameter and buffer byte."""
    h = hashlib.md5()
    for name, tensor in sorted(module.state_dict().items()):
        h.update(name.encode())
        h.update(tensor.detach().cpu().numpy().tobytes())
    return h.hexdigest()


def build_generator(config):
    return Generator(ltm_blocks=config.ltm_blocks, utm_blocks=config.utm_blocks)


class Trainer:
    def __init__(self, config, train_pairs=(), val_pairs=()):
        self.config = config
        self.weights = LossWeights(config.eta_pix, config.lambda_ker)
        self.anchor = gaussian_anchor()
        torch.manual_seed(config.seed)
        self.generator = build_generator(config)
        self.discriminator = PatchDiscriminator()
        opt = torch.optim.Adam if config.optimizer == "adam" else torch.optim.SGD
        self.opt_g = opt(self.generator.parameters(), lr=config.learning_rate)
        self.opt_d = opt(self.discriminator.parameters(), lr=config.learning_rate)
        self.train_pairs = list(train_pairs)
        self.val_pairs = list(val_pairs)
        self._sampler = torch.Generator().manual_seed(config.seed + 1)
        self.step = 0
        self.log = []
        self.val_log = []
        self.freeze_checksums = []

    @classmethod
    def from_checkpoint(cls, state, train_pairs=(), val_pairs=()):
        trainer = cls(TrainConfig(**state["config"]), train_pairs, val_pairs)
        trainer.generator.load_state_dict(state["generator"])
        trainer.discriminator.load_state_dict(state["discriminator"])
        trainer.opt_g.load_state_dict(state["opt_g"])
        trainer.opt_d.load_state_dict(state["opt_d"])
        trainer.step = int(state["step"])
        return trainer

    def state(self):
        return {
            "step": self.step,
            "config": self.config.to_dict(),
            "generator": self.generator.state_dict(),
            "discriminator": self.discriminator.state_dict(),
            "opt_g": self.opt_g.state_dict(),
            "opt_d": self.opt_d.state_dict(),
        }

    def _sample_batch(self):
        n = len(self.train_pairs)
        idx = torch.randint(n, (self.config.batch_size,), generator=self._sampler)
        deg = torch.stack([self.train_pairs[i].degraded for i in idx.tolist()])
        ref = torch.stack([self.train_pairs[i].reference for i in idx.tolist()])
        return deg, ref

    def train_step(self, batch):
        """One discriminator update, then one generator update with the
        discriminator frozen. Returns the logged record."""
        degraded, reference = batch
        out = self.generator(degraded)
        fake = out.enhanced

        d_real = self.discriminator(reference)
        d_fake = self.discriminator(fake.detach())
        d_loss = discriminator_gan_loss(d_real, d_fake, self.config.gan_type)
        self.opt_d.zero_grad()
        d_loss.backward()
        self.opt_d.step()

        pre = param_checksum(self.discriminator)
        for p in self.discriminator.parameters():
            p.requires_grad_(False)
        l_gan = generator_gan_loss(self.discriminator(fake), self.config.gan_type)
        l_pix = pixel_loss(fake, reference)
        l_ker = kernel_loss(out.predicted_kernel, self.anchor)
        try:
            bundle = total_generator_loss(l_gan, l_pix, l_ker, self.weights)
        except ValueError as err:
            k = out.predicted_kernel.detach()
            raise RuntimeError(
                f"non-finite loss at step {self.step + 1}: {err}; "
                f"kernel min {float(k.min()):.4g} max {float(k.max()):.4g} mean {float(k.mean()):.4g}"
            ) from err
        self.opt_g.zero_grad()
        bundle.l_total.backward()
        self.opt_g.step()
        for p in self.discriminator.parameters():
            p.requires_grad_(True)
        post = param_checksum(self.discriminator)

        self.step += 1
        logged = bundle_floats(bundle, self.weights)
        record = {
            "step": self.step,
            "l_pix": logged.l_pix,
            "l_ker": logged.l_ker,
            "l_gan": logged.l_gan,
            "l_total": logged.l_total,
            "d_loss": float(d_loss.detach()),
        }
        self._abort_if_nonfinite(record, out.predicted_kernel)
        self.log.append(record)
        self.freeze_checksums.append((pre, post))
        return record

    def _abort_if_nonfinite(self, record, kernel):
        values = [v for k, v in record.items() if k != "step"]
        if all(v == v and abs(v) != float("inf") for v in values):
            return
        k = kernel.detach()
        raise RuntimeError(
            f"non-finite loss at step {record['step']}: {record}; "
            f"kernel min {float(k.min()):.4g} max {float(k.max()):.4g} mean {float(k.mean()):.4g}"
        )

    def fit(self, out_dir=None, eval_every=None):
        """Run max_steps updates, track validation, keep best and latest states."""
        if self.config.max_steps > 0 and not self.train_pairs:
            raise ValueError("training requires a nonempty train split")
        if out_dir is not None:
            out_dir = Path(out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
        if eval_every is None:
            eval_every = max(1, self.config.max_steps // 5)
        best_psnr = None
        best_state = None
        for _ in range(self.config.max_steps):
            self.train_step(self._sample_batch())
            if self.val_pairs and (self.step % eval_every == 0 or self.step == self.config.max_steps):
                report = self.evaluate(self.val_pairs)
                self.val_log.append((self.step, report.psnr_db, report.ssim))
                if best_psnr is None or report.psnr_db > best_psnr:
                    best_psnr = report.psnr_db
                    best_state = copy.deepcopy(self.state())
        final = self.state()
        if out_dir is not None:
            save_checkpoint(final, out_dir / "latest.npz")
            save_checkpoint(best_state if best_state is not None else final, out_dir / "best.npz")
        return final

    def evaluate(self, pairs):
        """Per-image and mean PSNR/SSIM of clamped generator outputs."""
        rows = []
        skipped = []
        with torch.no_grad():
            for pair in pairs:
                try:
                    enhanced = self.generator(pair.degraded).enhanced.clamp(0, 1)
                except ValueError as err:
                    warnings.warn(f"skipping {pair.id}: {err}")
                    skipped.append((pair.id, str(err)))
                    continue
                rows.append((pair.id, psnr(enhanced, pair.reference), ssim(enhanced, pair.reference)))
        report = MetricReport.from_rows(rows)
        report.skipped = skipped
        return report
