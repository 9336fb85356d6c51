"""Command-line entry point.

Subcommands: decompose, predict-kernel, enhance, train, eval, make-gradmix.
Exit codes: 0 success, 2 usage error, 1 runtime failure (one-line diagnostic
on stderr).
"""

import argparse
import sys
from pathlib import Path

import cv2
import numpy as np
import torch

from .ablation import run_block_ablation, run_gan_ablation
from .checkpoint import load_checkpoint, save_checkpoint
from .data import (
    load_image,
    load_scene_dataset,
    compose_grad,
    compose_mix,
    pairs_from_sequences,
    save_image,
    scan_scene_dataset,
    synthetic_pair,
    write_manifest,
)
from .hypernet import gaussian_anchor
from .pyramid import decompose, load_kernel, save_kernel
from .report import (
    plot_metric_report,
    plot_train_log,
    write_metric_csv,
    write_summary,
    write_train_log,
)
from .trainer import TrainConfig, Trainer, build_generator

IMAGE_GLOB = ("*.png", "*.jpg", "*.jpeg", "*.bmp")


def _band_names(n):
    return [f"h{i}" for i in range(n - 1)] + ["base"]


def _write_band_png(band, offset, path):
    arr = band.detach().numpy().transpose(1, 2, 0)
    png = np.clip(arr + offset, 0.0, 1.0)
    png = (png * 65535.0 + 0.5).astype(np.uint16)
    if not cv2.imwrite(str(path), png[:, :, ::-1]):
        raise RuntimeError(f"could not write {path}")


def cmd_decompose(args):
    image = load_image(args.input)
    if args.kernel == "gaussian":
        kernel = gaussian_anchor()
    else:
        kernel = load_kernel(args.kernel)
    pyr = decompose(image, kernel, levels=args.levels)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = _band_names(len(pyr.bands))
    lines = ["# band offset min max height width"]
    for name, band in zip(names, pyr.bands):
        offset = 0.0 if name == "base" else 0.5
        _write_band_png(band, offset, out_dir / f"{name}.png")
        h, w = band.shape[-2:]
        lines.append(
            f"{name} {offset} {float(band.min()):.9g} {float(band.max()):.9g} {h} {w}"
        )
    (out_dir / "bands.txt").write_text("\n".join(lines) + "\n")
    save_kernel(kernel, out_dir / "kernel.txt")
    print(f"wrote {len(names)} bands to {out_dir}")
    return 0


def _load_generator(checkpoint_path):
    state = load_checkpoint(checkpoint_path)
    config = TrainConfig(**state["config"])
    generator = build_generator(config)
    generator.load_state_dict(state["generator"])
    generator.eval()
    return generator, config


def cmd_predict_kernel(args):
    generator, _ = _load_generator(args.checkpoint)
    image = load_image(args.input)
    with torch.no_grad():
        kernel = generator.kernel_net(image)
    save_kernel(kernel, args.out)
    print(f"wrote kernel to {args.out}")
    return 0


def _enhance_size(h, w):
    return max(32, (h // 4) * 4), max(32, (w // 4) * 4)


def cmd_enhance(args):
    generator, _ = _load_generator(args.checkpoint)
    source = Path(args.input)
    if source.is_dir():
        paths = sorted(p for pattern in IMAGE_GLOB for p in source.glob(pattern))
        if not paths:
            raise FileNotFoundError(f"no images found in {source}")
    else:
        if not source.exists():
            raise FileNotFoundError(f"no such file: {source}")
        paths = [source]
    out = Path(args.out)
    # a single input with an image-suffixed --out writes exactly there;
    # everything else lands in --out as a directory
    single_target = len(paths) == 1 and not source.is_dir() and out.suffix.lower() in (
        ".png", ".jpg", ".jpeg", ".bmp",
    )
    out_dir = out.parent if single_target else out
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in paths:
        image = load_image(path)
        h, w = image.shape[-2:]
        th, tw = _enhance_size(h, w)
        if (th, tw) != (h, w):
            # network sizes: dimensions must be divisible by 4 and at least 32
            image = torch.nn.functional.interpolate(
                image.unsqueeze(0), size=(th, tw), mode="bilinear", align_corners=False
            ).squeeze(0)
        with torch.no_grad():
            enhanced = generator(image).enhanced.clamp(0, 1)
        save_image(enhanced, out if single_target else out_dir / f"{path.stem}.png")
    print(f"enhanced {len(paths)} image(s) into {out}")
    return 0


def cmd_train(args):
    config = TrainConfig.from_yaml(args.config)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.synthetic:
        train_pairs = [synthetic_pair(config.seed + i, config.image_size) for i in range(args.synthetic)]
        val_pairs = []
    else:
        splits = load_scene_dataset(args.data)
        write_manifest(splits, out_dir / "manifest.txt")
        train_pairs = pairs_from_sequences(
            splits.train, mode=args.mode, size=config.image_size, seed=config.seed
        )
        val_pairs = pairs_from_sequences(
            splits.val, mode=args.mode, size=config.image_size, seed=config.seed
        )
    trainer = Trainer(config, train_pairs, val_pairs)
    trainer.fit(out_dir=out_dir)
    write_train_log(trainer.log, out_dir / "train_log.csv")
    plot_train_log(trainer.log, out_dir / "losses.png")
    if trainer.log:
        last = trainer.log[-1]
        print(
            f"trained {trainer.step} steps on {len(train_pairs)} pairs; "
            f"final l_pix {last['l_pix']:.5g}, l_total {last['l_total']:.5g}"
        )
    else:
        print("initialized checkpoint, no training steps requested")
    print(f"artifacts in {out_dir}")
    return 0


def cmd_eval(args):
    state = load_checkpoint(args.checkpoint)
    trainer = Trainer.from_checkpoint(state)
    splits = load_scene_dataset(args.data)
    mode = "frames" if args.split == "test" else args.split
    pairs = pairs_from_sequences(
        splits.test, mode=mode, size=trainer.config.image_size, seed=trainer.config.seed
    )
    report = trainer.evaluate(pairs)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_metric_csv(report, out_dir / "report.csv")
    write_summary(report, out_dir / "summary.txt")
    plot_metric_report(report, out_dir / "metrics.png")
    if report.psnr_db is None:
        print("empty split: no images evaluated")
    else:
        print(
            f"{args.split}: {len(report.per_image)} image(s), "
            f"psnr {report.psnr_db:.3f} dB, ssim {report.ssim:.4f}"
        )
    print(f"report in {out_dir}")
    return 0


def cmd_make_gradmix(args):
    sequences, _ = scan_scene_dataset(args.root)
    out_dir = Path(args.out)
    (out_dir / "degraded").mkdir(parents=True, exist_ok=True)
    (out_dir / "labels").mkdir(parents=True, exist_ok=True)
    rows = []
    for i, seq in enumerate(sequences):
        if args.mode == "grad":
            pair = compose_grad(seq, args.panels)
        else:
            pair = compose_mix(seq, args.panels, seed=args.seed + i)
        save_image(pair.degraded, out_dir / "degraded" / f"{seq.id}.png")
        save_image(pair.reference, out_dir / "labels" / f"{seq.id}.png")
        rows.append(f"{seq.id}\t{args.mode}\t{pair.id}")
    (out_dir / "manifest.txt").write_text("\n".join(rows) + "\n" if rows else "")
    print(f"composed {len(rows)} {args.mode} image(s) into {out_dir}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="kapyr",
        description="Kernel-adaptive pyramid translation for mixed-exposure correction.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decompose", help="export pyramid bands as 16-bit PNGs")
    p.add_argument("--input", required=True, help="input image")
    p.add_argument("--kernel", default="gaussian", help="kernel text file, or 'gaussian'")
    p.add_argument("--out-dir", required=True)
    p.add_argument("--levels", type=int, default=3, choices=range(2, 6))
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("predict-kernel", help="write the predicted 5x5 kernel as text")
    p.add_argument("--input", required=True)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict_kernel)

    p = sub.add_parser("enhance", help="run the generator on an image or directory")
    p.add_argument("--input", required=True, help="image file or directory")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--out", required=True, help="output image (single input) or directory")
    p.set_defaults(func=cmd_enhance)

    p = sub.add_parser("train", help="train from a YAML config")
    p.add_argument("--config", required=True)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--data", help="dataset root (scenes/ + labels/)")
    src.add_argument("--synthetic", type=int, metavar="N", help="train on N synthetic pairs")
    p.add_argument("--mode", default="frames", choices=("frames", "grad", "mix"))
    p.add_argument("--out-dir", default="runs/train")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="evaluate a checkpoint on the test split")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", default="test", choices=("test", "grad", "mix"))
    p.add_argument("--data", required=True)
    p.add_argument("--out-dir", default="runs/eval")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("make-gradmix", help="compose panel images from scenes")
    p.add_argument("--root", required=True)
    p.add_argument("--mode", required=True, choices=("grad", "mix"))
    p.add_argument("--panels", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_make_gradmix)

    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        result = args.func(args)
        return 0 if result is None else int(result)
    except Exception as exc:  # noqa: BLE001 - boundary: report and set exit code
        message = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
