import numpy as np
import torch

from kapyr import Trainer, TrainConfig, load_kernel, reconstruct, save_checkpoint, save_image, synthetic_pair
from kapyr.cli import main
from kapyr.pyramid import Pyramid

from conftest import make_scene_root


def test_no_arguments_is_usage_error(capsys):
    assert main([]) == 2
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand(capsys):
    assert main(["frobnicate"]) == 2


def test_unknown_flag(capsys):
    assert main(["decompose", "--input", "x.png", "--out-dir", "d", "--wat"]) == 2


def test_help_exits_zero(capsys):
    assert main(["--help"]) == 0
    assert main(["train", "--help"]) == 0


def test_missing_input_is_runtime_error(capsys, tmp_path):
    code = main(["decompose", "--input", str(tmp_path / "nope.png"), "--out-dir", str(tmp_path / "out")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "nope.png" in err
    assert len(err.strip().splitlines()) == 1


def test_decompose_roundtrip_within_8bit_error(tmp_path, capsys):
    pair = synthetic_pair(21, (64, 64))
    src = tmp_path / "input.png"
    save_image(pair.reference, src)
    out_dir = tmp_path / "bands"
    assert main(["decompose", "--input", str(src), "--kernel", "gaussian", "--out-dir", str(out_dir)]) == 0

    import cv2

    from kapyr import load_image

    sidecar = (out_dir / "bands.txt").read_text().splitlines()
    bands = []
    names = []
    for line in sidecar:
        if line.startswith("#"):
            continue
        name, offset, lo, hi, h, w = line.split()
        png = cv2.imread(str(out_dir / f"{name}.png"), cv2.IMREAD_UNCHANGED)
        arr = png[:, :, ::-1].astype(np.float64) / 65535.0 - float(offset)
        band = torch.from_numpy(arr.transpose(2, 0, 1).copy()).float()
        assert band.shape[-2:] == (int(h), int(w))
        assert float(band.min()) >= float(lo) - 1e-3
        assert float(band.max()) <= float(hi) + 1e-3
        bands.append(band)
        names.append(name)
    assert names == ["h0", "h1", "base"]
    rebuilt = reconstruct(Pyramid(bands=bands, source_size=tuple(bands[0].shape[-2:])))
    original = load_image(src)
    assert (rebuilt - original).abs().max().item() <= 1.0 / 255.0


def test_decompose_with_kernel_file(tmp_path):
    from kapyr import save_kernel

    src = tmp_path / "input.png"
    save_image(synthetic_pair(22, (32, 32)).reference, src)
    kpath = tmp_path / "k.txt"
    save_kernel(torch.full((5, 5), 1.0 / 25.0), kpath)
    out_dir = tmp_path / "bands"
    assert main(["decompose", "--input", str(src), "--kernel", str(kpath), "--out-dir", str(out_dir)]) == 0
    assert (out_dir / "kernel.txt").exists()


def _make_checkpoint(tmp_path, image_size=(64, 64)):
    config = TrainConfig(max_steps=0, batch_size=1, seed=3, image_size=image_size)
    trainer = Trainer(config, [synthetic_pair(3, image_size)])
    path = tmp_path / "model.npz"
    save_checkpoint(trainer.state(), path)
    return path


def test_predict_kernel_writes_text(tmp_path):
    ckpt = _make_checkpoint(tmp_path)
    src = tmp_path / "img.png"
    save_image(synthetic_pair(9, (64, 64)).degraded, src)
    out = tmp_path / "kernel.txt"
    assert main(["predict-kernel", "--input", str(src), "--checkpoint", str(ckpt), "--out", str(out)]) == 0
    kernel = load_kernel(out)
    assert kernel.shape == (5, 5)


def test_enhance_single_image(tmp_path):
    ckpt = _make_checkpoint(tmp_path)
    src = tmp_path / "img.png"
    save_image(synthetic_pair(10, (64, 64)).degraded, src)
    out_dir = tmp_path / "enhanced"
    assert main(["enhance", "--input", str(src), "--checkpoint", str(ckpt), "--out", str(out_dir)]) == 0
    from kapyr import load_image

    result = load_image(out_dir / "img.png")
    assert result.shape == (3, 64, 64)


def test_enhance_single_image_to_named_file(tmp_path):
    ckpt = _make_checkpoint(tmp_path)
    src = tmp_path / "img.png"
    save_image(synthetic_pair(10, (64, 64)).degraded, src)
    out = tmp_path / "fixed.png"
    assert main(["enhance", "--input", str(src), "--checkpoint", str(ckpt), "--out", str(out)]) == 0
    from kapyr import load_image

    assert out.is_file()
    assert load_image(out).shape == (3, 64, 64)


def test_enhance_directory_and_odd_sizes(tmp_path):
    ckpt = _make_checkpoint(tmp_path)
    src_dir = tmp_path / "inputs"
    src_dir.mkdir()
    save_image(torch.rand(3, 50, 70), src_dir / "odd.png")
    save_image(torch.rand(3, 64, 64), src_dir / "even.png")
    out_dir = tmp_path / "enhanced"
    assert main(["enhance", "--input", str(src_dir), "--checkpoint", str(ckpt), "--out", str(out_dir)]) == 0
    from kapyr import load_image

    assert load_image(out_dir / "even.png").shape == (3, 64, 64)
    assert load_image(out_dir / "odd.png").shape == (3, 48, 68)


def _write_config(tmp_path, **overrides):
    lines = ["max_steps: 2", "batch_size: 1", "image_size: [32, 32]", "seed: 1"]
    for k, v in overrides.items():
        lines.append(f"{k}: {v}")
    path = tmp_path / "config.yaml"
    path.write_text("\n".join(lines) + "\n")
    return path


def test_train_synthetic_writes_artifacts(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    out_dir = tmp_path / "run"
    assert main(["train", "--config", str(cfg), "--synthetic", "2", "--out-dir", str(out_dir)]) == 0
    for name in ("train_log.csv", "losses.png", "latest.npz", "best.npz"):
        assert (out_dir / name).exists(), name
    log = (out_dir / "train_log.csv").read_text().splitlines()
    assert log[0] == "step,l_pix,l_ker,l_gan,l_total,d_loss"
    assert len(log) == 3


def test_train_requires_a_data_source(tmp_path, capsys):
    cfg = _write_config(tmp_path)
    assert main(["train", "--config", str(cfg)]) == 2


def test_train_bad_config_key_is_runtime_error(tmp_path, capsys):
    cfg = tmp_path / "bad.yaml"
    cfg.write_text("max_steps: 1\nwarmup: 10\n")
    assert main(["train", "--config", str(cfg), "--synthetic", "1"]) == 1
    assert "warmup" in capsys.readouterr().err


def test_train_eval_on_scene_dataset(tmp_path, capsys):
    root = make_scene_root(tmp_path, n_scenes=4, n_frames=3, size=(24, 32))
    # 4 scenes round to an empty held-out split, so pin one explicitly
    (root / "test_index.txt").write_text("scene001\n")
    cfg = _write_config(tmp_path)
    run_dir = tmp_path / "run"
    assert main(["train", "--config", str(cfg), "--data", str(root), "--mode", "grad", "--out-dir", str(run_dir)]) == 0
    assert (run_dir / "manifest.txt").exists()

    eval_dir = tmp_path / "eval"
    code = main([
        "eval",
        "--checkpoint",
        str(run_dir / "latest.npz"),
        "--split",
        "grad",
        "--data",
        str(root),
        "--out-dir",
        str(eval_dir),
    ])
    assert code == 0
    for name in ("report.csv", "summary.txt", "metrics.png"):
        assert (eval_dir / name).exists(), name
    assert "psnr" in capsys.readouterr().out


def test_make_gradmix_outputs_and_idempotence(tmp_path):
    root = make_scene_root(tmp_path, n_scenes=3, n_frames=3, size=(16, 24))
    out_dir = tmp_path / "composites"
    args = ["make-gradmix", "--root", str(root), "--mode", "mix", "--panels", "3", "--seed", "9", "--out", str(out_dir)]
    assert main(args) == 0
    degraded = sorted((out_dir / "degraded").glob("*.png"))
    assert len(degraded) == 3
    assert len(sorted((out_dir / "labels").glob("*.png"))) == 3
    first = [p.read_bytes() for p in degraded]
    assert main(args) == 0
    second = [p.read_bytes() for p in sorted((out_dir / "degraded").glob("*.png"))]
    assert first == second


def test_make_gradmix_grad_mode(tmp_path):
    root = make_scene_root(tmp_path, n_scenes=2, n_frames=3, size=(16, 24))
    out_dir = tmp_path / "grad"
    assert main(["make-gradmix", "--root", str(root), "--mode", "grad", "--out", str(out_dir)]) == 0
    manifest = (out_dir / "manifest.txt").read_text().splitlines()
    assert len(manifest) == 2
