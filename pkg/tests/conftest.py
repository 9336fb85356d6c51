import time
from types import SimpleNamespace

import numpy as np
import pytest
import torch

from kapyr import TrainConfig, Trainer, save_image, synthetic_pair

# collected by test_acceptance, printed after the run by the hook below
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, description, passed in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d} {status}  {description}")


def make_scene_root(root, n_scenes=10, n_frames=3, size=(24, 32), numeric_names=True):
    """Write a tiny on-disk scene dataset and return its path."""
    root = root / "dataset"
    (root / "scenes").mkdir(parents=True)
    (root / "labels").mkdir()
    gen = torch.Generator().manual_seed(1234)
    for s in range(n_scenes):
        sid = f"scene{s:03d}"
        scene_dir = root / "scenes" / sid
        scene_dir.mkdir()
        base = torch.rand(3, *size, generator=gen) * 0.5 + 0.25
        save_image(base, root / "labels" / f"{sid}.png")
        for f in range(n_frames):
            gain = 0.4 + 1.2 * f / max(n_frames - 1, 1)
            name = f"{f}.png" if numeric_names else f"frame_{chr(ord('a') + f)}.png"
            save_image((base * gain).clamp(0, 1), scene_dir / name)
    return root


@pytest.fixture()
def scene_root(tmp_path):
    return make_scene_root(tmp_path)


@pytest.fixture(scope="session")
def single_pair_run():
    """500 training steps on one synthetic pair, shared by several tests."""
    config = TrainConfig(max_steps=500, batch_size=1, seed=7, image_size=(64, 64))
    pair = synthetic_pair(7, (64, 64))
    trainer = Trainer(config, [pair])
    start = time.time()
    trainer.fit()
    return SimpleNamespace(trainer=trainer, pair=pair, elapsed=time.time() - start)


@pytest.fixture(scope="session")
def four_pair_run():
    """2000 training steps on four synthetic pairs at the default config."""
    config = TrainConfig(max_steps=2000, batch_size=4, seed=11, image_size=(64, 64))
    pairs = [synthetic_pair(100 + i, (64, 64)) for i in range(4)]
    trainer = Trainer(config, pairs)
    start = time.time()
    trainer.fit()
    return SimpleNamespace(trainer=trainer, pairs=pairs, elapsed=time.time() - start)
