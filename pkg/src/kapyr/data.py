"""Scene dataset ingestion, splits, resizing, and panel composition.

Expected layout:

    root/scenes/<scene_id>/<frame>.png   multi-exposure frames, dark to bright
    root/labels/<scene_id>.png           well-exposed reference per scene
    root/test_index.txt                  optional: one test scene id per line

Panel composition builds mixed-exposure test images by slicing vertical panels
out of differently exposed frames of one scene, either ordered by exposure
("grad") or permuted ("mix").
"""

import hashlib
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import torch
import torch.nn.functional as F
from PIL import Image

IMAGE_EXTS = (".png", ".jpg", ".jpeg", ".bmp")

DEFAULT_SIZE = (608, 896)


def load_image(path):
    """Read an 8-bit image as a float32 (3, H, W) tensor in [0, 1]."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("RGB"), dtype=np.float32) / 255.0
    return torch.from_numpy(arr).permute(2, 0, 1).contiguous()


def save_image(tensor, path):
    """Write a (3, H, W) tensor as an 8-bit PNG, clamped to [0, 1]."""
    arr = tensor.detach().clamp(0, 1).mul(255).round().to(torch.uint8)
    arr = arr.permute(1, 2, 0).cpu().numpy()
    Image.fromarray(arr, mode="RGB").save(path)


def resize_image(image, size):
    """Bilinear resize to (height, width). Same-size resize is the identity."""
    x, squeeze = (image.unsqueeze(0), True) if image.dim() == 3 else (image, False)
    out = F.interpolate(x, size=tuple(int(s) for s in size), mode="bilinear", align_corners=False)
    return out.squeeze(0) if squeeze else out


@dataclass
class SamplePair:
    degraded: torch.Tensor
    reference: torch.Tensor
    id: str


@dataclass
class ExposureSequence:
    """One scene: ordered frame paths plus the reference path."""

    id: str
    frame_paths: list
    reference_path: Path
    ordered_by_index: bool = True

    def load_frames(self):
        frames = [load_image(p) for p in self.frame_paths]
        if not self.ordered_by_index:
            # file names carry no exposure order, fall back to brightness
            frames.sort(key=lambda f: float(f.mean()))
        return frames

    def load_reference(self):
        return load_image(self.reference_path)


@dataclass
class DatasetSplits:
    train: list = field(default_factory=list)
    val: list = field(default_factory=list)
    test: list = field(default_factory=list)
    skipped: list = field(default_factory=list)

    def manifest_rows(self):
        rows = []
        for split_name in ("train", "val", "test"):
            for seq in getattr(self, split_name):
                paths = ";".join(str(p) for p in [*seq.frame_paths, seq.reference_path])
                rows.append(f"{seq.id}\t{split_name}\t{paths}")
        for sid, note in self.skipped:
            rows.append(f"{sid}\tskipped\t{note}")
        return rows


def write_manifest(splits, path):
    with open(path, "w") as f:
        for row in splits.manifest_rows():
            f.write(row + "\n")


def _readable(path):
    try:
        with Image.open(path) as img:
            img.verify()
        return True
    except Exception:
        return False


def _find_label(labels_dir, scene_id):
    for ext in IMAGE_EXTS:
        p = labels_dir / f"{scene_id}{ext}"
        if p.exists():
            return p
    return None


def scan_scene_dataset(root):
    """Walk the layout and return (sequences, skipped records)."""
    root = Path(root)
    scenes_dir = root / "scenes"
    labels_dir = root / "labels"
    if not scenes_dir.is_dir():
        raise ValueError(f"{root}: no scenes/ directory")
    sequences, skipped = [], []
    for scene_dir in sorted(p for p in scenes_dir.iterdir() if p.is_dir()):
        sid = scene_dir.name
        label = _find_label(labels_dir, sid)
        if label is None or not _readable(label):
            raise ValueError(f"scene {sid}: missing or unreadable reference image")
        frames = sorted(p for p in scene_dir.iterdir() if p.suffix.lower() in IMAGE_EXTS)
        readable = []
        for p in frames:
            if _readable(p):
                readable.append(p)
            else:
                warnings.warn(f"skipping unreadable frame {p}")
                skipped.append((sid, f"unreadable frame {p}"))
        if len(readable) < 2:
            warnings.warn(f"scene {sid}: fewer than 2 readable frames, dropped")
            skipped.append((sid, "scene dropped: fewer than 2 readable frames"))
            continue
        stems = [p.stem for p in readable]
        numeric = all(s.isdigit() for s in stems)
        if numeric:
            readable.sort(key=lambda p: int(p.stem))
        sequences.append(
            ExposureSequence(
                id=sid,
                frame_paths=readable,
                reference_path=label,
                ordered_by_index=numeric,
            )
        )
    return sequences, skipped


def split_scenes(sequences, test_ids=None):
    """Deterministic 8:1:1 split by hashed scene id, or by an explicit test list."""
    seqs = sorted(sequences, key=lambda s: (hashlib.md5(s.id.encode()).hexdigest(), s.id))
    if test_ids is not None:
        test_ids = set(test_ids)
        test = [s for s in seqs if s.id in test_ids]
        rest = [s for s in seqs if s.id not in test_ids]
        n_val = round(len(rest) / 9)
        return rest[n_val:], rest[:n_val], test
    n = len(seqs)
    n_test = round(n / 10)
    n_val = round(n / 10)
    test = seqs[:n_test]
    val = seqs[n_test : n_test + n_val]
    train = seqs[n_test + n_val :]
    return train, val, test


def load_scene_dataset(root):
    """Scan, honor root/test_index.txt when present, and split 8:1:1."""
    root = Path(root)
    sequences, skipped = scan_scene_dataset(root)
    index = root / "test_index.txt"
    test_ids = None
    if index.exists():
        test_ids = {line.strip() for line in index.read_text().splitlines() if line.strip()}
    train, val, test = split_scenes(sequences, test_ids)
    return DatasetSplits(train=train, val=val, test=test, skipped=skipped)


def panel_boundaries(width, k):
    """Column offsets of k near-equal vertical panels; remainder goes leftmost."""
    base, rem = divmod(width, k)
    if base == 0:
        raise ValueError(f"width {width} too small for {k} panels")
    bounds = [0]
    for j in range(k):
        bounds.append(bounds[-1] + base + (1 if j < rem else 0))
    return bounds


def panel_sources(n_frames, k):
    """Evenly spaced exposure ranks covering darkest through brightest."""
    if k == n_frames:
        return list(range(n_frames))
    return [round(j * (n_frames - 1) / (k - 1)) for j in range(k)]


def _compose(frames, order, width_bounds):
    out = frames[order[0]].clone()
    for j, rank in enumerate(order):
        lo, hi = width_bounds[j], width_bounds[j + 1]
        out[:, :, lo:hi] = frames[rank][:, :, lo:hi]
    return out


def _check_panel_count(k, n):
    if k < 2:
        raise ValueError(f"panel_count must be >= 2, got {k}")
    if k > n:
        raise ValueError(f"panel_count {k} exceeds frame count {n}")


def compose_grad(seq, panel_count=None):
    """Vertical panels with exposure increasing left to right, copied bit-exact."""
    frames = seq.load_frames()
    n = len(frames)
    k = n if panel_count is None else int(panel_count)
    _check_panel_count(k, n)
    if any(f.shape != frames[0].shape for f in frames):
        raise ValueError(f"scene {seq.id}: frames differ in size")
    bounds = panel_boundaries(frames[0].shape[-1], k)
    order = panel_sources(n, k)
    composite = _compose(frames, order, bounds)
    return SamplePair(degraded=composite, reference=seq.load_reference(), id=f"{seq.id}-grad{k}")


def compose_mix(seq, panel_count=None, permutation=None, seed=None):
    """Like compose_grad but with the panel exposure order permuted."""
    frames = seq.load_frames()
    n = len(frames)
    k = n if panel_count is None else int(panel_count)
    _check_panel_count(k, n)
    if permutation is None:
        permutation = np.random.default_rng(seed).permutation(k).tolist()
    else:
        permutation = [int(j) for j in permutation]
        if sorted(permutation) != list(range(k)):
            raise ValueError(f"not a permutation of 0..{k - 1}: {permutation}")
    if any(f.shape != frames[0].shape for f in frames):
        raise ValueError(f"scene {seq.id}: frames differ in size")
    bounds = panel_boundaries(frames[0].shape[-1], k)
    ranks = panel_sources(n, k)
    order = [ranks[p] for p in permutation]
    composite = _compose(frames, order, bounds)
    return SamplePair(degraded=composite, reference=seq.load_reference(), id=f"{seq.id}-mix{k}")


def resize_pair(pair, size=DEFAULT_SIZE):
    """Resize both images of a pair; both dimensions must be divisible by 4."""
    h, w = int(size[0]), int(size[1])
    if h % 4 or w % 4:
        raise ValueError(f"size {h}x{w} must be divisible by 4")
    return SamplePair(
        degraded=resize_image(pair.degraded, (h, w)),
        reference=resize_image(pair.reference, (h, w)),
        id=pair.id,
    )


def pairs_from_sequences(sequences, mode="frames", size=DEFAULT_SIZE, panels=None, seed=0):
    """Materialize (degraded, reference) pairs from scenes.

    mode "frames" pairs every exposure frame with the scene reference;
    "grad" and "mix" build one panel composite per scene.
    """
    pairs = []
    for i, seq in enumerate(sequences):
        if mode == "frames":
            reference = seq.load_reference()
            for j, frame in enumerate(seq.load_frames()):
                pairs.append(SamplePair(frame, reference, f"{seq.id}-f{j}"))
        elif mode == "grad":
            pairs.append(compose_grad(seq, panels))
        elif mode == "mix":
            pairs.append(compose_mix(seq, panels, seed=None if seed is None else seed + i))
        else:
            raise ValueError(f"unknown mode {mode!r}, expected frames, grad, or mix")
    return [resize_pair(p, size) for p in pairs]


def _wave_field(gen, h, w, n_waves, max_freq, amp_lo, amp_hi):
    ys = torch.linspace(0, 1, h).view(h, 1)
    xs = torch.linspace(0, 1, w).view(1, w)
    acc = torch.zeros(h, w)
    two_pi = 2.0 * torch.pi
    for _ in range(n_waves):
        fy, fx = (torch.rand(2, generator=gen) * max_freq).tolist()
        phase = float(torch.rand(1, generator=gen)) * two_pi
        amp = amp_lo + (amp_hi - amp_lo) * float(torch.rand(1, generator=gen))
        acc = acc + amp * torch.sin(two_pi * (fy * ys + fx * xs) + phase)
    return acc


def synthetic_pair(seed, size=(64, 64)):
    """Toy pair for smoke tests and demos: a smooth reference image degraded by
    a smooth spatially varying exposure gain (under and over in one image)."""
    gen = torch.Generator().manual_seed(int(seed))
    h, w = int(size[0]), int(size[1])
    channels = [
        (0.5 + _wave_field(gen, h, w, 3, 1.5, 0.22, 0.25)).clamp(0.15, 0.85)
        for _ in range(3)
    ]
    reference = torch.stack(channels)
    gain = _wave_field(gen, h, w, 2, 1.0, 0.8, 1.0)
    lo, hi = float(gain.min()), float(gain.max())
    gain = 0.45 + 1.05 * (gain - lo) / max(hi - lo, 1e-6)
    degraded = (reference * gain.unsqueeze(0)).clamp(0, 1)
    return SamplePair(degraded=degraded, reference=reference, id=f"synthetic-{seed}")
