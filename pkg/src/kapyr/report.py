"""Delimited logs, plain-text tables, and rendered loss/metric figures."""

import csv

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

LOG_FIELDS = ("step", "l_pix", "l_ker", "l_gan", "l_total", "d_loss")


def write_train_log(records, path):
    """One CSV record per step: step, l_pix, l_ker, l_gan, l_total, d_loss."""
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=LOG_FIELDS, extrasaction="ignore")
        writer.writeheader()
        for rec in records:
            writer.writerow(rec)


def read_train_log(path):
    with open(path, newline="") as f:
        rows = []
        for rec in csv.DictReader(f):
            row = {k: float(v) for k, v in rec.items()}
            row["step"] = int(rec["step"])
            rows.append(row)
    return rows


def plot_train_log(records, path):
    """Two panels: weighted generator terms on a log scale, adversarial terms."""
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    steps = [r["step"] for r in records]
    if records:
        ax1.semilogy(steps, [max(r["l_pix"], 1e-12) for r in records], label="l_pix")
        ax1.semilogy(steps, [max(r["l_ker"], 1e-12) for r in records], label="l_ker")
        ax2.plot(steps, [r["l_gan"] for r in records], label="l_gan")
        ax2.plot(steps, [r["d_loss"] for r in records], label="d_loss")
    ax1.set_xlabel("step")
    ax1.set_ylabel("loss")
    ax1.set_title("reconstruction terms")
    ax1.legend()
    ax1.grid(True, alpha=0.3)
    ax2.set_xlabel("step")
    ax2.set_title("adversarial terms")
    ax2.legend()
    ax2.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def write_metric_csv(report, path):
    """Per-image records plus a trailing mean row."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(("id", "psnr_db", "ssim"))
        for image_id, p, s in report.per_image:
            writer.writerow((image_id, f"{p:.6f}", f"{s:.6f}"))
        if report.psnr_db is not None:
            writer.writerow(("mean", f"{report.psnr_db:.6f}", f"{report.ssim:.6f}"))


def format_summary(report):
    """Aligned plain-text table of per-image metrics with the mean row."""
    rows = [("image", "psnr_db", "ssim")]
    for image_id, p, s in report.per_image:
        rows.append((image_id, f"{p:.3f}", f"{s:.4f}"))
    if report.psnr_db is None:
        rows.append(("(empty split: aggregates absent)", "-", "-"))
    else:
        rows.append(("mean", f"{report.psnr_db:.3f}", f"{report.ssim:.4f}"))
    widths = [max(len(r[i]) for r in rows) for i in range(3)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def write_summary(report, path):
    with open(path, "w") as f:
        f.write(format_summary(report))


def plot_metric_report(report, path):
    fig, ax1 = plt.subplots(figsize=(max(6, len(report.per_image) * 0.5), 4))
    if report.per_image:
        ids = [r[0] for r in report.per_image]
        ax1.bar(range(len(ids)), [r[1] for r in report.per_image], color="#4878cf", label="psnr")
        ax1.set_xticks(range(len(ids)))
        ax1.set_xticklabels(ids, rotation=60, ha="right", fontsize=7)
        ax1.axhline(report.psnr_db, color="#4878cf", linestyle="--", alpha=0.7)
        ax2 = ax1.twinx()
        ax2.plot(range(len(ids)), [r[2] for r in report.per_image], "o-", color="#d65f5f", label="ssim")
        ax2.set_ylabel("ssim")
        ax2.set_ylim(0, 1.05)
    ax1.set_ylabel("psnr (dB)")
    ax1.set_title("per-image quality")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def _format_table(header, rows):
    table = [header] + rows
    widths = [max(len(r[i]) for r in table) for i in range(len(header))]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in table]
    lines.insert(1, "-" * len(lines[0]))
    return "\n".join(lines) + "\n"


def format_block_table(rows):
    """Block-count ablation table: one row per (utm_blocks, ltm_blocks) pair."""
    body = [
        (str(r["utm_blocks"]), str(r["ltm_blocks"]), f"{r['psnr_db']:.3f}", f"{r['ssim']:.4f}")
        for r in rows
    ]
    return _format_table(("utm_blocks", "ltm_blocks", "psnr_db", "ssim"), body)


def format_gan_table(rows):
    """Adversarial-variant ablation table: one row per gan_type."""
    body = [(r["gan_type"], f"{r['psnr_db']:.3f}", f"{r['ssim']:.4f}") for r in rows]
    return _format_table(("gan_type", "psnr_db", "ssim"), body)
