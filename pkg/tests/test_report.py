from kapyr import MetricReport
from kapyr.ablation import BLOCK_CONFIGS
from kapyr.report import (
    format_block_table,
    format_gan_table,
    format_summary,
    plot_metric_report,
    plot_train_log,
    read_train_log,
    write_metric_csv,
    write_summary,
    write_train_log,
)

RECORDS = [
    {"step": 1, "l_pix": 0.04, "l_ker": 0.001, "l_gan": 0.7, "l_total": 40.7, "d_loss": 1.4},
    {"step": 2, "l_pix": 0.02, "l_ker": 0.001, "l_gan": 0.69, "l_total": 20.69, "d_loss": 1.39},
]


def test_train_log_roundtrip(tmp_path):
    path = tmp_path / "log.csv"
    write_train_log(RECORDS, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "step,l_pix,l_ker,l_gan,l_total,d_loss"
    assert len(lines) == 3
    rows = read_train_log(path)
    assert rows[0]["step"] == 1
    assert abs(rows[1]["l_pix"] - 0.02) < 1e-12


def test_plot_train_log_writes_figure(tmp_path):
    path = tmp_path / "losses.png"
    plot_train_log(RECORDS, path)
    assert path.exists() and path.stat().st_size > 1000


def _report():
    return MetricReport.from_rows([("img-a", 31.25, 0.91), ("img-b", 28.75, 0.87)])


def test_metric_csv(tmp_path):
    path = tmp_path / "report.csv"
    write_metric_csv(_report(), path)
    lines = path.read_text().splitlines()
    assert lines[0] == "id,psnr_db,ssim"
    assert lines[-1].startswith("mean,30.0")
    assert len(lines) == 4


def test_summary_layout(tmp_path):
    text = format_summary(_report())
    lines = text.splitlines()
    assert lines[0].split() == ["image", "psnr_db", "ssim"]
    assert lines[-1].split() == ["mean", "30.000", "0.8900"]
    path = tmp_path / "summary.txt"
    write_summary(_report(), path)
    assert path.read_text() == text


def test_summary_empty_report():
    text = format_summary(MetricReport.from_rows([]))
    assert "absent" in text


def test_plot_metric_report_writes_figure(tmp_path):
    path = tmp_path / "metrics.png"
    plot_metric_report(_report(), path)
    assert path.exists() and path.stat().st_size > 1000
    empty = tmp_path / "empty.png"
    plot_metric_report(MetricReport.from_rows([]), empty)
    assert empty.exists()


def test_block_table_layout():
    rows = [
        {"utm_blocks": u, "ltm_blocks": l, "psnr_db": 20.0 + i, "ssim": 0.8 + i / 100}
        for i, (u, l) in enumerate(BLOCK_CONFIGS)
    ]
    table = format_block_table(rows)
    lines = table.splitlines()
    assert lines[0].split() == ["utm_blocks", "ltm_blocks", "psnr_db", "ssim"]
    assert len(lines) == 6  # header, rule, four configurations
    assert lines[2].split()[:2] == ["2", "3"]
    assert lines[5].split()[:2] == ["4", "2"]


def test_gan_table_layout():
    rows = [
        {"gan_type": t, "psnr_db": 20.0 + i, "ssim": 0.8}
        for i, t in enumerate(("vanilla", "lsgan", "wgan", "wgan_softplus", "hinge"))
    ]
    table = format_gan_table(rows)
    lines = table.splitlines()
    assert lines[0].split() == ["gan_type", "psnr_db", "ssim"]
    assert len(lines) == 7  # header, rule, five variants
    assert lines[2].startswith("vanilla")
    assert lines[6].startswith("hinge")


def test_block_configs_cover_the_grid():
    assert BLOCK_CONFIGS == ((2, 3), (2, 4), (3, 2), (4, 2))
