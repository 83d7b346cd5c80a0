"""
Report export: CMC table as CSV and a fixed-width summary block.
"""

import csv
from pathlib import Path
from typing import Any, Dict, Sequence, Tuple

from .protocol import EvalReport

SUMMARY_RANKS = (1, 10, 50)


def _cmc_rows(report: EvalReport):
    matrix = report.cmc_matrix
    means = matrix.mean(axis=0)
    stds = matrix.std(axis=0)
    for k in range(matrix.shape[1]):
        yield [str(k + 1)] + [f"{v:.6f}" for v in matrix[:, k]] + [f"{means[k]:.6f}", f"{stds[k]:.6f}"]


def summary_text(report: EvalReport) -> str:
    """Rank-{1,10,50} accuracies (%) per partition with mean and std; ranks beyond the gallery are clamped."""
    n = len(report.partitions)
    matrix = report.cmc_matrix
    header = f"{'rank':>6}" + "".join(f"{f'part{i + 1}':>9}" for i in range(n)) + f"{'mean':>9}{'std':>9}"
    lines = [
        "Cross-modal identification accuracy (%)",
        f"partitions {n}, gallery size {report.gallery_size}, distractors {report.n_distractors}, "
        f"unmated probes {report.n_unmated}",
        header,
        "-" * len(header),
    ]
    for k in SUMMARY_RANKS:
        column = matrix[:, min(k, matrix.shape[1]) - 1] * 100
        lines.append(
            f"{k:>6}" + "".join(f"{v:>9.2f}" for v in column) + f"{column.mean():>9.2f}{column.std():>9.2f}"
        )
    lines.extend(f"note: {note}" for note in report.notes)
    return "\n".join(lines) + "\n"


def export_report(report: EvalReport, path: Path) -> Tuple[Path, Path]:
    """Write ``cmc.csv`` and ``summary.txt`` into directory ``path``."""
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    csv_path = path / "cmc.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["k"] + [f"part{i + 1}" for i in range(len(report.partitions))] + ["mean", "std"])
        writer.writerows(_cmc_rows(report))
    summary_path = path / "summary.txt"
    summary_path.write_text(summary_text(report), encoding="utf-8")
    return csv_path, summary_path


def write_sweep_csv(rows: Sequence[Tuple[Any, EvalReport]], ranks: Sequence[int], path: Path) -> Path:
    """One row per swept value with the mean and std of each rank."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["value"] + [f"rank{k}_{stat}" for k in ranks for stat in ("mean", "std")])
        for value, report in rows:
            writer.writerow([value] + [f"{getattr(report, stat)(k):.6f}" for k in ranks for stat in ("mean", "std")])
    return path


def report_means(report: EvalReport) -> Dict[int, float]:
    return {k: report.mean(k) for k in report.ranks}
