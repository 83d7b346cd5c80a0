"""
Append-only CSV of per-batch loss values.
"""

import csv
from pathlib import Path
from typing import Dict, List, Mapping

LOSS_LOG_COLUMNS = ["step", "L_total", "L_adacos", "L_gan", "L_s", "L_w", "adacos_scale"]

# LossComponents field → CSV column
_COMPONENT_COLUMNS = {
    "adacos": "L_adacos",
    "gan": "L_gan",
    "similarity": "L_s",
    "collaborative": "L_w",
}


def _format(value: float) -> str:
    return f"{value:.10g}"


class LossLog:
    """One row per optimizer step; ``step`` is the running batch index of the training step."""

    def __init__(self, path: Path, append: bool = False):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        if not append or not self.path.exists():
            with self.path.open("w", newline="", encoding="utf-8") as handle:
                csv.writer(handle, lineterminator="\n").writerow(LOSS_LOG_COLUMNS)

    def append(self, step: int, total: float, components: Mapping[str, float], scale: float) -> None:
        row = {"step": str(step), "L_total": _format(total), "adacos_scale": _format(scale)}
        for name, column in _COMPONENT_COLUMNS.items():
            row[column] = _format(components.get(name, 0.0))
        with self.path.open("a", newline="", encoding="utf-8") as handle:
            csv.DictWriter(handle, fieldnames=LOSS_LOG_COLUMNS, lineterminator="\n").writerow(row)


def read_loss_log(path: Path) -> List[Dict[str, float]]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        return [{key: float(value) for key, value in row.items()} for row in csv.DictReader(handle)]
