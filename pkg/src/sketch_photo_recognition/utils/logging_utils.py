"""
Logging and Display Utilities for the sketch-photo recognition pipeline

This module provides formatted console output so that presentation logic
stays out of the data, training and evaluation code.
"""

from typing import Any, Dict, Iterable, Mapping, Optional, Sequence

import yaml
from rich.console import Console
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

# Initialize console with fixed width
console = Console(width=120, highlight=False)


class WorkflowLogger:
    """Centralized logging for data generation, training and evaluation."""

    @staticmethod
    def print_header(title: str, subtitle: str = None):
        """Print a formatted header for a command."""
        console.print("=" * 60)
        console.print(f"🎨 {title}")
        if subtitle:
            console.print(subtitle)
        console.print("=" * 60)

    @staticmethod
    def print_section(title: str, width: int = 80):
        """Print a section separator."""
        console.print("\n" + "=" * width)
        console.print(title)
        console.print("=" * width)

    @staticmethod
    def print_subsection(title: str, width: int = 50):
        """Print a subsection separator."""
        console.print("\n" + "-" * width)
        console.print(title)
        console.print("-" * width)

    @staticmethod
    def print_step(step_num: int, description: str):
        """Print a training step banner."""
        console.print(f"\n{step_num}. {description}")

    @staticmethod
    def print_success(message: str):
        console.print(f"✅ {message}")

    @staticmethod
    def print_warning(message: str):
        console.print(f"⚠️ {message}")

    @staticmethod
    def print_error(message: str):
        console.print(f"❌ {message}")

    @staticmethod
    def print_info(message: str):
        console.print(f"ℹ️ {message}")

    @staticmethod
    def print_config(config: Mapping[str, Any], title: str = "EFFECTIVE CONFIG"):
        """Echo the effective configuration so every run is self-describing."""
        WorkflowLogger.print_subsection(f"⚙️ {title}:")
        console.print(yaml.safe_dump(dict(config), sort_keys=False).rstrip())

    @staticmethod
    def print_epoch(step: int, epoch: int, epochs: int, losses: Mapping[str, float]):
        """Print one epoch summary line."""
        parts = " | ".join(f"{name} {value:.4f}" for name, value in losses.items())
        console.print(f"   📉 step {step} epoch {epoch + 1}/{epochs}: {parts}")

    @staticmethod
    def print_checkpoint_saved(path: str, step: int, epoch: int):
        console.print(f"💾 Checkpoint for step {step} (epoch {epoch}) written to {path}")

    @staticmethod
    def print_checkpoint_table(metadata: Mapping[str, Any], shapes: Mapping[str, Sequence[int]]):
        """Print checkpoint metadata and tensor shapes."""
        WorkflowLogger.print_subsection("🔍 CHECKPOINT METADATA:")
        for key, value in metadata.items():
            console.print(f"   • {key}: {value}")

        table = Table(title="Parameter tensors")
        table.add_column("name")
        table.add_column("shape", justify="right")
        for name, shape in shapes.items():
            table.add_row(name, "×".join(str(d) for d in shape) or "scalar")
        console.print(table)

    @staticmethod
    def print_rank_table(ranks: Iterable[int], means: Mapping[int, float], stds: Mapping[int, float],
                         title: str = "Cross-modal identification"):
        """Print rank-k mean/std accuracies."""
        table = Table(title=title)
        table.add_column("rank", justify="right")
        table.add_column("mean (%)", justify="right")
        table.add_column("std (%)", justify="right")
        for k in ranks:
            table.add_row(str(k), f"{100 * means[k]:.2f}", f"{100 * stds[k]:.2f}")
        console.print(table)

    @staticmethod
    def print_sweep_row(param: str, value: Any, rank_means: Mapping[int, float]):
        parts = ", ".join(f"rank-{k} {100 * v:.2f}%" for k, v in rank_means.items())
        console.print(f"   🔁 {param}={value}: {parts}")

    @staticmethod
    def print_routing_decision(completed: Sequence[int], next_step: Optional[int]):
        """Print the pipeline router's decision."""
        console.print("\n🔄 ROUTING DECISION:")
        console.print(f"   Completed steps: {list(completed) or 'none'}")
        if next_step is None:
            console.print("   🏁 Routing to END: pipeline complete")
        else:
            console.print(f"   ✅ Routing to step {next_step}")

    @staticmethod
    def print_graph_architecture():
        """Print the training pipeline diagram."""
        WorkflowLogger.print_subsection("🏗️ TRAINING PIPELINE:")
        console.print("START → Router → step 1 (paired synthesis, no AdaCos)")
        console.print("          ↓")
        console.print("        step 2 (mapping + AdaCos on photos)")
        console.print("          ↓")
        console.print("        step 3 (full joint loss on target pairs) → END")
        console.print("=" * 50)

    @staticmethod
    def print_summary(values: Dict[str, Any]):
        for key, value in values.items():
            console.print(f"   • {key}: {value}")


class ProgressTracker:
    """Progress tracking utilities."""

    @staticmethod
    def create_spinner(description: str):
        """Create a progress spinner."""
        return Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            console=console,
        )

    @staticmethod
    def create_epoch_bar():
        """Create a bar for epoch loops."""
        return Progress(
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TextColumn("{task.completed}/{task.total}"),
            TimeElapsedColumn(),
            console=console,
            transient=True,
        )
