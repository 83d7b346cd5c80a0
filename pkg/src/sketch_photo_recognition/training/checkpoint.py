"""
Training checkpoints.

A checkpoint bundles the model file payload with both optimizer states, the
training step and the number of completed epochs. Data order and crops are
functions of (seed, epoch), so these suffice to continue a step exactly.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import torch

from ..config.settings import AppConfig
from ..networks.model import BidirectionalSynthesisNetwork
from ..networks.serialization import model_from_payload, model_payload, read_payload
from ..utils.exception_handler import CheckpointError


@dataclass
class Checkpoint:
    model: BidirectionalSynthesisNetwork
    step: int
    epoch: int
    iteration: int = 0
    optimizer_g: Optional[Dict[str, Any]] = None
    optimizer_d: Optional[Dict[str, Any]] = None
    rng_state: Optional[torch.Tensor] = None
    path: Optional[Path] = field(default=None, compare=False)

    @property
    def config(self) -> AppConfig:
        return self.model.config

    @property
    def is_complete(self) -> bool:
        return self.epoch >= self.config.train.for_step(self.step).epochs

    def metadata(self) -> Dict[str, Any]:
        return {
            "training step": self.step,
            "epochs completed": self.epoch,
            "iterations": self.iteration,
            "identities (AdaCos)": self.model.adacos.n_classes,
            "AdaCos scale": f"{float(self.model.adacos.scale):.6f}",
            "synthesis": self.config.model.synthesis,
        }

    def save(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        torch.save({
            "model": model_payload(self.model),
            "step": self.step,
            "epoch": self.epoch,
            "iteration": self.iteration,
            "optimizer_g": self.optimizer_g,
            "optimizer_d": self.optimizer_d,
            "rng_state": self.rng_state,
        }, path)
        self.path = path
        return path

    @classmethod
    def load(cls, path: Path) -> "Checkpoint":
        path = Path(path)
        payload = read_payload(path)
        for key in ("model", "step", "epoch"):
            if key not in payload:
                raise CheckpointError(path, f"missing field '{key}'")
        return cls(
            model=model_from_payload(payload["model"], path),
            step=int(payload["step"]),
            epoch=int(payload["epoch"]),
            iteration=int(payload.get("iteration", 0)),
            optimizer_g=payload.get("optimizer_g"),
            optimizer_d=payload.get("optimizer_d"),
            rng_state=payload.get("rng_state"),
            path=path,
        )
