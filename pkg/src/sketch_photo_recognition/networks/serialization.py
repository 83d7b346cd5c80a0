"""
Model file format.

A model file is a ``torch.save`` dictionary holding a format version, the
config that built the model, its state dict and per-tensor metadata
(shape, dtype, byte order of the writer). Loading rebuilds the network from
the stored config, so a model file is self-describing.
"""

import sys
from pathlib import Path
from typing import Any, Dict, Optional

import torch

from ..config.settings import AppConfig, ConfigLoader
from ..utils.exception_handler import CheckpointError
from .model import BidirectionalSynthesisNetwork

FORMAT_VERSION = 1


def tensor_metadata(state_dict: Dict[str, torch.Tensor]) -> Dict[str, Dict[str, Any]]:
    return {
        name: {"shape": list(t.shape), "dtype": str(t.dtype).replace("torch.", ""), "byteorder": sys.byteorder}
        for name, t in state_dict.items()
    }


def model_payload(model: BidirectionalSynthesisNetwork) -> Dict[str, Any]:
    state = {name: t.detach().cpu().clone() for name, t in model.state_dict().items()}
    return {
        "format_version": FORMAT_VERSION,
        "config": ConfigLoader.dump(model.config),
        "n_classes": model.adacos.n_classes,
        "state_dict": state,
        "tensor_meta": tensor_metadata(state),
    }


def model_from_payload(payload: Dict[str, Any], path: Optional[Path] = None) -> BidirectionalSynthesisNetwork:
    """Rebuild a network from a payload, reporting any missing or malformed tensors."""
    for key in ("format_version", "config", "n_classes", "state_dict"):
        if key not in payload:
            raise CheckpointError(path, f"missing field '{key}'")
    if payload["format_version"] != FORMAT_VERSION:
        raise CheckpointError(path, f"unsupported format version {payload['format_version']}")

    config: AppConfig = ConfigLoader.validate(payload["config"])
    model = BidirectionalSynthesisNetwork(config, int(payload["n_classes"]))
    expected = model.state_dict()
    stored = payload["state_dict"]

    missing = sorted(set(expected) - set(stored))
    if missing:
        raise CheckpointError(path, "tensors missing", missing=missing)
    for name, tensor in expected.items():
        if tuple(stored[name].shape) != tuple(tensor.shape):
            raise CheckpointError(
                path, f"tensor '{name}' has shape {tuple(stored[name].shape)}, expected {tuple(tensor.shape)}"
            )
    model.load_state_dict({name: stored[name] for name in expected})
    return model


def save_model(model: BidirectionalSynthesisNetwork, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    torch.save(model_payload(model), path)
    return path


def read_payload(path: Path) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(path, "file does not exist")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise CheckpointError(path, f"unreadable ({e})") from e
    if not isinstance(payload, dict):
        raise CheckpointError(path, "not a checkpoint dictionary")
    return payload


def load_model(path: Path) -> BidirectionalSynthesisNetwork:
    payload = read_payload(path)
    return model_from_payload(payload.get("model", payload), Path(path))
