"""
Training Node Definitions

Individual node functions for the LangGraph training pipeline. Each step
node loads its manifest, picks up the checkpoint left by the previous node
and returns the new one.
"""

from pathlib import Path
from typing import Callable, Dict, Optional

from ..config.settings import AppConfig
from ..data.manifest import Manifest, load_manifest
from ..training.checkpoint import Checkpoint
from ..training.trainer import train_step1, train_step2, train_step3
from ..utils.exception_handler import ConfigError
from ..utils.logging_utils import WorkflowLogger

# step → DataConfig field naming its manifest
MANIFEST_FIELDS = {1: "paired_manifest", 2: "photo_manifest", 3: "target_manifest"}


def resolve_manifest(config: AppConfig, step: int, supplied: Optional[Dict[int, Manifest]] = None) -> Manifest:
    """Manifest for ``step``: supplied directly, else loaded from the config path."""
    if supplied and step in supplied:
        return supplied[step]
    field = MANIFEST_FIELDS[step]
    path = getattr(config.data, field)
    if not path:
        raise ConfigError(f"Step {step} needs data.{field} to be set")
    return load_manifest(path)


def _output_dir(state) -> Optional[Path]:
    output_dir = state.get("output_dir")
    return Path(output_dir) if output_dir else None


def _completed(state, step: int, checkpoint: Checkpoint):
    return {
        "checkpoint": checkpoint,
        "completed_steps": list(state.get("completed_steps", [])) + [step],
    }


def _run_step_node(state, step: int, train: Callable[..., Checkpoint]):
    config: AppConfig = state["config"]
    previous: Optional[Checkpoint] = state.get("checkpoint")

    resume = checkpoint_in = None
    if previous is not None and previous.step == step:
        if previous.is_complete:
            WorkflowLogger.print_info(f"Step {step} already complete in the supplied checkpoint; skipping")
            return _completed(state, step, previous)
        resume = previous
    elif previous is not None and previous.step > step:
        raise ConfigError(f"Cannot run step {step} after a step-{previous.step} checkpoint")
    else:
        checkpoint_in = previous

    manifest = resolve_manifest(config, step, state.get("manifests"))
    kwargs = {"resume": resume, "output_dir": _output_dir(state)}
    if step != 1:
        kwargs["checkpoint_in"] = checkpoint_in
    checkpoint = train(config, manifest, **kwargs)
    WorkflowLogger.print_success(f"Step {step} complete after {checkpoint.epoch} epochs")
    return _completed(state, step, checkpoint)


def step1_node(state):
    """Paired synthesis pre-training."""
    return _run_step_node(state, 1, train_step1)


def step2_node(state):
    """Photo-only AdaCos pre-training of the mapping network."""
    return _run_step_node(state, 2, train_step2)


def step3_node(state):
    """Full joint training on the target pairs."""
    return _run_step_node(state, 3, train_step3)


def router_node(state):
    """Pick the next requested step that has not run yet."""
    completed = state.get("completed_steps", [])
    remaining = [s for s in state.get("requested_steps", []) if s not in completed]
    next_step = remaining[0] if remaining else None
    WorkflowLogger.print_routing_decision(completed, next_step)
    return {"next_step": next_step}


def route_next_step(state) -> str:
    next_step = state.get("next_step")
    return f"step{next_step}" if next_step is not None else "end"
