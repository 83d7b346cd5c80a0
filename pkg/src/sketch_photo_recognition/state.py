from typing import Dict, List, Optional, TypedDict

from .config.settings import AppConfig
from .data.manifest import Manifest
from .training.checkpoint import Checkpoint


class PipelineState(TypedDict, total=False):
    """State for the three-step training graph"""
    config: AppConfig
    # steps to run, ascending
    requested_steps: List[int]
    completed_steps: List[int]
    # latest checkpoint; a resume checkpoint on entry
    checkpoint: Optional[Checkpoint]
    # step → manifest, for callers that supply datasets directly
    manifests: Dict[int, Manifest]
    output_dir: Optional[str]
    next_step: Optional[int]
