from typing import Dict, Iterable, Optional

from langgraph.graph import END, START, StateGraph

from .config.settings import AppConfig
from .data.manifest import Manifest
from .nodes.training_nodes import route_next_step, router_node, step1_node, step2_node, step3_node
from .state import PipelineState
from .training.checkpoint import Checkpoint
from .utils.exception_handler import ConfigError
from .utils.logging_utils import WorkflowLogger


def create_graph():
    """Create the three-step training graph."""
    workflow = StateGraph(PipelineState)

    workflow.add_node("router", router_node)
    workflow.add_node("step1", step1_node)
    workflow.add_node("step2", step2_node)
    workflow.add_node("step3", step3_node)

    workflow.add_edge(START, "router")
    workflow.add_conditional_edges(
        "router",
        route_next_step,
        {
            "step1": "step1",
            "step2": "step2",
            "step3": "step3",
            "end": END,
        },
    )

    # Every step returns to the router for the next decision
    for node in ("step1", "step2", "step3"):
        workflow.add_edge(node, "router")

    return workflow.compile()


def parse_steps(steps: Iterable[int]) -> list:
    requested = sorted(set(int(s) for s in steps))
    if not requested or any(s not in (1, 2, 3) for s in requested):
        raise ConfigError(f"Steps must be a nonempty subset of 1, 2, 3; got {list(steps)}")
    return requested


def train_pipeline(config: AppConfig, steps: Iterable[int] = (1, 2, 3), resume: Optional[Checkpoint] = None,
                   manifests: Optional[Dict[int, Manifest]] = None,
                   output_dir: Optional[str] = None) -> Checkpoint:
    """Run the requested training steps in order and return the final checkpoint.

    ``resume`` is either an incomplete checkpoint of the first requested step
    or a completed checkpoint of an earlier step to start from.
    """
    requested = parse_steps(steps)
    WorkflowLogger.print_graph_architecture()
    final_state = graph.invoke({
        "config": config,
        "requested_steps": requested,
        "completed_steps": [],
        "checkpoint": resume,
        "manifests": manifests or {},
        "output_dir": str(output_dir) if output_dir else None,
    })
    return final_state["checkpoint"]


# Export the compiled graph for LangGraph Studio
graph = create_graph()
