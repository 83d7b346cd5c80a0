"""
Node functions for the training pipeline graph
"""
from .training_nodes import route_next_step, router_node, step1_node, step2_node, step3_node

__all__ = ['route_next_step', 'router_node', 'step1_node', 'step2_node', 'step3_node']
