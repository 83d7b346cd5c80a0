"""
Three-step training, checkpoints and loss logs

The step sequencing itself lives in the pipeline graph (``graph.train_pipeline``).
"""
from .checkpoint import Checkpoint
from .loss_log import LOSS_LOG_COLUMNS, LossLog, read_loss_log
from .trainer import StepTrainer, frozen, train_step1, train_step2, train_step3

__all__ = [
    'Checkpoint',
    'LOSS_LOG_COLUMNS',
    'LossLog',
    'read_loss_log',
    'StepTrainer',
    'frozen',
    'train_step1',
    'train_step2',
    'train_step3',
]
