"""
Cross-modal identification: galleries, matching, metrics and the partition protocol
"""
from .matching import (
    DISTRACTOR_PREFIX,
    GalleryIndex,
    MatchResult,
    build_gallery,
    cosine_distances,
    encode_records,
    match_code,
    match_probe,
)
from .metrics import cmc_curve, mate_ranks, rank_k_accuracy
from .protocol import (
    EvalReport,
    PartitionResult,
    cross_partition_eval,
    evaluate_model,
    fixed_model_factory,
    partition_steps,
    pipeline_model_factory,
    split_identities,
)
from .report import export_report, report_means, summary_text, write_sweep_csv

__all__ = [
    'DISTRACTOR_PREFIX',
    'GalleryIndex',
    'MatchResult',
    'build_gallery',
    'cosine_distances',
    'encode_records',
    'match_code',
    'match_probe',
    'cmc_curve',
    'mate_ranks',
    'rank_k_accuracy',
    'EvalReport',
    'PartitionResult',
    'cross_partition_eval',
    'evaluate_model',
    'fixed_model_factory',
    'partition_steps',
    'pipeline_model_factory',
    'split_identities',
    'export_report',
    'report_means',
    'summary_text',
    'write_sweep_csv',
]
