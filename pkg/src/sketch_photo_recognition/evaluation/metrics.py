from typing import List, Sequence, Tuple

import numpy as np

from ..utils.exception_handler import ConfigError, GalleryError
from ..utils.logging_utils import WorkflowLogger
from .matching import MatchResult


def mate_ranks(results: Sequence[MatchResult]) -> Tuple[List[int], int]:
    """1-based mate ranks of mated probes, and the number of probes without a mate."""
    ranks = [r.mate_rank for r in results]
    mated = [rank for rank in ranks if rank is not None]
    return mated, len(ranks) - len(mated)


def _mated_ranks(results: Sequence[MatchResult]) -> List[int]:
    if not results:
        raise GalleryError("No match results to score")
    ranks, unmated = mate_ranks(results)
    if unmated:
        WorkflowLogger.print_warning(f"{unmated} probe(s) have no mate in the gallery and are excluded")
    if not ranks:
        raise GalleryError("No probe has a mate in the gallery")
    return ranks


def rank_k_accuracy(results: Sequence[MatchResult], k: int) -> float:
    """Fraction of mated probes whose mate is within the first k ranks (k clamped to the gallery size)."""
    if k < 1:
        raise ConfigError(f"Rank k must be at least 1, got {k}")
    ranks = _mated_ranks(results)
    k = min(k, len(results[0].ranking))
    return sum(rank <= k for rank in ranks) / len(ranks)


def cmc_curve(results: Sequence[MatchResult]) -> np.ndarray:
    """Cumulative match characteristic; entry k−1 is the rank-k accuracy."""
    ranks = _mated_ranks(results)
    gallery_size = len(results[0].ranking)
    counts = np.bincount(np.asarray(ranks) - 1, minlength=gallery_size)
    return np.cumsum(counts) / len(ranks)
