"""
Cross-partition identification protocol.

Each partition splits the target identities at random into train and test
sets, builds a model from the train identities and scores the test sketches
against a gallery of one photo per test identity, optionally extended with
distractor photos.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..config.settings import AppConfig, ConfigLoader
from ..data.datasets import AlignedImageCache
from ..data.manifest import Manifest
from ..networks.model import BidirectionalSynthesisNetwork
from ..training.checkpoint import Checkpoint
from ..utils.exception_handler import ConfigError
from ..utils.logging_utils import WorkflowLogger
from .matching import build_gallery, encode_records, match_code
from .metrics import cmc_curve, mate_ranks, rank_k_accuracy

ModelFactory = Callable[[Manifest, int], BidirectionalSynthesisNetwork]


@dataclass
class PartitionResult:
    index: int
    train_identities: List[str]
    test_identities: List[str]
    rank_accuracy: Dict[int, float]
    cmc: np.ndarray
    gallery_size: int
    n_distractors: int
    n_probes: int
    n_unmated: int


@dataclass
class EvalReport:
    ranks: List[int]
    partitions: List[PartitionResult]
    config: Dict[str, Any] = field(default_factory=dict)
    notes: List[str] = field(default_factory=list)

    @property
    def gallery_size(self) -> int:
        return self.partitions[0].gallery_size

    @property
    def n_distractors(self) -> int:
        return self.partitions[0].n_distractors

    @property
    def n_unmated(self) -> int:
        return sum(p.n_unmated for p in self.partitions)

    @property
    def cmc_matrix(self) -> np.ndarray:
        """Partitions × gallery size."""
        return np.stack([p.cmc for p in self.partitions])

    def rank_values(self, k: int) -> np.ndarray:
        return np.array([p.rank_accuracy[k] for p in self.partitions])

    def mean(self, k: int) -> float:
        return float(self.rank_values(k).mean())

    def std(self, k: int) -> float:
        """Population standard deviation across partitions."""
        return float(self.rank_values(k).std())


def split_identities(identities: Sequence[str], train_count: int, test_count: int, seed: int,
                     partition: int) -> Tuple[List[str], List[str]]:
    """Deterministic disjoint train/test identity split for one partition."""
    identities = sorted(identities)
    if train_count + test_count > len(identities):
        raise ConfigError(
            f"Split {train_count}+{test_count} needs more identities than the {len(identities)} available"
        )
    order = np.random.default_rng([seed, partition]).permutation(len(identities))
    train = sorted(identities[i] for i in order[:train_count])
    test = sorted(identities[i] for i in order[train_count:train_count + test_count])
    return train, test


def evaluate_model(model: BidirectionalSynthesisNetwork, test_manifest: Manifest, ranks: Sequence[int],
                   distractors: Optional[Manifest] = None, index: int = 0,
                   train_identities: Sequence[str] = (), cache: Optional[AlignedImageCache] = None) -> PartitionResult:
    """Score every test sketch against the test mates (plus distractors)."""
    gallery = build_gallery(test_manifest.first_photos(), model, distractors, cache=cache)
    probes = test_manifest.sketches()
    codes = encode_records(probes, model, cache=cache)
    results = [match_code(code, gallery, record.identity) for code, record in zip(codes, probes)]
    _, unmated = mate_ranks(results)
    return PartitionResult(
        index=index,
        train_identities=list(train_identities),
        test_identities=test_manifest.identities,
        rank_accuracy={k: rank_k_accuracy(results, k) for k in ranks},
        cmc=cmc_curve(results),
        gallery_size=len(gallery),
        n_distractors=gallery.n_distractors,
        n_probes=len(probes),
        n_unmated=unmated,
    )


def cross_partition_eval(dataset: Manifest, model_factory: ModelFactory, n_partitions: int,
                         split: Tuple[int, int], seed: int, ranks: Sequence[int] = (1, 10, 50),
                         distractors: Optional[Manifest] = None,
                         config: Optional[AppConfig] = None, notes: Sequence[str] = ()) -> EvalReport:
    """Average identification accuracy over random identity partitions."""
    if n_partitions < 1:
        raise ConfigError(f"Need at least one partition, got {n_partitions}")
    train_count, test_count = split
    identities = dataset.identities
    # raises before any training when the split cannot be drawn
    split_identities(identities, train_count, test_count, seed, 0)

    partitions = []
    for p in range(n_partitions):
        WorkflowLogger.print_subsection(f"🧪 PARTITION {p + 1}/{n_partitions}")
        train_ids, test_ids = split_identities(identities, train_count, test_count, seed, p)
        model = model_factory(dataset.subset(train_ids), p)
        result = evaluate_model(model, dataset.subset(test_ids), ranks, distractors, index=p,
                                train_identities=train_ids, cache=AlignedImageCache(model.config.data))
        WorkflowLogger.print_summary({f"rank-{k}": f"{100 * v:.2f}%" for k, v in result.rank_accuracy.items()})
        partitions.append(result)

    return EvalReport(
        ranks=list(ranks),
        partitions=partitions,
        config=ConfigLoader.dump(config) if config is not None else {},
        notes=list(notes),
    )


def partition_steps(config: AppConfig, step2_checkpoint: Optional[Checkpoint] = None) -> List[int]:
    """Training steps each partition runs, from ``eval.steps``.

    The mapping-only variant has nothing for step 1 to train, so step 1 is
    dropped. Steps already covered by a supplied checkpoint are dropped too.
    """
    steps = list(config.eval.steps)
    if config.model.synthesis == "none" and 1 in steps:
        WorkflowLogger.print_info("model.synthesis=none: step 1 dropped from the partition pipeline")
        steps.remove(1)
    if step2_checkpoint is not None:
        steps = [s for s in steps if s > step2_checkpoint.step]
    if 3 not in steps:
        raise ConfigError(f"Partition training must end with step 3; eval.steps gives {steps or 'nothing'}")
    return steps


def pipeline_model_factory(config: AppConfig, step2_checkpoint: Optional[Checkpoint] = None,
                           output_dir: Optional[Path] = None) -> ModelFactory:
    """Train a model per partition.

    With a step-2 checkpoint only step 3 runs on the partition's train
    identities. Otherwise the steps of ``eval.steps`` run, with step 1 on
    ``data.paired_manifest`` when set and on the partition otherwise; a
    missing step 1 or 2 gives the reduced training-scheme variants.
    """
    from ..graph import train_pipeline

    steps = partition_steps(config, step2_checkpoint)

    def factory(train_manifest: Manifest, partition: int) -> BidirectionalSynthesisNetwork:
        part_dir = Path(output_dir) / f"partition{partition + 1}" if output_dir else None
        manifests = {3: train_manifest}
        if 1 in steps and not config.data.paired_manifest:
            manifests[1] = train_manifest
        checkpoint = train_pipeline(config, steps=steps, resume=step2_checkpoint, manifests=manifests,
                                    output_dir=part_dir)
        return checkpoint.model

    return factory


def fixed_model_factory(model: BidirectionalSynthesisNetwork) -> ModelFactory:
    """Evaluate an already trained model on every partition.

    The partition's train identities are ignored, so the target set must be
    disjoint from whatever the model was trained on.
    """
    def factory(train_manifest: Manifest, partition: int) -> BidirectionalSynthesisNetwork:
        return model
    return factory
