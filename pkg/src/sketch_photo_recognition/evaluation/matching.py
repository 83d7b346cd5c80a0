"""
Gallery construction and probe matching in the latent space.

Codes are compared raw by cosine distance ``1 − cos``, so rescaling a code
never changes a ranking. Ties keep gallery insertion order.
"""

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch

from ..data.datasets import AlignedImageCache, RecordImageDataset, make_loader
from ..data.manifest import Manifest, SampleRecord, relabel
from ..networks.model import BidirectionalSynthesisNetwork
from ..utils.exception_handler import GalleryError, NumericError

DISTRACTOR_PREFIX = "distractor-"


@dataclass
class GalleryIndex:
    """Photo codes: mates first, then distractors with unique synthetic identities."""
    identities: List[str]
    codes: np.ndarray
    n_mates: int

    def __len__(self) -> int:
        return len(self.identities)

    @property
    def n_distractors(self) -> int:
        return len(self.identities) - self.n_mates

    @property
    def mate_identities(self) -> List[str]:
        return self.identities[:self.n_mates]


@dataclass
class MatchResult:
    probe_identity: Optional[str]
    # (gallery identity, cosine distance), ascending distance
    ranking: List[Tuple[str, float]] = field(default_factory=list)

    def rank_of(self, identity: Optional[str] = None) -> Optional[int]:
        """1-based position of ``identity`` (default: the probe's), or None when absent."""
        identity = self.probe_identity if identity is None else identity
        for position, (gallery_identity, _) in enumerate(self.ranking, 1):
            if gallery_identity == identity:
                return position
        return None

    @property
    def mate_rank(self) -> Optional[int]:
        return self.rank_of()


@torch.no_grad()
def encode_records(records: Sequence[SampleRecord], model: BidirectionalSynthesisNetwork,
                   batch_size: int = 64, cache: Optional[AlignedImageCache] = None) -> np.ndarray:
    """Latent codes (float64, one row per record) from center-cropped aligned images."""
    if not records:
        return np.zeros((0, model.config.model.latent_dim))
    model.eval()
    dataset = RecordImageDataset(records, model.config.data, train=False,
                                 class_index={r.identity: 0 for r in records}, cache=cache)
    codes = [model.encode(images).double().numpy()
             for images, _ in make_loader(dataset, batch_size, seed=0, epoch=0, shuffle=False)]
    return np.concatenate(codes)


def build_gallery(photos: Manifest, model: BidirectionalSynthesisNetwork,
                  distractors: Optional[Manifest] = None,
                  cache: Optional[AlignedImageCache] = None) -> GalleryIndex:
    """Encode one mate photo per identity plus optional distractor photos."""
    mates = photos.photos()
    identities = [r.identity for r in mates]
    seen = set()
    for identity in identities:
        if identity in seen:
            raise GalleryError(f"Identity '{identity}' has more than one gallery mate")
        seen.add(identity)

    distractor_records = []
    if distractors is not None:
        for i, record in enumerate(distractors.photos()):
            if record.identity in seen:
                raise GalleryError(f"Distractor photo {record.image_path} belongs to mate identity '{record.identity}'")
            distractor_records.append(relabel(record, f"{DISTRACTOR_PREFIX}{i:05d}"))

    records = mates + distractor_records
    codes = encode_records(records, model, cache=cache)
    return GalleryIndex(identities=[r.identity for r in records], codes=codes, n_mates=len(mates))


def cosine_distances(code: np.ndarray, gallery_codes: np.ndarray) -> np.ndarray:
    code = np.asarray(code, dtype=np.float64)
    norm = np.linalg.norm(code)
    if norm == 0 or not np.isfinite(norm):
        raise NumericError("Probe code has zero or non-finite norm")
    gallery_norms = np.linalg.norm(gallery_codes, axis=1)
    if np.any(gallery_norms == 0):
        raise NumericError("Gallery contains a zero-norm code")
    return 1.0 - (gallery_codes @ code) / (gallery_norms * norm)


def match_code(code: np.ndarray, gallery: GalleryIndex, probe_identity: Optional[str] = None) -> MatchResult:
    if len(gallery) == 0:
        raise GalleryError("Cannot match against an empty gallery")
    distances = cosine_distances(code, gallery.codes)
    order = np.argsort(distances, kind="stable")
    return MatchResult(
        probe_identity=probe_identity,
        ranking=[(gallery.identities[i], float(distances[i])) for i in order],
    )


@torch.no_grad()
def match_probe(sketch: torch.Tensor, gallery: GalleryIndex, model: BidirectionalSynthesisNetwork,
                probe_identity: Optional[str] = None) -> MatchResult:
    """Encode one aligned ``C×H×W`` sketch and rank the gallery against it."""
    model.eval()
    code = model.encode(sketch.unsqueeze(0))[0].double().numpy()
    return match_code(code, gallery, probe_identity)
