"""
Manifest ingestion

A manifest is a tab-separated text file with one image per line::

    identity<TAB>modality<TAB>relative_path<TAB>lx,ly<TAB>rx,ry

Lines starting with ``#`` are comments. Paths are relative to the manifest's
directory.
"""

from collections import OrderedDict
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from ..utils.exception_handler import DataError, ManifestError, PairingError
from ..utils.logging_utils import WorkflowLogger

Point = Tuple[float, float]


class Modality(str, Enum):
    PHOTO = "photo"
    SKETCH = "sketch"


@dataclass(frozen=True)
class SampleRecord:
    """One identity-labeled, modality-tagged image with its eye landmarks."""
    identity: str
    modality: Modality
    image_path: str
    left_eye: Point
    right_eye: Point
    root: str = ""

    def __post_init__(self):
        if not self.identity:
            raise DataError("SampleRecord identity must be nonempty")
        # the left-most eye in image coordinates comes first
        if self.left_eye[0] > self.right_eye[0]:
            left, right = self.right_eye, self.left_eye
            object.__setattr__(self, "left_eye", left)
            object.__setattr__(self, "right_eye", right)

    @property
    def resolved_path(self) -> Path:
        return Path(self.root) / self.image_path


Pair = Tuple[SampleRecord, SampleRecord]


@dataclass
class Manifest:
    """Records plus the identity → (photo, sketch) pairing.

    Photo-only manifests have an empty pairing. In paired manifests every
    identity owns the same number of photo and sketch records; the i-th
    photo pairs with the i-th sketch.
    """
    records: List[SampleRecord]
    pairing: Dict[str, List[Pair]] = field(default_factory=dict)
    path: Optional[str] = None

    @property
    def is_paired(self) -> bool:
        return bool(self.pairing)

    @property
    def identities(self) -> List[str]:
        return sorted({r.identity for r in self.records})

    def class_index(self) -> Dict[str, int]:
        return {identity: i for i, identity in enumerate(self.identities)}

    def photos(self) -> List[SampleRecord]:
        return [r for r in self.records if r.modality == Modality.PHOTO]

    def sketches(self) -> List[SampleRecord]:
        return [r for r in self.records if r.modality == Modality.SKETCH]

    def pairs(self) -> List[Pair]:
        return [pair for identity in sorted(self.pairing) for pair in self.pairing[identity]]

    def first_photos(self) -> "Manifest":
        """One photo per identity (the first listed), as gallery mates."""
        seen = set()
        records = []
        for record in self.photos():
            if record.identity not in seen:
                seen.add(record.identity)
                records.append(record)
        return Manifest(records=records, path=self.path)

    def subset(self, identities: Iterable[str]) -> "Manifest":
        keep = set(identities)
        records = [r for r in self.records if r.identity in keep]
        pairing = {i: list(p) for i, p in self.pairing.items() if i in keep}
        return Manifest(records=records, pairing=pairing, path=self.path)


def _parse_point(text: str, path: str, line_number: int) -> Point:
    parts = text.split(",")
    if len(parts) != 2:
        raise ManifestError(path, line_number, f"eye coordinate '{text}' is not 'x,y'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise ManifestError(path, line_number, f"eye coordinate '{text}' is not numeric")


def parse_manifest_line(line: str, path: str, line_number: int, root: str = "") -> SampleRecord:
    fields = line.rstrip("\n").split("\t")
    if len(fields) != 5:
        raise ManifestError(path, line_number, f"expected 5 tab-separated fields, found {len(fields)}")
    identity, modality, image_path, left_text, right_text = fields
    if not identity:
        raise ManifestError(path, line_number, "empty identity")
    try:
        modality = Modality(modality)
    except ValueError:
        raise ManifestError(path, line_number, f"unknown modality '{modality}'")
    left = _parse_point(left_text, path, line_number)
    right = _parse_point(right_text, path, line_number)
    return SampleRecord(identity, modality, image_path, left, right, root=root)


def build_pairing(records: Sequence[SampleRecord], one_to_one: bool = False) -> Dict[str, List[Pair]]:
    """Join photo and sketch records on identity."""
    grouped: "OrderedDict[str, Dict[Modality, List[SampleRecord]]]" = OrderedDict()
    for record in records:
        grouped.setdefault(record.identity, {Modality.PHOTO: [], Modality.SKETCH: []})[record.modality].append(record)

    pairing = {}
    for identity, by_modality in grouped.items():
        photos, sketches = by_modality[Modality.PHOTO], by_modality[Modality.SKETCH]
        if not photos or not sketches:
            missing = "photo" if not photos else "sketch"
            raise PairingError(identity, f"no {missing} record")
        if len(photos) != len(sketches):
            raise PairingError(identity, f"{len(photos)} photo(s) but {len(sketches)} sketch(es)")
        if one_to_one and len(photos) > 1:
            raise PairingError(identity, f"{len(photos)} records per modality, expected exactly one")
        pairing[identity] = list(zip(photos, sketches))
    return pairing


def load_manifest(path: str, one_to_one: bool = False) -> Manifest:
    """Parse a manifest file and build its pairing.

    Raises:
        DataError: the file does not exist.
        ManifestError: a line does not parse.
        PairingError: an identity cannot be paired in a manifest with sketches.
    """
    manifest_path = Path(path)
    if not manifest_path.is_file():
        raise DataError(f"Manifest {path} does not exist")

    root = str(manifest_path.parent)
    records = []
    with manifest_path.open(encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            records.append(parse_manifest_line(line, str(path), line_number, root=root))

    has_sketches = any(r.modality == Modality.SKETCH for r in records)
    pairing = build_pairing(records, one_to_one=one_to_one) if has_sketches else {}
    WorkflowLogger.print_info(
        f"Loaded manifest {path}: {len(records)} records, "
        f"{len({r.identity for r in records})} identities, {'paired' if pairing else 'photo-only'}"
    )
    return Manifest(records=records, pairing=pairing, path=str(path))


def _format_point(point: Point) -> str:
    return f"{point[0]:.2f},{point[1]:.2f}"


def write_manifest(records: Iterable[SampleRecord], path: Path, header: Optional[str] = None) -> None:
    """Write records as a manifest; image paths are written as stored."""
    lines = []
    if header:
        lines.extend(f"# {text}" for text in header.splitlines())
    for record in records:
        lines.append("\t".join([
            record.identity,
            record.modality.value,
            record.image_path,
            _format_point(record.left_eye),
            _format_point(record.right_eye),
        ]))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def relabel(record: SampleRecord, identity: str) -> SampleRecord:
    return replace(record, identity=identity)
