"""Dataset manifest: a YAML inventory of visible/infrared pairs.

A manifest describes one dataset: where each visible and infrared frame
lives, its scene category, whether the pair is geometrically aligned,
an optional YOLO annotation file, and one directory of fused outputs per
fusion algorithm (fused frames are named ``<pair_id>.png`` inside it).

Schema (version 1)::

    schema_version: 1
    name: campus
    entries:
      - pair_id: "000001"
        scenario: Daytime          # Daytime|Nighttime|Smoke|Underpass|Other
        visible: vis/000001.png
        infrared: ir/000001.png
        annotation: labels/000001.txt   # optional; presence => annotated
        aligned: true                   # default true
    fused_dirs:
      SeAFusion: fused/seafusion

Relative paths are resolved against the directory containing the
manifest file.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass, field

import numpy as np
import yaml

from .errors import DanglingPath, DuplicatePairId, MissingFile, SchemaViolation, UnalignedPair
from .images import load_image, to_grayscale

SCHEMA_VERSION = 1


class Scenario(enum.Enum):
    DAYTIME = "Daytime"
    NIGHTTIME = "Nighttime"
    SMOKE = "Smoke"
    UNDERPASS = "Underpass"
    OTHER = "Other"

    @classmethod
    def parse(cls, text: str) -> "Scenario":
        for member in cls:
            if member.value.lower() == str(text).lower():
                return member
        raise SchemaViolation(f"unknown scenario {text!r}; expected one of "
                              f"{[m.value for m in cls]}")


@dataclass(frozen=True)
class ManifestEntry:
    pair_id: str
    scenario: Scenario
    visible_path: str
    infrared_path: str
    annotation_path: str | None = None
    aligned: bool = True

    @property
    def annotated(self) -> bool:
        return self.annotation_path is not None


@dataclass(frozen=True)
class ImagePair:
    """A loaded, co-registered visible/infrared frame pair."""

    visible: np.ndarray
    infrared: np.ndarray
    pair_id: str
    scenario: Scenario

    def __post_init__(self):
        from .errors import DimensionMismatch

        if self.visible.shape[:2] != self.infrared.shape[:2]:
            raise DimensionMismatch(
                f"pair {self.pair_id!r}: visible {self.visible.shape[:2]} vs "
                f"infrared {self.infrared.shape[:2]}"
            )


@dataclass
class DatasetManifest:
    name: str
    entries: list[ManifestEntry] = field(default_factory=list)
    fused_dirs: dict[str, str] = field(default_factory=dict)
    root: str = "."

    def entry(self, pair_id: str) -> ManifestEntry:
        for e in self.entries:
            if e.pair_id == pair_id:
                return e
        raise KeyError(pair_id)

    def pair_ids(self) -> list[str]:
        return [e.pair_id for e in self.entries]

    def scenario_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for e in self.entries:
            counts[e.scenario.value] = counts.get(e.scenario.value, 0) + 1
        return counts

    def annotated_entries(self, scenario: Scenario | None = None) -> list[ManifestEntry]:
        out = [e for e in self.entries if e.annotated]
        if scenario is not None:
            out = [e for e in out if e.scenario is scenario]
        return out

    def resolve(self, relpath: str) -> str:
        return os.path.normpath(os.path.join(self.root, relpath))

    def fused_path(self, algorithm: str, pair_id: str) -> str:
        if algorithm not in self.fused_dirs:
            raise SchemaViolation(f"algorithm {algorithm!r} has no fused_dir in manifest "
                                  f"{self.name!r}")
        return self.resolve(os.path.join(self.fused_dirs[algorithm], f"{pair_id}.png"))

    def load_pair(self, entry: ManifestEntry, require_aligned: bool = True) -> ImagePair:
        """Load one entry's images; optionally refuse unaligned pairs."""
        if require_aligned and not entry.aligned:
            raise UnalignedPair(
                f"pair {entry.pair_id!r} is not aligned; metrics require aligned pairs"
            )
        visible = load_image(self.resolve(entry.visible_path))
        infrared = to_grayscale(load_image(self.resolve(entry.infrared_path)))
        return ImagePair(visible=visible, infrared=infrared,
                         pair_id=entry.pair_id, scenario=entry.scenario)


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise SchemaViolation(f"{context}: missing required key {key!r}")
    return mapping[key]


def parse_manifest(path: str | os.PathLike) -> DatasetManifest:
    """Parse and validate a manifest file.

    Raises SchemaViolation for structural problems, DuplicatePairId for
    repeated ids, and DanglingPath when an annotated entry points at a
    missing annotation file.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MissingFile(f"no such manifest: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise SchemaViolation(f"{path}: invalid YAML ({exc})") from exc
    if not isinstance(doc, dict):
        raise SchemaViolation(f"{path}: manifest must be a mapping")

    version = _require(doc, "schema_version", path)
    if version != SCHEMA_VERSION:
        raise SchemaViolation(f"{path}: unsupported schema_version {version!r} "
                              f"(supported: {SCHEMA_VERSION})")

    root = os.path.dirname(os.path.abspath(path))
    manifest = DatasetManifest(name=str(_require(doc, "name", path)), root=root)

    raw_entries = doc.get("entries", [])
    if raw_entries is None:
        raw_entries = []
    if not isinstance(raw_entries, list):
        raise SchemaViolation(f"{path}: 'entries' must be a list")

    seen: set[str] = set()
    for i, raw in enumerate(raw_entries):
        ctx = f"{path}: entries[{i}]"
        if not isinstance(raw, dict):
            raise SchemaViolation(f"{ctx}: each entry must be a mapping")
        pair_id = str(_require(raw, "pair_id", ctx))
        if pair_id in seen:
            raise DuplicatePairId(f"{ctx}: pair_id {pair_id!r} appears more than once")
        seen.add(pair_id)
        entry = ManifestEntry(
            pair_id=pair_id,
            scenario=Scenario.parse(_require(raw, "scenario", ctx)),
            visible_path=str(_require(raw, "visible", ctx)),
            infrared_path=str(_require(raw, "infrared", ctx)),
            annotation_path=(str(raw["annotation"]) if raw.get("annotation") else None),
            aligned=bool(raw.get("aligned", True)),
        )
        if entry.annotated:
            ann = manifest.resolve(entry.annotation_path)
            if not os.path.isfile(ann):
                raise DanglingPath(f"{ctx}: annotation file not found: {ann}")
        manifest.entries.append(entry)

    raw_fused = doc.get("fused_dirs", {}) or {}
    if not isinstance(raw_fused, dict):
        raise SchemaViolation(f"{path}: 'fused_dirs' must be a mapping")
    manifest.fused_dirs = {str(k): str(v) for k, v in raw_fused.items()}
    return manifest


def serialize_manifest(manifest: DatasetManifest) -> str:
    """Render a manifest back to its YAML form (semantic round-trip)."""
    doc: dict = {
        "schema_version": SCHEMA_VERSION,
        "name": manifest.name,
        "entries": [],
    }
    for e in manifest.entries:
        raw: dict = {
            "pair_id": e.pair_id,
            "scenario": e.scenario.value,
            "visible": e.visible_path,
            "infrared": e.infrared_path,
        }
        if e.annotation_path is not None:
            raw["annotation"] = e.annotation_path
        raw["aligned"] = e.aligned
        doc["entries"].append(raw)
    if manifest.fused_dirs:
        doc["fused_dirs"] = dict(sorted(manifest.fused_dirs.items()))
    return yaml.safe_dump(doc, sort_keys=False)


def write_manifest(manifest: DatasetManifest, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(serialize_manifest(manifest))
