"""Append-only results store: one JSON line per pair x algorithm x metric.

The first line is a header echoing every metric convention in force when
the file was created, so numbers stay auditable after the fact. Records
are keyed by (pair_id, algorithm, metric); appending a duplicate key is
rejected unless overwrite is requested.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

from .errors import DuplicateRecord, MissingFile, SchemaViolation
from .metrics import conventions

STORE_VERSION = 1


@dataclass(frozen=True)
class MetricRecord:
    pair_id: str
    algorithm: str
    metric: str
    value: float
    scenario: str = "Other"
    components: tuple[float, float] | None = None

    @property
    def key(self) -> tuple[str, str, str]:
        return (self.pair_id, self.algorithm, self.metric)


def _record_to_json(rec: MetricRecord) -> str:
    doc = {
        "record": "metric",
        "pair_id": rec.pair_id,
        "algorithm": rec.algorithm,
        "metric": rec.metric,
        "value": rec.value,
        "scenario": rec.scenario,
        "components": list(rec.components) if rec.components else None,
    }
    return json.dumps(doc, sort_keys=True)


def _record_from_json(doc: dict) -> MetricRecord:
    comps = doc.get("components")
    return MetricRecord(
        pair_id=str(doc["pair_id"]),
        algorithm=str(doc["algorithm"]),
        metric=str(doc["metric"]),
        value=float(doc["value"]),
        scenario=str(doc.get("scenario", "Other")),
        components=tuple(comps) if comps else None,
    )


def default_header(**extra) -> dict:
    header = {
        "record": "header",
        "store_version": STORE_VERSION,
        "conventions": conventions(),
        "ap_interpolation": "all_point_envelope",
        "pr_pooling": "detections ranked jointly across images",
        "aggregate_std": "population",
    }
    header.update(extra)
    return header


def read_store(path: str | os.PathLike) -> tuple[dict, list[MetricRecord]]:
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MissingFile(f"no such results file: {path}")
    header: dict = {}
    records: list[MetricRecord] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaViolation(f"{path}:{lineno}: invalid JSON ({exc})") from exc
            kind = doc.get("record")
            if kind == "header":
                header = doc
            elif kind == "metric":
                try:
                    records.append(_record_from_json(doc))
                except (KeyError, TypeError, ValueError) as exc:
                    raise SchemaViolation(f"{path}:{lineno}: bad record ({exc})") from exc
            else:
                raise SchemaViolation(f"{path}:{lineno}: unknown record kind {kind!r}")
    return header, records


def append_records(
    path: str | os.PathLike,
    new_records: list[MetricRecord],
    overwrite: bool = False,
    header_extra: dict | None = None,
) -> None:
    """Add records to the store, creating it (with a header) if needed.

    Duplicate (pair_id, algorithm, metric) keys raise DuplicateRecord;
    with ``overwrite`` the incoming record replaces the stored one
    instead.
    """
    path = os.fspath(path)
    fresh_keys: set = set()
    for rec in new_records:
        if rec.key in fresh_keys:
            raise DuplicateRecord(f"duplicate record in batch: {rec.key}")
        fresh_keys.add(rec.key)

    if os.path.isfile(path):
        header, existing = read_store(path)
        clashes = [r.key for r in existing if r.key in fresh_keys]
        if clashes and not overwrite:
            raise DuplicateRecord(
                f"{path}: {len(clashes)} record(s) already present, e.g. {clashes[0]}; "
                f"pass overwrite to replace"
            )
        kept = [r for r in existing if r.key not in fresh_keys]
        if header_extra:
            header.update(header_extra)
        lines = [json.dumps(header, sort_keys=True)]
        lines += [_record_to_json(r) for r in kept + list(new_records)]
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")
    else:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        header = default_header(**(header_extra or {}))
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
            for rec in new_records:
                fh.write(_record_to_json(rec) + "\n")
