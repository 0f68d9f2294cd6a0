"""Fusion speed measurement for an external fusion command.

The headline speed number is the average seconds per fused pair,
excluding model loading and I/O. That quantity is only observable from
inside the fusion tool, so two protocols are supported:

* sidecar -- the tool times its own fusion call and appends
  ``pair_id,seconds`` CSV lines to the file passed as ``{timing}``;
  the harness ingests those lines. This is the faithful protocol.
* wall -- the harness wall-clocks each whole process invocation with a
  monotonic timer. Startup and I/O are included, so results are honest
  upper bounds and are labeled as such in reports.

Either way, the first ``warmup_count`` invocations never enter the
summary mean.
"""

from __future__ import annotations

import os
import platform
import shlex
import subprocess
import time
from dataclasses import dataclass
from typing import NamedTuple

from .errors import CommandFailed, MissingSidecar, NoTimingData, SchemaViolation

MODES = ("sidecar", "wall")


class PairRef(NamedTuple):
    """Paths of one pair to feed the external command."""

    pair_id: str
    visible_path: str
    infrared_path: str


@dataclass(frozen=True)
class TimingRecord:
    pair_id: str
    wall_time: float  # seconds
    run_index: int    # global invocation index
    warmup: bool


@dataclass(frozen=True)
class TimingSummary:
    mode: str
    mean_seconds: float
    measured_count: int
    warmup_count: int
    host: str
    command_template: str


def host_descriptor() -> str:
    """Free-form description of the machine a timing run executed on."""
    cpu = platform.processor() or platform.machine()
    return f"{platform.platform()} / {cpu} / python {platform.python_version()}"


def _format_command(template: str, **paths: str) -> list[str]:
    quoted = {key: shlex.quote(value) for key, value in paths.items()}
    try:
        rendered = template.format(**quoted)
    except (KeyError, IndexError) as exc:
        raise SchemaViolation(
            f"command template {template!r} has unknown placeholder {exc}"
        ) from exc
    return shlex.split(rendered)


def _invoke(argv: list[str]) -> None:
    try:
        proc = subprocess.run(argv, capture_output=True)
    except OSError as exc:
        raise CommandFailed(f"could not start {argv[0]!r}: {exc}") from exc
    if proc.returncode != 0:
        stderr = proc.stderr.decode(errors="replace").strip()
        raise CommandFailed(
            f"{' '.join(argv)} exited with status {proc.returncode}: {stderr}"
        )


def _read_sidecar(path: str, known_pairs: set[str]) -> list[tuple[str, float]]:
    if not os.path.isfile(path):
        raise MissingSidecar(f"fusion tool produced no sidecar file at {path}")
    rows: list[tuple[str, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise SchemaViolation(f"{path}:{lineno}: expected 'pair_id,seconds'")
            pair_id = parts[0].strip()
            try:
                seconds = float(parts[1])
            except ValueError as exc:
                raise SchemaViolation(f"{path}:{lineno}: bad seconds value") from exc
            if pair_id not in known_pairs:
                raise SchemaViolation(
                    f"{path}:{lineno}: pair_id {pair_id!r} is not in the manifest"
                )
            if seconds <= 0.0:
                raise SchemaViolation(f"{path}:{lineno}: non-positive duration {seconds}")
            rows.append((pair_id, seconds))
    return rows


def time_fusion(
    command_template: str,
    pairs: list[PairRef],
    warmup_count: int = 1,
    repeats: int = 1,
    mode: str = "sidecar",
    work_dir: str = ".",
) -> tuple[list[TimingRecord], TimingSummary]:
    """Time an external fusion command over a list of pairs.

    ``command_template`` must contain ``{vis}``, ``{ir}`` and ``{out}``
    placeholders, plus ``{timing}`` in sidecar mode. The first
    ``warmup_count`` invocations (cycling through the pair list) are
    flagged warmup; the measured phase then traverses the full pair list
    ``repeats`` times. Invocations are strictly serialized to keep the
    numbers meaningful.
    """
    if mode not in MODES:
        raise SchemaViolation(f"unknown timing mode {mode!r}; expected one of {MODES}")
    if not pairs:
        raise NoTimingData("no pairs to time")
    if warmup_count < 0:
        raise SchemaViolation("warmup_count must be >= 0")
    if repeats < 1:
        raise NoTimingData(f"repeats={repeats} leaves no measured invocations")
    if mode == "sidecar" and "{timing}" not in command_template:
        raise SchemaViolation("sidecar mode requires a {timing} placeholder")

    os.makedirs(work_dir, exist_ok=True)
    known = {p.pair_id for p in pairs}

    schedule: list[tuple[PairRef, bool]] = []
    for k in range(warmup_count):
        schedule.append((pairs[k % len(pairs)], True))
    for _ in range(repeats):
        schedule.extend((p, False) for p in pairs)

    records: list[TimingRecord] = []
    for run_index, (pair, warm) in enumerate(schedule):
        out_path = os.path.join(work_dir, f"{pair.pair_id}.png")
        sidecar_path = os.path.join(work_dir, f"timing_{run_index:04d}.csv")
        if os.path.exists(sidecar_path):
            os.remove(sidecar_path)
        argv = _format_command(
            command_template,
            vis=pair.visible_path,
            ir=pair.infrared_path,
            out=out_path,
            timing=sidecar_path,
        )
        if mode == "wall":
            start = time.perf_counter()
            _invoke(argv)
            elapsed = time.perf_counter() - start
            records.append(TimingRecord(pair.pair_id, elapsed, run_index, warm))
        else:
            _invoke(argv)
            if warm and not os.path.isfile(sidecar_path):
                continue  # tools may skip timing during warmup
            for pair_id, seconds in _read_sidecar(sidecar_path, known):
                records.append(TimingRecord(pair_id, seconds, run_index, warm))

    measured = [r for r in records if not r.warmup]
    if not measured:
        raise NoTimingData("no measured timing records after warmup")
    summary = TimingSummary(
        mode=mode,
        mean_seconds=sum(r.wall_time for r in measured) / len(measured),
        measured_count=len(measured),
        warmup_count=len(records) - len(measured),
        host=host_descriptor(),
        command_template=command_template,
    )
    return records, summary


def mean_by_pair(records: list[TimingRecord]) -> dict[str, float]:
    """Per-pair mean over measured (non-warmup) records."""
    sums: dict[str, list[float]] = {}
    for r in records:
        if not r.warmup:
            sums.setdefault(r.pair_id, []).append(r.wall_time)
    return {pid: sum(v) / len(v) for pid, v in sums.items()}
