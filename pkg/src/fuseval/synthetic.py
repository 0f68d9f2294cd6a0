"""Deterministic synthetic mini-dataset for demos and end-to-end tests.

Builds a small campus-style dataset on disk: visible/infrared pairs with
bright "pedestrian" blobs, YOLO annotations, two fake fusion algorithms'
outputs, per-method detector exports, an identity calibration file, and
a manifest tying it all together. Everything derives from one RNG seed,
so repeated generation is byte-stable.
"""

from __future__ import annotations

import json
import os
import stat

import numpy as np

from .images import save_image, to_grayscale
from .manifest import (
    DatasetManifest,
    ManifestEntry,
    Scenario,
    write_manifest,
)

ALGORITHMS = ("avgfuse", "maxfuse")
PROMPT = "a person"
TEXT_THRESHOLD = 0.3
IOU_THRESHOLD = 0.5


def _pedestrian_rects(rng, width, height, count):
    rects = []
    for _ in range(count):
        w = int(rng.integers(8, 16))
        h = int(rng.integers(12, 22))
        x0 = int(rng.integers(2, width - w - 2))
        y0 = int(rng.integers(2, height - h - 2))
        rects.append((x0, y0, x0 + w, y0 + h))
    return rects


def _render_pair(rng, width, height, rects, night):
    """Visible RGB + infrared gray frames with blobs at the given rects."""
    base = 30 if night else 140
    vis = rng.integers(0, 25, size=(height, width, 3)).astype(np.int32) + base
    ramp = np.linspace(0, 40, width, dtype=np.int32)[None, :, None]
    vis = vis + ramp
    ir = rng.integers(0, 20, size=(height, width)).astype(np.int32) + 25
    for x0, y0, x1, y1 in rects:
        ir[y0:y1, x0:x1] = rng.integers(190, 250)
        person_rgb = rng.integers(10, 60, size=3) if night else rng.integers(60, 200, size=3)
        vis[y0:y1, x0:x1] = person_rgb
    return (np.clip(vis, 0, 255).astype(np.uint8),
            np.clip(ir, 0, 255).astype(np.uint8))


def _yolo_lines(rects, width, height):
    lines = []
    for x0, y0, x1, y1 in rects:
        cx = (x0 + x1) / 2.0 / width
        cy = (y0 + y1) / 2.0 / height
        w = (x1 - x0) / width
        h = (y1 - y0) / height
        lines.append(f"0 {cx:.6f} {cy:.6f} {w:.6f} {h:.6f}")
    return "\n".join(lines) + "\n"


def _jitter(rng, rect, amount, width, height):
    x0, y0, x1, y1 = rect
    dx, dy = (int(rng.integers(-amount, amount + 1)) for _ in range(2))
    return (max(0, x0 + dx), max(0, y0 + dy),
            min(width, x1 + dx), min(height, y1 + dy))


def _detection_entry(rect, score):
    x0, y0, x1, y1 = rect
    return {"label": PROMPT, "score": round(score, 4),
            "box": [float(x0), float(y0), float(x1), float(y1)]}


def _write_export(path, images):
    doc = {
        "schema_version": "1",
        "prompt": PROMPT,
        "text_threshold": TEXT_THRESHOLD,
        "iou_threshold": IOU_THRESHOLD,
        "iou_threshold_role": "nms",
        "backend": "synthetic",
        "images": images,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def generate_mini_dataset(
    root: str | os.PathLike,
    num_pairs: int = 6,
    size: tuple[int, int] = (64, 64),
    seed: int = 7,
) -> tuple[str, str]:
    """Materialize the mini dataset under ``root``.

    Returns (manifest_path, detections_dir). Layout: vis/, ir/, labels/,
    fused/<algo>/, detections/<method>.json, calibration.txt,
    manifest.yaml. Pairs cycle Daytime, Daytime, Nighttime, Nighttime,
    Smoke, ... with only day/night pairs annotated.
    """
    rng = np.random.default_rng(seed)
    width, height = size
    root = os.fspath(root)
    for sub in ["vis", "ir", "labels", "detections"] + [f"fused/{a}" for a in ALGORITHMS]:
        os.makedirs(os.path.join(root, sub), exist_ok=True)

    scenario_cycle = [Scenario.DAYTIME, Scenario.DAYTIME, Scenario.NIGHTTIME,
                      Scenario.NIGHTTIME, Scenario.SMOKE]
    entries: list[ManifestEntry] = []
    gt_rects: dict[str, list[tuple[int, int, int, int]]] = {}
    scenarios: dict[str, Scenario] = {}

    for i in range(num_pairs):
        pair_id = f"p{i:02d}"
        scenario = scenario_cycle[i % len(scenario_cycle)]
        night = scenario is Scenario.NIGHTTIME
        rects = _pedestrian_rects(rng, width, height, int(rng.integers(1, 4)))
        vis, ir = _render_pair(rng, width, height, rects, night)
        save_image(vis, os.path.join(root, "vis", f"{pair_id}.png"))
        save_image(ir, os.path.join(root, "ir", f"{pair_id}.png"))

        vis_gray = to_grayscale(vis)
        avg = ((vis.astype(np.int32) + ir[:, :, None]) // 2).astype(np.uint8)
        save_image(avg, os.path.join(root, "fused", "avgfuse", f"{pair_id}.png"))
        save_image(np.maximum(vis_gray, ir), os.path.join(root, "fused", "maxfuse", f"{pair_id}.png"))

        annotated = scenario in (Scenario.DAYTIME, Scenario.NIGHTTIME)
        annotation_path = None
        if annotated:
            annotation_path = f"labels/{pair_id}.txt"
            with open(os.path.join(root, annotation_path), "w", encoding="utf-8") as fh:
                fh.write(_yolo_lines(rects, width, height))
            gt_rects[pair_id] = rects
            scenarios[pair_id] = scenario

        entries.append(ManifestEntry(
            pair_id=pair_id,
            scenario=scenario,
            visible_path=f"vis/{pair_id}.png",
            infrared_path=f"ir/{pair_id}.png",
            annotation_path=annotation_path,
        ))

    manifest = DatasetManifest(
        name="synthetic-mini",
        entries=entries,
        fused_dirs={a: f"fused/{a}" for a in ALGORITHMS},
        root=root,
    )
    manifest_path = os.path.join(root, "manifest.yaml")
    write_manifest(manifest, manifest_path)

    with open(os.path.join(root, "calibration.txt"), "w", encoding="utf-8") as fh:
        fh.write("1 0 0\n0 1 0\n0 0 1\n")

    _write_fake_detections(root, gt_rects, scenarios, rng, width, height)
    return manifest_path, os.path.join(root, "detections")


def _write_fake_detections(root, gt_rects, scenarios, rng, width, height):
    """Per-method exports with controlled quality differences.

    avgfuse finds everything (plus a harmless low-score FP); maxfuse adds
    a high-score FP; IR misses one daytime target; RGB misses nighttime
    targets entirely.
    """
    annotated = sorted(gt_rects)
    methods = {
        "avgfuse": lambda pid: f"{pid}_fused_avgfuse",
        "maxfuse": lambda pid: f"{pid}_fused_maxfuse",
        "IR": lambda pid: f"{pid}_ir",
        "RGB": lambda pid: f"{pid}_vis",
    }
    first_day = next(p for p in annotated if scenarios[p] is Scenario.DAYTIME)

    for method, image_id in methods.items():
        images = {}
        score = {"avgfuse": 0.95, "maxfuse": 0.90, "IR": 0.85, "RGB": 0.80}[method]
        for pid in annotated:
            dets = []
            night = scenarios[pid] is Scenario.NIGHTTIME
            for j, rect in enumerate(gt_rects[pid]):
                if method == "RGB" and night:
                    continue
                if method == "IR" and pid == first_day and j == 0:
                    continue
                jitter = 3 if method in ("IR", "RGB") else 1
                dets.append(_detection_entry(
                    _jitter(rng, rect, jitter, width, height), score))
                score -= 0.003
            if method == "maxfuse" and pid == annotated[0]:
                dets.insert(0, _detection_entry((2, 2, 12, 12), 0.93))
            if method == "avgfuse" and pid == annotated[-1]:
                dets.append(_detection_entry((width - 12, 2, width - 2, 12), 0.10))
            images[image_id(pid)] = dets
        _write_export(os.path.join(root, "detections", f"{method}.json"), images)


_PY_FUSER = '''#!/usr/bin/env python3
"""Fake fusion tool: sleep a fixed time per pair, then copy IR to output.

Usage: fake_fuser.py VIS IR OUT [TIMING]

With TIMING given, appends "pair_id,seconds" measuring only the sleep
(the stand-in for the fusion call), excluding startup and file I/O.
"""
import os
import shutil
import sys
import time

SLEEP = {sleep}


def main():
    vis, ir, out = sys.argv[1:4]
    timing = sys.argv[4] if len(sys.argv) > 4 else None
    pair_id = os.path.splitext(os.path.basename(out))[0]
    start = time.perf_counter()
    time.sleep(SLEEP)
    elapsed = time.perf_counter() - start
    shutil.copyfile(ir, out)
    if timing:
        with open(timing, "a") as fh:
            fh.write(f"{{pair_id}},{{elapsed:.9f}}\\n")


main()
'''

_SH_FUSER = """#!/bin/sh
# Fake fusion tool for wall-clock timing: sleep, then copy IR to output.
sleep {sleep}
cp "$2" "$3"
"""


def write_fake_fuser(directory: str | os.PathLike, sleep_seconds: float = 0.05) -> dict[str, str]:
    """Write sleep-based stand-in fusion tools; returns command templates.

    The Python tool self-times its sleep for sidecar mode; the shell tool
    keeps process startup negligible for wall mode.
    """
    directory = os.fspath(directory)
    os.makedirs(directory, exist_ok=True)
    py_path = os.path.join(directory, "fake_fuser.py")
    sh_path = os.path.join(directory, "fake_fuser.sh")
    with open(py_path, "w", encoding="utf-8") as fh:
        fh.write(_PY_FUSER.format(sleep=repr(sleep_seconds)))
    with open(sh_path, "w", encoding="utf-8") as fh:
        fh.write(_SH_FUSER.format(sleep=sleep_seconds))
    for p in (py_path, sh_path):
        os.chmod(p, os.stat(p).st_mode | stat.S_IXUSR)
    return {
        "sidecar": f"python3 {py_path} {{vis}} {{ir}} {{out}} {{timing}}",
        "wall": f"sh {sh_path} {{vis}} {{ir}} {{out}}",
    }
