"""Command-line pipeline: validate -> metrics -> bench -> detect-eval -> report.

Exit codes: 0 success, 1 validation failure, 2 I/O or external-command
error, 3 internal invariant violation. The dataset root may be supplied
via the FUSEVAL_DATA_ROOT environment variable instead of --manifest
(the manifest is then expected at <root>/manifest.yaml).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from . import detection, reporting, results, timing
from .errors import (
    FusevalError,
    MissingFile,
    MissingFusedImage,
    SchemaViolation,
    ValidationFailure,
)
from .images import load_image
from .manifest import DatasetManifest, ImagePair, Scenario, parse_manifest
from .metrics import evaluate_all
from .registration import Homography, load_homography, warp
from .results import MetricRecord

ENV_DATA_ROOT = "FUSEVAL_DATA_ROOT"

_SCENARIO_FLAGS = {
    "all": None,
    "day": Scenario.DAYTIME,
    "night": Scenario.NIGHTTIME,
    "smoke": Scenario.SMOKE,
    "underpass": Scenario.UNDERPASS,
}


def _manifest_path(args) -> str:
    if args.manifest:
        return args.manifest
    root = os.environ.get(ENV_DATA_ROOT)
    if root:
        return os.path.join(root, "manifest.yaml")
    raise SchemaViolation(f"--manifest not given and {ENV_DATA_ROOT} is not set")


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        os.makedirs(os.path.dirname(out_path) or ".", exist_ok=True)
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# --- validate ---------------------------------------------------------------

def cmd_validate(args) -> int:
    manifest = parse_manifest(_manifest_path(args))
    diagnostics: list[str] = []
    for entry in manifest.entries:
        sizes = {}
        for role, rel in (("visible", entry.visible_path), ("infrared", entry.infrared_path)):
            path = manifest.resolve(rel)
            try:
                img = load_image(path)
                sizes[role] = (img.shape[1], img.shape[0])
            except FusevalError as exc:
                diagnostics.append(f"{entry.pair_id}: {role} image unreadable: {exc}")
        if len(sizes) == 2 and sizes["visible"] != sizes["infrared"]:
            diagnostics.append(
                f"{entry.pair_id}: dimension mismatch: visible {sizes['visible']} "
                f"vs infrared {sizes['infrared']}"
            )
        if entry.annotated and "visible" in sizes:
            try:
                detection.parse_yolo_annotations(
                    manifest.resolve(entry.annotation_path), sizes["visible"]
                )
            except FusevalError as exc:
                diagnostics.append(f"{entry.pair_id}: bad annotation: {exc}")
    for algo, rel in manifest.fused_dirs.items():
        if not os.path.isdir(manifest.resolve(rel)):
            diagnostics.append(f"fused_dir for {algo!r} missing: {manifest.resolve(rel)}")

    for line in diagnostics:
        print(f"ERROR {line}", file=sys.stderr)
    counts = ", ".join(f"{k}: {v}" for k, v in sorted(manifest.scenario_counts().items()))
    annotated = sum(1 for e in manifest.entries if e.annotated)
    print(f"{manifest.name}: {len(manifest.entries)} pairs ({counts}); "
          f"{annotated} annotated; {len(manifest.fused_dirs)} fused set(s)")
    if diagnostics:
        print(f"{len(diagnostics)} problem(s) found", file=sys.stderr)
        return 1
    print("manifest OK")
    return 0


# --- metrics ----------------------------------------------------------------

def _pair_homography(calibration: str | None, pair_id: str) -> Homography | None:
    """Resolve the coarse-alignment transform for one pair.

    A file applies to the whole dataset; a directory holds one
    <pair_id>.txt per pair.
    """
    if calibration is None:
        return None
    if os.path.isdir(calibration):
        return load_homography(os.path.join(calibration, f"{pair_id}.txt"))
    return load_homography(calibration)


def _metric_records(manifest: DatasetManifest, entry, algo: str, lenient: bool,
                    psnr_aggregation: str, calibration: str | None = None) -> list[MetricRecord]:
    fused_path = manifest.fused_path(algo, entry.pair_id)
    if not os.path.isfile(fused_path):
        if lenient:
            print(f"warning: skipping {entry.pair_id} x {algo}: no fused image "
                  f"at {fused_path}", file=sys.stderr)
            return []
        raise MissingFusedImage(f"{entry.pair_id} x {algo}: expected {fused_path}")
    pair = manifest.load_pair(entry)
    homography = _pair_homography(calibration, entry.pair_id)
    if homography is not None:
        # coarse registration: infrared warped into the visible frame
        height, width = pair.visible.shape[:2]
        pair = ImagePair(pair.visible,
                         warp(pair.infrared, homography, (width, height)),
                         pair.pair_id, pair.scenario)
    fused = load_image(fused_path)
    return [
        MetricRecord(
            pair_id=entry.pair_id,
            algorithm=algo,
            metric=mv.name,
            value=mv.value,
            scenario=entry.scenario.value,
            components=mv.per_source_components,
        )
        for mv in evaluate_all(pair, fused, psnr_aggregation=psnr_aggregation)
    ]


def cmd_metrics(args) -> int:
    manifest = parse_manifest(_manifest_path(args))
    algos = args.algos.split(",") if args.algos else sorted(manifest.fused_dirs)
    if not algos:
        raise SchemaViolation("no algorithms: manifest has no fused_dirs and --algos is empty")
    entries = [e for e in manifest.entries if e.aligned]
    if not entries:
        raise ValidationFailure("manifest has no aligned pairs to evaluate")

    tasks = [(entry, algo) for algo in algos for entry in entries]
    records: list[MetricRecord] = []
    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(_metric_records, manifest, entry, algo, args.lenient,
                            args.psnr_aggregation, args.calibration)
                for entry, algo in tasks
            ]
            for future in futures:  # submission order keeps the store deterministic
                records.extend(future.result())
    else:
        for entry, algo in tasks:
            records.extend(_metric_records(manifest, entry, algo, args.lenient,
                                           args.psnr_aggregation, args.calibration))

    header_extra = {"dataset": manifest.name,
                    "psnr_aggregation": args.psnr_aggregation}
    if args.calibration:
        header_extra["alignment"] = {"direction": "ir_to_visible",
                                     "calibration": args.calibration}
    results.append_records(args.out, records, overwrite=args.overwrite,
                           header_extra=header_extra)
    print(f"wrote {len(records)} records for {len(algos)} algorithm(s) to {args.out}")
    return 0


# --- detect-eval ------------------------------------------------------------

def cmd_detect_eval(args) -> int:
    manifest = parse_manifest(_manifest_path(args))
    path = args.detections
    if os.path.isdir(path):
        files = sorted(
            os.path.join(path, f) for f in os.listdir(path) if f.endswith(".json")
        )
        if not files:
            raise MissingFile(f"no .json detection exports under {path}")
    else:
        files = [path]

    merged: dict[str, list] = {}
    for f in files:
        _, images = detection.load_detection_export(f)
        for image_id, dets in images.items():
            if image_id in merged:
                raise SchemaViolation(f"image_id {image_id!r} appears in multiple exports")
            merged[image_id] = dets

    grouped = detection.detections_by_method(merged, manifest)
    report = reporting.detection_report(
        manifest, grouped,
        iou_threshold=args.iou,
        scenario=_SCENARIO_FLAGS[args.scenario],
    )
    _emit(reporting.render(report, args.format), args.out)
    return 0


# --- bench ------------------------------------------------------------------

def cmd_bench(args) -> int:
    manifest = parse_manifest(_manifest_path(args))
    entries = [e for e in manifest.entries if e.aligned]
    pairs = [
        timing.PairRef(e.pair_id, manifest.resolve(e.visible_path),
                       manifest.resolve(e.infrared_path))
        for e in entries
    ]
    work_dir = args.workdir or os.path.join(".", "fuseval_bench")
    records, summary = timing.time_fusion(
        args.command, pairs,
        warmup_count=args.warmup,
        repeats=args.repeats,
        mode=args.mode,
        work_dir=work_dir,
    )
    label = "fusion-only" if summary.mode == "sidecar" else "whole-process upper bound"
    print(f"{args.algo}: mean {summary.mean_seconds:.4f} s/pair over "
          f"{summary.measured_count} measured invocation(s) [{summary.mode}: {label}]")
    print(f"host: {summary.host}")
    if args.out:
        by_pair = timing.mean_by_pair(records)
        scenario = {e.pair_id: e.scenario.value for e in entries}
        speed_records = [
            MetricRecord(pair_id=pid, algorithm=args.algo, metric="Speed",
                         value=seconds, scenario=scenario[pid])
            for pid, seconds in sorted(by_pair.items())
        ]
        results.append_records(args.out, speed_records, overwrite=args.overwrite,
                               header_extra={"timing_mode": summary.mode,
                                             "timing_host": summary.host})
        print(f"wrote {len(speed_records)} Speed records to {args.out}")
    return 0


# --- report -----------------------------------------------------------------

def cmd_report(args) -> int:
    header, records = results.read_store(args.results)
    report = reporting.aggregate(records, metadata=header)
    _emit(reporting.render(report, args.format), args.out)
    return 0


# --- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuseval",
        description="Batch evaluation harness for visible-infrared image fusion",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_manifest(p):
        p.add_argument("--manifest", help=f"manifest path (default: ${ENV_DATA_ROOT}/manifest.yaml)")

    p = sub.add_parser("validate", help="check manifest, files, and dimensions")
    add_manifest(p)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("metrics", help="compute fusion-quality metrics per pair x algorithm")
    add_manifest(p)
    p.add_argument("--algos", help="comma-separated algorithm names (default: all fused_dirs)")
    p.add_argument("--out", required=True, help="results store to append to (JSONL)")
    p.add_argument("--jobs", type=int, default=1, help="parallel pair evaluations")
    p.add_argument("--lenient", action="store_true",
                   help="skip missing fused images instead of failing")
    p.add_argument("--overwrite", action="store_true",
                   help="replace existing records with the same key")
    p.add_argument("--psnr-aggregation", choices=("mean_of_psnrs", "psnr_of_mean_mse"),
                   default="mean_of_psnrs")
    p.add_argument("--calibration",
                   help="homography for coarse IR-to-visible alignment: a 9-number "
                        "text file for the whole dataset, or a directory of "
                        "<pair_id>.txt files")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("detect-eval", help="score detector exports as mAP tables")
    add_manifest(p)
    p.add_argument("--detections", required=True,
                   help="detector export file, or a directory of them")
    p.add_argument("--scenario", choices=sorted(_SCENARIO_FLAGS), default="all")
    p.add_argument("--iou", type=float, default=0.5, help="IoU threshold for matching")
    p.add_argument("--format", choices=reporting.FORMATS, default="markdown")
    p.add_argument("--out", help="write the table here instead of stdout")
    p.set_defaults(func=cmd_detect_eval)

    p = sub.add_parser("bench", help="time an external fusion command")
    add_manifest(p)
    p.add_argument("--command", required=True,
                   help="template with {vis} {ir} {out} and, in sidecar mode, {timing}")
    p.add_argument("--mode", choices=timing.MODES, default="sidecar")
    p.add_argument("--algo", default="external", help="algorithm name for Speed records")
    p.add_argument("--warmup", type=int, default=1, help="warmup invocations to discard")
    p.add_argument("--repeats", type=int, default=1, help="measured passes over all pairs")
    p.add_argument("--workdir", help="where fused outputs and sidecars go")
    p.add_argument("--out", help="results store to append Speed records to")
    p.add_argument("--overwrite", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="render leaderboard tables from a results store")
    p.add_argument("--results", required=True, help="results store (JSONL)")
    p.add_argument("--format", choices=reporting.FORMATS, default="markdown")
    p.add_argument("--out", help="write the table here instead of stdout")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FusevalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
