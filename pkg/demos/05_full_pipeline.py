#!/usr/bin/env python3
"""The whole pipeline on the bundled synthetic mini-dataset.

Generates a 6-pair dataset (visible/infrared frames, YOLO labels, two
fake fusion algorithms' outputs, canned detector exports), then drives
the same path the CLI exposes:

    fuseval validate    -> manifest and file checks
    fuseval metrics     -> per-pair quality metrics into a results store
    fuseval detect-eval -> mAP@0.5 table across methods and splits
    fuseval report      -> mean +/- std leaderboard with highlights
"""

import tempfile

from fuseval.cli import main
from fuseval.synthetic import generate_mini_dataset

with tempfile.TemporaryDirectory() as tmp:
    manifest, detections_dir = generate_mini_dataset(f"{tmp}/data")
    results = f"{tmp}/results.jsonl"

    print("=== validate " + "=" * 50)
    assert main(["validate", "--manifest", manifest]) == 0

    print("\n=== metrics " + "=" * 51)
    assert main(["metrics", "--manifest", manifest, "--out", results]) == 0

    print("\n=== detect-eval (mAP@0.5, All/Day/Night) " + "=" * 21)
    assert main(["detect-eval", "--manifest", manifest,
                 "--detections", detections_dir]) == 0

    print("\n=== report (best in bold, second best in italics) " + "=" * 12)
    assert main(["report", "--results", results]) == 0

    print("\nSame table as LaTeX, with the red/green highlight macros:")
    assert main(["report", "--results", results, "--format", "latex"]) == 0
