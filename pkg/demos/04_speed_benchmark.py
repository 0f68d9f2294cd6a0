#!/usr/bin/env python3
"""Time an external fusion command under both timing protocols.

Fusion speed means seconds per pair for the fusion call itself, which
only the tool can measure (model loading and I/O must not count). The
sidecar protocol has the tool report that number; wall mode is the
honest fallback that times whole process invocations and therefore
overstates.

The stand-in "fusion tool" here just sleeps 50 ms per pair, so the truth
is known and the protocol overheads are visible.
"""

import tempfile

import numpy as np

from fuseval import PairRef, save_image, time_fusion
from fuseval.synthetic import write_fake_fuser

rng = np.random.default_rng(0)

with tempfile.TemporaryDirectory() as tmp:
    pairs = []
    for i in range(10):
        vis, ir = f"{tmp}/v{i}.png", f"{tmp}/i{i}.png"
        save_image(rng.integers(0, 255, (32, 32, 3), dtype=np.uint8), vis)
        save_image(rng.integers(0, 255, (32, 32), dtype=np.uint8), ir)
        pairs.append(PairRef(f"p{i}", vis, ir))

    templates = write_fake_fuser(f"{tmp}/tools", sleep_seconds=0.050)
    print("ground truth: the tool's fusion step takes 50.0 ms per pair\n")

    records, summary = time_fusion(templates["sidecar"], pairs, warmup_count=1,
                                   repeats=2, mode="sidecar", work_dir=f"{tmp}/ws")
    print(f"sidecar mode: {summary.mean_seconds * 1000:6.1f} ms/pair over "
          f"{summary.measured_count} measured runs "
          f"({summary.warmup_count} warmup run(s) excluded)")

    records, summary = time_fusion(templates["wall"], pairs, warmup_count=1,
                                   repeats=2, mode="wall", work_dir=f"{tmp}/ww")
    print(f"wall mode:    {summary.mean_seconds * 1000:6.1f} ms/pair "
          f"(upper bound: includes process startup and file I/O)")
    print(f"\nhost: {summary.host}")
    print("reports always carry the protocol label so sidecar and wall numbers "
          "never get compared as equals")
