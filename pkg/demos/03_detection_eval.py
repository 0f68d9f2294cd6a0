#!/usr/bin/env python3
"""Score a detector run against YOLO ground truth, step by step.

Shows the full chain behind a mAP@0.5 number: annotation parsing and
denormalization, IoU-based greedy matching, the precision/recall curve,
and the pooled average precision across images.
"""

import os
import tempfile

from fuseval import (
    BoundingBox,
    Detection,
    average_precision,
    iou,
    map_at_50,
    match_detections,
    parse_yolo_annotations,
)

# 1. YOLO annotations are normalized center/size; the parser gives back
#    absolute pixel corners.
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "frame.txt")
    with open(path, "w") as fh:
        fh.write("0 0.25 0.25 0.5 0.5\n0 0.75 0.75 0.2 0.3\n")
    gt = parse_yolo_annotations(path, image_size=(640, 512))
print("ground truth boxes (class, corners):")
for cls, b in gt:
    print(f"  class {cls}: ({b.x_min:.0f}, {b.y_min:.0f}, {b.x_max:.0f}, {b.y_max:.0f})")

# 2. Detections: one good hit, one sloppy hit, one hallucination.
detections = [
    Detection("a person", 0.92, BoundingBox(5, 5, 315, 250)),
    Detection("a person", 0.71, BoundingBox(400, 300, 560, 480)),
    Detection("a person", 0.40, BoundingBox(0, 400, 80, 500)),
]
gt_boxes = [b for _, b in gt]
for d in detections:
    best = max(iou(d.box, g) for g in gt_boxes)
    print(f"score {d.score:.2f}: best IoU against GT = {best:.3f}")

labels = match_detections(detections, gt_boxes, iou_threshold=0.5)
print(f"greedy matching at IoU>=0.5 labels them: "
      f"{['TP' if t else 'FP' for t in labels]}")

# 3. The PR curve accumulates in descending-score order; AP integrates
#    the precision envelope.
curve = average_precision([d.score for d in detections], labels, num_gt=len(gt_boxes))
print("recall:   ", [f"{r:.2f}" for r in curve.recalls])
print("precision:", [f"{p:.2f}" for p in curve.precisions])
print(f"AP for this image: {curve.ap:.4f}")

# 4. mAP pools detections across all images (single pedestrian class, so
#    mAP == pooled AP).
dets_by_image = {"frame1": detections, "frame2": []}
gts_by_image = {"frame1": gt, "frame2": [(0, BoundingBox(10, 10, 50, 90))]}
print(f"pooled mAP@0.5 over both frames: {map_at_50(dets_by_image, gts_by_image):.4f}")
print("(the second frame's missed pedestrian costs recall, pulling mAP down)")
