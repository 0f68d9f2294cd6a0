"""Downstream detection scoring: YOLO ground truth, IoU matching, AP/mAP.

Ground truth arrives as LabelImg/YOLO text files (one per annotated
pair); detector outputs arrive as the interchange JSON written by the
detector adapter (see ``schemas/detections.schema.json``). Scoring pools
detections across images and reports average precision at a configurable
IoU threshold (0.5 by default), with the single pedestrian class, so
mAP@0.5 equals AP@0.5.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources

import jsonschema

from .errors import (
    MalformedLine,
    MissingFile,
    MissingImageEntry,
    OutOfRangeValue,
    SchemaViolation,
)
from .manifest import DatasetManifest

PERSON_CLASS = 0
DEFAULT_IOU_THRESHOLD = 0.5

#: Modality suffixes joining detection image_ids back to manifest pairs.
VIS_SUFFIX = "_vis"
IR_SUFFIX = "_ir"
FUSED_INFIX = "_fused_"

#: Report row names for the single-modality baselines.
METHOD_RGB = "RGB"
METHOD_IR = "IR"


@dataclass(frozen=True)
class BoundingBox:
    x_min: float
    y_min: float
    x_max: float
    y_max: float

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise OutOfRangeValue(
                f"degenerate box: ({self.x_min}, {self.y_min}, {self.x_max}, {self.y_max})"
            )

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)


@dataclass(frozen=True)
class Detection:
    label: str
    score: float
    box: BoundingBox

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise OutOfRangeValue(f"detection score {self.score} outside [0, 1]")


@dataclass(frozen=True)
class PrCurve:
    """Precision/recall points in descending-score order plus their AP."""

    recalls: tuple[float, ...]
    precisions: tuple[float, ...]
    ap: float
    num_gt: int
    undefined: bool = False  # set when num_gt == 0 (AP pinned to 0)


def parse_yolo_annotations(
    path: str | os.PathLike, image_size: tuple[int, int]
) -> list[tuple[int, BoundingBox]]:
    """Parse one YOLO annotation file into absolute pixel boxes.

    Lines are ``class cx cy w h`` with center/size normalized to [0, 1];
    corners are denormalized against ``image_size`` = (width, height).
    Boxes must land inside the image bounds.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MissingFile(f"no such annotation file: {path}")
    width, height = image_size
    boxes: list[tuple[int, BoundingBox]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 5:
                raise MalformedLine(f"{path}:{lineno}: expected 5 fields, got {len(parts)}")
            try:
                class_id = int(parts[0])
                cx, cy, w, h = (float(p) for p in parts[1:])
            except ValueError as exc:
                raise MalformedLine(f"{path}:{lineno}: non-numeric field ({exc})") from exc
            for name, v in (("cx", cx), ("cy", cy), ("w", w), ("h", h)):
                if not 0.0 <= v <= 1.0:
                    raise OutOfRangeValue(f"{path}:{lineno}: {name}={v} outside [0, 1]")
            if w <= 0.0 or h <= 0.0:
                raise OutOfRangeValue(f"{path}:{lineno}: zero-size box")
            x_min = (cx - w / 2.0) * width
            x_max = (cx + w / 2.0) * width
            y_min = (cy - h / 2.0) * height
            y_max = (cy + h / 2.0) * height
            eps = 1e-6 * max(width, height)
            if x_min < -eps or y_min < -eps or x_max > width + eps or y_max > height + eps:
                raise OutOfRangeValue(f"{path}:{lineno}: box exceeds image bounds")
            boxes.append((class_id, BoundingBox(
                max(x_min, 0.0), max(y_min, 0.0),
                min(x_max, float(width)), min(y_max, float(height)),
            )))
    return boxes


def load_ground_truth(
    manifest: DatasetManifest,
    scenario=None,
    image_size: tuple[int, int] | None = None,
) -> dict[str, list[tuple[int, BoundingBox]]]:
    """Ground truth for all annotated manifest entries, keyed by pair_id.

    ``image_size`` overrides per-image decoding of dimensions (handy when
    all frames share one resolution and touching the rasters is wasteful).
    """
    from .images import load_image

    gts: dict[str, list[tuple[int, BoundingBox]]] = {}
    for entry in manifest.annotated_entries(scenario):
        if image_size is None:
            img = load_image(manifest.resolve(entry.visible_path))
            size = (img.shape[1], img.shape[0])
        else:
            size = image_size
        gts[entry.pair_id] = parse_yolo_annotations(
            manifest.resolve(entry.annotation_path), size
        )
    return gts


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection-over-union of two boxes; 0 when disjoint."""
    ix = min(a.x_max, b.x_max) - max(a.x_min, b.x_min)
    iy = min(a.y_max, b.y_max) - max(a.y_min, b.y_min)
    if ix <= 0.0 or iy <= 0.0:
        return 0.0
    inter = ix * iy
    return inter / (a.area + b.area - inter)


def match_detections(
    detections: list[Detection],
    ground_truth: list[BoundingBox],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> list[bool]:
    """Greedy TP/FP labeling of one image's detections.

    Detections are processed in descending score order (ties keep input
    order); each claims the still-unmatched ground-truth box of highest
    IoU provided it reaches the threshold. Returns flags aligned with the
    input detection order.
    """
    order = sorted(range(len(detections)), key=lambda i: -detections[i].score)
    matched_gt: set[int] = set()
    labels = [False] * len(detections)
    for i in order:
        best_iou = 0.0
        best_j = -1
        for j, gt in enumerate(ground_truth):
            if j in matched_gt:
                continue
            overlap = iou(detections[i].box, gt)
            if overlap > best_iou:
                best_iou = overlap
                best_j = j
        if best_j >= 0 and best_iou >= iou_threshold:
            matched_gt.add(best_j)
            labels[i] = True
    return labels


def average_precision(
    scores: list[float], is_tp: list[bool], num_gt: int
) -> PrCurve:
    """All-point interpolated AP from scored TP/FP labels.

    Precision/recall accumulate in descending score order; AP is the area
    under the precision envelope (precision at each recall is the maximum
    precision achieved at that recall or beyond). ``num_gt == 0`` yields
    AP 0 with the curve flagged undefined.
    """
    if len(scores) != len(is_tp):
        raise ValueError("scores and labels must align")
    if num_gt < 0:
        raise ValueError("num_gt must be >= 0")
    order = sorted(range(len(scores)), key=lambda i: -scores[i])
    recalls: list[float] = []
    precisions: list[float] = []
    tp = 0
    fp = 0
    for i in order:
        if is_tp[i]:
            tp += 1
        else:
            fp += 1
        precisions.append(tp / (tp + fp))
        recalls.append(tp / num_gt if num_gt > 0 else 0.0)
    if num_gt == 0:
        return PrCurve(tuple(recalls), tuple(precisions), 0.0, 0, undefined=True)

    # precision envelope over recall, integrated at recall change points
    mrec = [0.0] + recalls + [1.0]
    mpre = [0.0] + precisions + [0.0]
    for i in range(len(mpre) - 2, -1, -1):
        mpre[i] = max(mpre[i], mpre[i + 1])
    ap = 0.0
    for i in range(len(mrec) - 1):
        if mrec[i + 1] != mrec[i]:
            ap += (mrec[i + 1] - mrec[i]) * mpre[i + 1]
    return PrCurve(tuple(recalls), tuple(precisions), ap, num_gt)


def pooled_average_precision(
    detections_by_image: dict[str, list[Detection]],
    ground_truth_by_image: dict[str, list[tuple[int, BoundingBox]]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> PrCurve:
    """AP with detections from all images ranked jointly.

    Every ground-truth image must have a detection entry (possibly an
    empty list); missing entries raise MissingImageEntry. Images are
    processed in sorted pair_id order so score ties resolve
    deterministically.
    """
    missing = sorted(set(ground_truth_by_image) - set(detections_by_image))
    if missing:
        raise MissingImageEntry(
            f"detections missing for annotated image(s): {', '.join(missing)}"
        )
    scores: list[float] = []
    labels: list[bool] = []
    num_gt = 0
    for image_id in sorted(ground_truth_by_image):
        gt_boxes = [box for cls, box in ground_truth_by_image[image_id]
                    if cls == PERSON_CLASS]
        dets = detections_by_image[image_id]
        flags = match_detections(dets, gt_boxes, iou_threshold)
        scores.extend(d.score for d in dets)
        labels.extend(flags)
        num_gt += len(gt_boxes)
    return average_precision(scores, labels, num_gt)


def map_at_50(
    detections_by_image: dict[str, list[Detection]],
    ground_truth_by_image: dict[str, list[tuple[int, BoundingBox]]],
    iou_threshold: float = DEFAULT_IOU_THRESHOLD,
) -> float:
    """Mean average precision for the single pedestrian class.

    With one class the mean over classes is the pooled AP itself.
    """
    return pooled_average_precision(
        detections_by_image, ground_truth_by_image, iou_threshold
    ).ap


# --- detector interchange JSON ---------------------------------------------

def _load_schema() -> dict:
    with resources.files("fuseval.schemas").joinpath("detections.schema.json").open(
        "r", encoding="utf-8"
    ) as fh:
        return json.load(fh)


def load_detection_export(path: str | os.PathLike) -> tuple[dict, dict[str, list[Detection]]]:
    """Read and validate one detector export file.

    Returns (header, images) where header carries the prompt/threshold
    metadata and images maps image_id to its detections.
    """
    path = os.fspath(path)
    if not os.path.isfile(path):
        raise MissingFile(f"no such detections file: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaViolation(f"{path}: invalid JSON ({exc})") from exc
    try:
        jsonschema.validate(doc, _load_schema())
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(f"{path}: {exc.message}") from exc
    images: dict[str, list[Detection]] = {}
    for image_id, raw_dets in doc["images"].items():
        dets = []
        for raw in raw_dets:
            x0, y0, x1, y1 = raw["box"]
            dets.append(Detection(raw["label"], float(raw["score"]),
                                  BoundingBox(x0, y0, x1, y1)))
        images[image_id] = dets
    header = {k: v for k, v in doc.items() if k != "images"}
    return header, images


def split_image_id(image_id: str) -> tuple[str, str]:
    """Split ``<pair_id><modality suffix>`` into (pair_id, method name)."""
    if image_id.endswith(VIS_SUFFIX):
        return image_id[: -len(VIS_SUFFIX)], METHOD_RGB
    if image_id.endswith(IR_SUFFIX):
        return image_id[: -len(IR_SUFFIX)], METHOD_IR
    if FUSED_INFIX in image_id:
        pair_id, algo = image_id.split(FUSED_INFIX, 1)
        if algo:
            return pair_id, algo
    raise SchemaViolation(
        f"image_id {image_id!r} lacks a modality suffix "
        f"(expected *_vis, *_ir, or *_fused_<algo>)"
    )


def detections_by_method(
    images: dict[str, list[Detection]], manifest: DatasetManifest
) -> dict[str, dict[str, list[Detection]]]:
    """Group export entries by method and join them to manifest pairs."""
    known = set(manifest.pair_ids())
    grouped: dict[str, dict[str, list[Detection]]] = {}
    for image_id, dets in images.items():
        pair_id, method = split_image_id(image_id)
        if pair_id not in known:
            raise SchemaViolation(
                f"image_id {image_id!r} references unknown pair_id {pair_id!r}"
            )
        grouped.setdefault(method, {})[pair_id] = dets
    return grouped
