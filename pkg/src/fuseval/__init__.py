"""fuseval: evaluation harness for visible-infrared image fusion.

Quality metrics (EN, SD, MI, PSNR, Qabf, SSIM), fusion speed timing,
downstream pedestrian-detection scoring (mAP@0.5), and leaderboard
reporting over manifest-described datasets.
"""

from .detection import (
    BoundingBox,
    Detection,
    PrCurve,
    average_precision,
    iou,
    map_at_50,
    match_detections,
    parse_yolo_annotations,
    pooled_average_precision,
)
from .images import histogram, joint_histogram, load_image, save_image, to_grayscale
from .manifest import DatasetManifest, ImagePair, ManifestEntry, Scenario, parse_manifest
from .metrics import (
    METRIC_NAMES,
    MetricValue,
    SsimParams,
    entropy,
    evaluate_all,
    mutual_information,
    psnr,
    qabf,
    ssim_fusion,
    std_dev,
)
from .registration import CropRect, Homography, load_homography, overlap_crop, warp
from .reporting import aggregate, detection_report, render
from .results import MetricRecord, append_records, read_store
from .timing import PairRef, TimingRecord, TimingSummary, time_fusion

__version__ = "0.1.0"

__all__ = [
    "BoundingBox",
    "CropRect",
    "DatasetManifest",
    "Detection",
    "Homography",
    "ImagePair",
    "ManifestEntry",
    "METRIC_NAMES",
    "MetricRecord",
    "MetricValue",
    "PairRef",
    "PrCurve",
    "Scenario",
    "SsimParams",
    "TimingRecord",
    "TimingSummary",
    "aggregate",
    "append_records",
    "average_precision",
    "detection_report",
    "entropy",
    "evaluate_all",
    "histogram",
    "iou",
    "joint_histogram",
    "load_homography",
    "load_image",
    "map_at_50",
    "match_detections",
    "mutual_information",
    "overlap_crop",
    "parse_manifest",
    "parse_yolo_annotations",
    "pooled_average_precision",
    "psnr",
    "qabf",
    "read_store",
    "render",
    "save_image",
    "ssim_fusion",
    "std_dev",
    "time_fusion",
    "to_grayscale",
    "warp",
]
