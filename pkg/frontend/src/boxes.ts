/** Box geometry shared by the backends: IoU and non-maximum suppression. */

export type Box = [number, number, number, number]; // x_min, y_min, x_max, y_max

export interface RawDetection {
  label: string;
  score: number;
  box: Box;
}

export function iou(a: Box, b: Box): number {
  const ix = Math.min(a[2], b[2]) - Math.max(a[0], b[0]);
  const iy = Math.min(a[3], b[3]) - Math.max(a[1], b[1]);
  if (ix <= 0 || iy <= 0) return 0;
  const inter = ix * iy;
  const areaA = (a[2] - a[0]) * (a[3] - a[1]);
  const areaB = (b[2] - b[0]) * (b[3] - b[1]);
  return inter / (areaA + areaB - inter);
}

/**
 * Greedy NMS: keep detections in descending score order, dropping any
 * whose IoU with an already kept box exceeds the threshold. Score ties
 * keep input order so results stay deterministic.
 */
export function nms(detections: RawDetection[], iouThreshold: number): RawDetection[] {
  const order = detections
    .map((d, i) => ({ d, i }))
    .sort((a, b) => b.d.score - a.d.score || a.i - b.i);
  const kept: RawDetection[] = [];
  for (const { d } of order) {
    if (kept.every((k) => iou(k.box, d.box) <= iouThreshold)) {
      kept.push(d);
    }
  }
  return kept;
}
