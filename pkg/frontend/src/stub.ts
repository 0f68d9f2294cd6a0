/**
 * Deterministic stand-in detection backend.
 *
 * Real deployments wrap a text-prompted open-set detector (see the
 * command backend in detector.ts). For tests, fixtures, and dry runs,
 * this backend finds bright connected blobs, which is exactly what warm
 * pedestrian targets look like in infrared-style frames. It is pure and
 * deterministic: the same pixels always produce the same boxes, scores,
 * and ordering.
 */

import { Box, RawDetection } from './boxes';
import { GrayRaster } from './png';

/** Luma cutoff separating "hot" pixels from background. */
export const BLOB_THRESHOLD = 160;

/** Components smaller than this many pixels are noise, not targets. */
export const MIN_BLOB_AREA = 9;

interface Component {
  x0: number;
  y0: number;
  x1: number;
  y1: number;
  area: number;
  sum: number;
}

function findComponents(img: GrayRaster): Component[] {
  const { width, height, data } = img;
  const visited = new Uint8Array(width * height);
  const components: Component[] = [];
  const stack: number[] = [];
  for (let start = 0; start < width * height; start++) {
    if (visited[start] || data[start] < BLOB_THRESHOLD) continue;
    const comp: Component = {
      x0: width, y0: height, x1: -1, y1: -1, area: 0, sum: 0,
    };
    visited[start] = 1;
    stack.push(start);
    while (stack.length > 0) {
      const idx = stack.pop() as number;
      const x = idx % width;
      const y = (idx - x) / width;
      comp.x0 = Math.min(comp.x0, x);
      comp.y0 = Math.min(comp.y0, y);
      comp.x1 = Math.max(comp.x1, x);
      comp.y1 = Math.max(comp.y1, y);
      comp.area += 1;
      comp.sum += data[idx];
      const neighbors = [
        x > 0 ? idx - 1 : -1,
        x < width - 1 ? idx + 1 : -1,
        y > 0 ? idx - width : -1,
        y < height - 1 ? idx + width : -1,
      ];
      for (const n of neighbors) {
        if (n >= 0 && !visited[n] && data[n] >= BLOB_THRESHOLD) {
          visited[n] = 1;
          stack.push(n);
        }
      }
    }
    components.push(comp);
  }
  return components;
}

function blobScore(comp: Component): number {
  // brighter blobs score higher; quantized so serialization is stable
  const meanIntensity = comp.sum / comp.area;
  const score = 0.5 + 0.5 * (meanIntensity - BLOB_THRESHOLD) / (255 - BLOB_THRESHOLD);
  return Math.round(Math.min(0.99, Math.max(0, score)) * 10000) / 10000;
}

export function detectBlobs(img: GrayRaster, prompt: string): RawDetection[] {
  const detections: RawDetection[] = [];
  for (const comp of findComponents(img)) {
    if (comp.area < MIN_BLOB_AREA) continue;
    const box: Box = [comp.x0, comp.y0, comp.x1 + 1, comp.y1 + 1];
    detections.push({ label: prompt, score: blobScore(comp), box });
  }
  detections.sort(
    (a, b) => b.score - a.score || a.box[0] - b.box[0] || a.box[1] - b.box[1],
  );
  return detections;
}
