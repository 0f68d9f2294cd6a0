/** PNG loading for the stub backend (grayscale via BT.601 luma). */

import * as fs from 'fs';
import { PNG } from 'pngjs';

export interface GrayRaster {
  width: number;
  height: number;
  /** Row-major luma values in [0, 255]. */
  data: Float64Array;
}

export function loadPngGray(path: string): GrayRaster {
  const png = PNG.sync.read(fs.readFileSync(path));
  const n = png.width * png.height;
  const gray = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const r = png.data[4 * i];
    const g = png.data[4 * i + 1];
    const b = png.data[4 * i + 2];
    gray[i] = 0.299 * r + 0.587 * g + 0.114 * b;
  }
  return { width: png.width, height: png.height, data: gray };
}

/** Minimal encoder used by tests to build fixtures deterministically. */
export function writePngGray(
  path: string,
  width: number,
  height: number,
  values: ArrayLike<number>,
): void {
  const png = new PNG({ width, height });
  for (let i = 0; i < width * height; i++) {
    const v = Math.max(0, Math.min(255, Math.round(Number(values[i]))));
    png.data[4 * i] = v;
    png.data[4 * i + 1] = v;
    png.data[4 * i + 2] = v;
    png.data[4 * i + 3] = 255;
  }
  fs.writeFileSync(path, PNG.sync.write(png));
}
