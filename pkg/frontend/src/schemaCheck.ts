/**
 * Validate an export file against the interchange contract.
 *
 * Checks the zod schema plus the invariants the schema alone cannot
 * express: box corner ordering, finite coordinates, and the modality
 * suffix convention on image ids. When the source image directory is
 * supplied, boxes are also checked against the image bounds.
 */

import * as fs from 'fs';
import * as path from 'path';

import { loadPngGray } from './png';
import { ID_SUFFIX_PATTERN, exportSchema } from './schema';

export interface CheckResult {
  ok: boolean;
  problems: string[];
}

export function exportSchemaCheck(filePath: string, imagesDir?: string): CheckResult {
  const problems: string[] = [];
  let raw: string;
  try {
    raw = fs.readFileSync(filePath, 'utf-8');
  } catch (err) {
    return { ok: false, problems: [`cannot read ${filePath}: ${err}`] };
  }
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch (err) {
    return { ok: false, problems: [`invalid JSON: ${err}`] };
  }
  const parsed = exportSchema.safeParse(doc);
  if (!parsed.success) {
    for (const issue of parsed.error.issues) {
      problems.push(`${issue.path.join('.')}: ${issue.message}`);
    }
    return { ok: false, problems };
  }

  const { images, prompt } = parsed.data;
  for (const [imageId, detections] of Object.entries(images)) {
    if (!ID_SUFFIX_PATTERN.test(imageId)) {
      problems.push(`image_id ${imageId} lacks a modality suffix (_vis/_ir/_fused_<algo>)`);
    }
    let bounds: { width: number; height: number } | undefined;
    if (imagesDir) {
      const stem = imageId.replace(ID_SUFFIX_PATTERN, '');
      const candidate = path.join(imagesDir, `${stem}.png`);
      const direct = path.join(imagesDir, `${imageId}.png`);
      const found = [direct, candidate].find((p) => fs.existsSync(p));
      if (found) bounds = loadPngGray(found);
    }
    detections.forEach((det, i) => {
      const [x0, y0, x1, y1] = det.box;
      if (![x0, y0, x1, y1].every(Number.isFinite)) {
        problems.push(`${imageId}[${i}]: non-finite box coordinates`);
      } else if (!(x0 < x1 && y0 < y1)) {
        problems.push(`${imageId}[${i}]: degenerate box [${det.box}]`);
      } else if (bounds && (x0 < 0 || y0 < 0 || x1 > bounds.width || y1 > bounds.height)) {
        problems.push(`${imageId}[${i}]: box exceeds ${bounds.width}x${bounds.height} bounds`);
      }
      if (det.label !== prompt) {
        problems.push(`${imageId}[${i}]: label ${det.label} differs from prompt ${prompt}`);
      }
    });
  }
  return { ok: problems.length === 0, problems };
}
