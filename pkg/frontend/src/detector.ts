/**
 * Run a detection backend over every image in a directory and assemble
 * the interchange export.
 *
 * Two backends:
 *
 * - `stub`: the built-in deterministic blob detector (tests, dry runs).
 * - `command`: wraps a locally installed text-prompted detection
 *   pipeline. The configured command is invoked once per image as
 *   `<command> <imagePath> <prompt> <textThreshold> <iouThreshold>` and
 *   must print a JSON array of {label, score, box} records to stdout.
 *
 * Either way the adapter applies the score cutoff (text threshold) and
 * non-maximum suppression (the IoU threshold's role, recorded in the
 * header), so every modality is scored by the identical procedure.
 */

import { execFileSync } from 'child_process';
import * as fs from 'fs';
import * as path from 'path';

import { RawDetection, nms } from './boxes';
import { loadPngGray } from './png';
import { detectBlobs } from './stub';
import { DetectionRecord, ExportDocument, SCHEMA_VERSION, detectionSchema } from './schema';

export class EmptyImageDirError extends Error {}
export class ModelLoadFailureError extends Error {}

export interface RunOptions {
  imagesDir: string;
  prompt?: string;
  textThreshold?: number;
  iouThreshold?: number;
  /** Appended to each file's basename to form the image_id (e.g. "_ir"). */
  suffix?: string;
  backend?: 'stub' | 'command';
  /** Required for the command backend. */
  command?: string[];
}

export const DEFAULT_PROMPT = 'a person';
export const DEFAULT_TEXT_THRESHOLD = 0.3;
export const DEFAULT_IOU_THRESHOLD = 0.5;

function listImages(dir: string): string[] {
  let names: string[];
  try {
    names = fs.readdirSync(dir);
  } catch (err) {
    throw new EmptyImageDirError(`cannot read image directory ${dir}: ${err}`);
  }
  const images = names.filter((n) => n.toLowerCase().endsWith('.png')).sort();
  if (images.length === 0) {
    throw new EmptyImageDirError(`no .png images under ${dir}`);
  }
  return images;
}

function runCommandBackend(
  command: string[],
  imagePath: string,
  prompt: string,
  textThreshold: number,
  iouThreshold: number,
): RawDetection[] {
  const [bin, ...baseArgs] = command;
  let stdout: string;
  try {
    stdout = execFileSync(
      bin,
      [...baseArgs, imagePath, prompt, String(textThreshold), String(iouThreshold)],
      { encoding: 'utf-8' },
    );
  } catch (err) {
    throw new ModelLoadFailureError(`detector command failed on ${imagePath}: ${err}`);
  }
  let parsed: unknown;
  try {
    parsed = JSON.parse(stdout);
  } catch (err) {
    throw new ModelLoadFailureError(
      `detector command printed invalid JSON for ${imagePath}: ${err}`,
    );
  }
  if (!Array.isArray(parsed)) {
    throw new ModelLoadFailureError(`detector output for ${imagePath} is not an array`);
  }
  return parsed.map((raw) => detectionSchema.parse(raw) as RawDetection);
}

export function runDetector(options: RunOptions): ExportDocument {
  const prompt = options.prompt ?? DEFAULT_PROMPT;
  const textThreshold = options.textThreshold ?? DEFAULT_TEXT_THRESHOLD;
  const iouThreshold = options.iouThreshold ?? DEFAULT_IOU_THRESHOLD;
  const suffix = options.suffix ?? '';
  const backend = options.backend ?? 'stub';
  if (backend === 'command' && (!options.command || options.command.length === 0)) {
    throw new ModelLoadFailureError('command backend selected but no command configured');
  }

  const images: Record<string, DetectionRecord[]> = {};
  for (const name of listImages(options.imagesDir)) {
    const imagePath = path.join(options.imagesDir, name);
    let raw: RawDetection[];
    if (backend === 'stub') {
      raw = detectBlobs(loadPngGray(imagePath), prompt);
    } else {
      raw = runCommandBackend(
        options.command as string[], imagePath, prompt, textThreshold, iouThreshold,
      );
    }
    const scored = raw.filter((d) => d.score >= textThreshold);
    const kept = nms(scored, iouThreshold);
    const imageId = path.basename(name, path.extname(name)) + suffix;
    images[imageId] = kept.map((d) => ({
      label: d.label,
      score: d.score,
      box: [d.box[0], d.box[1], d.box[2], d.box[3]],
    }));
  }

  return {
    schema_version: SCHEMA_VERSION,
    prompt,
    text_threshold: textThreshold,
    iou_threshold: iouThreshold,
    iou_threshold_role: 'nms',
    backend,
    images,
  };
}

/** Serialize with a fixed key layout so identical runs are byte-identical. */
export function serializeExport(doc: ExportDocument): string {
  const ordered = {
    schema_version: doc.schema_version,
    prompt: doc.prompt,
    text_threshold: doc.text_threshold,
    iou_threshold: doc.iou_threshold,
    iou_threshold_role: doc.iou_threshold_role,
    backend: doc.backend,
    images: Object.fromEntries(
      Object.keys(doc.images).sort().map((k) => [k, doc.images[k]]),
    ),
  };
  return `${JSON.stringify(ordered, null, 2)}\n`;
}

export function writeExport(doc: ExportDocument, outPath: string): void {
  fs.mkdirSync(path.dirname(outPath), { recursive: true });
  fs.writeFileSync(outPath, serializeExport(doc), 'utf-8');
}
