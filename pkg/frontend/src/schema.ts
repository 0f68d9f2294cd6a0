/**
 * Interchange JSON schema, version 1.
 *
 * This is the contract shared with the evaluation harness (its copy
 * lives at ../src/fuseval/schemas/detections.schema.json). Image ids
 * are dataset pair ids plus a modality suffix (_vis, _ir, or
 * _fused_<algorithm>); boxes are absolute pixel corners
 * [x_min, y_min, x_max, y_max]; scores live in [0, 1].
 */

import { z } from 'zod';

export const SCHEMA_VERSION = '1';

export const detectionSchema = z.object({
  label: z.string().min(1),
  score: z.number().min(0).max(1),
  box: z.tuple([z.number(), z.number(), z.number(), z.number()]),
});

export const exportSchema = z.object({
  schema_version: z.literal(SCHEMA_VERSION),
  prompt: z.string().min(1),
  text_threshold: z.number().min(0).max(1),
  iou_threshold: z.number().min(0).max(1),
  iou_threshold_role: z.string().optional(),
  backend: z.string().optional(),
  images: z.record(z.string(), z.array(detectionSchema)),
});

export type DetectionRecord = z.infer<typeof detectionSchema>;
export type ExportDocument = z.infer<typeof exportSchema>;

/** Modality suffixes that join image ids back to manifest pair ids. */
export const ID_SUFFIX_PATTERN = /(_vis|_ir|_fused_.+)$/;
