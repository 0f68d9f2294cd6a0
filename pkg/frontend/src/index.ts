export { iou, nms } from './boxes';
export type { Box, RawDetection } from './boxes';
export {
  DEFAULT_IOU_THRESHOLD,
  DEFAULT_PROMPT,
  DEFAULT_TEXT_THRESHOLD,
  EmptyImageDirError,
  ModelLoadFailureError,
  runDetector,
  serializeExport,
  writeExport,
} from './detector';
export type { RunOptions } from './detector';
export { loadPngGray, writePngGray } from './png';
export type { GrayRaster } from './png';
export { SCHEMA_VERSION, detectionSchema, exportSchema } from './schema';
export type { DetectionRecord, ExportDocument } from './schema';
export { exportSchemaCheck } from './schemaCheck';
export type { CheckResult } from './schemaCheck';
export { BLOB_THRESHOLD, MIN_BLOB_AREA, detectBlobs } from './stub';
