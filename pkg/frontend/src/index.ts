export { extractLandmarks, initModels, NoFaceDetectedError } from './detector';
export type { DetectorKind, ExtractionResult } from './detector';
export { loadImage, ImageDecodeError } from './image';
export type { RgbImage } from './image';
export { toLandmarkFile, validateLandmarkFile } from './schema';
export type { LandmarkFile } from './schema';
export { run as runCli } from './cli';
