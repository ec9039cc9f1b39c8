import * as path from 'path';
import * as faceapi from '@vladmandic/face-api/dist/face-api.node-wasm.js';

import { RgbImage } from './image';

export type DetectorKind = 'auto' | 'ssd' | 'tiny';

export interface ExtractionResult {
  /** 68 [x, y] points in iBUG order, clamped to image bounds. */
  points: [number, number][];
  width: number;
  height: number;
  detector: string;
  detectorVersion: string;
  score: number;
  facesFound: number;
}

export class NoFaceDetectedError extends Error {
  constructor(message = 'NoFaceDetected') {
    super(message);
  }
}

const MODEL_DIR = path.join(
  path.dirname(require.resolve('@vladmandic/face-api/package.json')),
  'model',
);

// face-api re-exports the tfjs instance it runs on; type it via the real tfjs
// package so backend helpers are visible.
const tf = faceapi.tf as unknown as typeof import('@tensorflow/tfjs');

let ready: Promise<void> | null = null;

/** Load the pretrained weights shipped with the face-api package (once). */
export function initModels(): Promise<void> {
  if (!ready) {
    ready = (async () => {
      await tf.setBackend('cpu');
      await tf.ready();
      await faceapi.nets.ssdMobilenetv1.loadFromDisk(MODEL_DIR);
      await faceapi.nets.tinyFaceDetector.loadFromDisk(MODEL_DIR);
      await faceapi.nets.faceLandmark68Net.loadFromDisk(MODEL_DIR);
    })();
  }
  return ready;
}

function toTensor(image: RgbImage) {
  return tf.tensor3d(image.data, [image.height, image.width, 3], 'float32');
}

async function detectWith(tensor: any, options: any) {
  return faceapi.detectAllFaces(tensor, options).withFaceLandmarks();
}

/**
 * Run the pretrained detector + 68-point landmark model on one image.
 *
 * 'auto' tries the SSD detector first and falls back to the tiny detector,
 * which is more permissive on low-texture frontal faces. When several faces
 * are found the largest box wins (a warning is emitted via the callback).
 */
export async function extractLandmarks(
  image: RgbImage,
  detector: DetectorKind = 'auto',
  minConfidence = 0.3,
  warn: (msg: string) => void = () => {},
): Promise<ExtractionResult> {
  await initModels();
  const tensor = toTensor(image);
  try {
    let detections: any[] = [];
    let used = '';
    if (detector === 'ssd' || detector === 'auto') {
      detections = await detectWith(
        tensor,
        new faceapi.SsdMobilenetv1Options({ minConfidence }),
      );
      used = 'ssd_mobilenetv1';
    }
    if (detections.length === 0 && (detector === 'tiny' || detector === 'auto')) {
      detections = await detectWith(
        tensor,
        new faceapi.TinyFaceDetectorOptions({ inputSize: 224, scoreThreshold: minConfidence }),
      );
      used = 'tiny_face_detector';
    }
    if (detections.length === 0) {
      throw new NoFaceDetectedError();
    }
    if (detections.length > 1) {
      warn(`${detections.length} faces found; keeping the largest box`);
      detections.sort(
        (a, b) => b.detection.box.area - a.detection.box.area,
      );
    }
    const best = detections[0];
    const points = best.landmarks.positions.map((p: { x: number; y: number }) => [
      Math.min(Math.max(p.x, 0), image.width - 1),
      Math.min(Math.max(p.y, 0), image.height - 1),
    ]) as [number, number][];
    return {
      points,
      width: image.width,
      height: image.height,
      detector: `${used}+face_landmark_68`,
      detectorVersion: faceapi.version,
      score: best.detection.score,
      facesFound: detections.length,
    };
  } finally {
    tensor.dispose();
  }
}
