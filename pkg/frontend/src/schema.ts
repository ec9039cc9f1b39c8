import { ExtractionResult } from './detector';

/** Landmark file layout consumed by the scoring toolkit. */
export interface LandmarkFile {
  image_width: number;
  image_height: number;
  points: [number, number][];
}

export function toLandmarkFile(result: ExtractionResult): LandmarkFile {
  return {
    image_width: result.width,
    image_height: result.height,
    points: result.points,
  };
}

/** Validate an object against the landmark schema; returns problems found. */
export function validateLandmarkFile(payload: unknown): string[] {
  const problems: string[] = [];
  if (typeof payload !== 'object' || payload === null) {
    return ['payload is not an object'];
  }
  const obj = payload as Record<string, unknown>;
  if (!Number.isInteger(obj.image_width) || (obj.image_width as number) <= 0) {
    problems.push('image_width must be a positive integer');
  }
  if (!Number.isInteger(obj.image_height) || (obj.image_height as number) <= 0) {
    problems.push('image_height must be a positive integer');
  }
  if (!Array.isArray(obj.points)) {
    problems.push('points must be an array');
    return problems;
  }
  if (obj.points.length !== 68) {
    problems.push(`expected 68 points, found ${obj.points.length}`);
  }
  const w = obj.image_width as number;
  const h = obj.image_height as number;
  obj.points.forEach((entry, i) => {
    if (!Array.isArray(entry) || entry.length !== 2) {
      problems.push(`point ${i} is not an [x, y] pair`);
      return;
    }
    const [x, y] = entry as [number, number];
    if (typeof x !== 'number' || typeof y !== 'number' || !isFinite(x) || !isFinite(y)) {
      problems.push(`point ${i} has non-finite coordinates`);
    } else if (x < 0 || y < 0 || x >= w || y >= h) {
      problems.push(`point ${i} (${x}, ${y}) is outside the image bounds`);
    }
  });
  return problems;
}
