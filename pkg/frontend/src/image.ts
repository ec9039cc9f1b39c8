import { readFileSync } from 'fs';
import { PNG } from 'pngjs';

export interface RgbImage {
  width: number;
  height: number;
  /** Row-major interleaved RGB, values 0-255. */
  data: Float32Array;
}

export class ImageDecodeError extends Error {}

function decodePng(buffer: Buffer): RgbImage {
  const png = PNG.sync.read(buffer);
  const { width, height, data } = png;
  const rgb = new Float32Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    rgb[i * 3] = data[i * 4];
    rgb[i * 3 + 1] = data[i * 4 + 1];
    rgb[i * 3 + 2] = data[i * 4 + 2];
  }
  return { width, height, data: rgb };
}

/** Minimal binary PGM (P5, 8-bit) reader; grayscale is replicated to RGB. */
function decodePgm(buffer: Buffer): RgbImage {
  let pos = 0;
  const nextToken = (): string => {
    while (pos < buffer.length) {
      const ch = buffer[pos];
      if (ch === 0x23) {
        // comment until end of line
        while (pos < buffer.length && buffer[pos] !== 0x0a) pos++;
      } else if (ch === 0x20 || ch === 0x09 || ch === 0x0a || ch === 0x0d) {
        pos++;
      } else {
        break;
      }
    }
    const start = pos;
    while (pos < buffer.length && ![0x20, 0x09, 0x0a, 0x0d].includes(buffer[pos])) pos++;
    return buffer.subarray(start, pos).toString('ascii');
  };

  if (nextToken() !== 'P5') throw new ImageDecodeError('not a binary PGM');
  const width = parseInt(nextToken(), 10);
  const height = parseInt(nextToken(), 10);
  const maxval = parseInt(nextToken(), 10);
  if (!(width > 0 && height > 0) || !(maxval > 0 && maxval < 256)) {
    throw new ImageDecodeError('unsupported PGM header');
  }
  pos++; // single whitespace after maxval
  if (buffer.length - pos < width * height) throw new ImageDecodeError('truncated PGM raster');
  const rgb = new Float32Array(width * height * 3);
  for (let i = 0; i < width * height; i++) {
    const v = (buffer[pos + i] * 255) / maxval;
    rgb[i * 3] = v;
    rgb[i * 3 + 1] = v;
    rgb[i * 3 + 2] = v;
  }
  return { width, height, data: rgb };
}

export function loadImage(path: string): RgbImage {
  let buffer: Buffer;
  try {
    buffer = readFileSync(path);
  } catch (err) {
    throw new ImageDecodeError(`cannot read ${path}: ${(err as Error).message}`);
  }
  const lower = path.toLowerCase();
  try {
    if (lower.endsWith('.pgm')) return decodePgm(buffer);
    return decodePng(buffer);
  } catch (err) {
    if (err instanceof ImageDecodeError) throw err;
    throw new ImageDecodeError(`cannot decode ${path}: ${(err as Error).message}`);
  }
}
