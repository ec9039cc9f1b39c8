#!/usr/bin/env node
import { writeFileSync } from 'fs';

import { DetectorKind, NoFaceDetectedError, extractLandmarks } from './detector';
import { ImageDecodeError, loadImage } from './image';
import { toLandmarkFile } from './schema';

const USAGE =
  'usage: extract-landmarks IMAGE --out lm.json [--detector auto|ssd|tiny] [--min-confidence N]';

interface CliArgs {
  image: string;
  out: string;
  detector: DetectorKind;
  minConfidence: number;
}

export function parseArgs(argv: string[]): CliArgs {
  let image: string | undefined;
  let out: string | undefined;
  let detector: DetectorKind = 'auto';
  let minConfidence = 0.3;
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === '--out') {
      out = argv[++i];
    } else if (arg === '--detector') {
      const value = argv[++i];
      if (value !== 'auto' && value !== 'ssd' && value !== 'tiny') {
        throw new Error(`unknown detector ${value}`);
      }
      detector = value;
    } else if (arg === '--min-confidence') {
      minConfidence = parseFloat(argv[++i]);
      if (!(minConfidence > 0 && minConfidence < 1)) {
        throw new Error('--min-confidence must lie in (0, 1)');
      }
    } else if (arg === '--help' || arg === '-h') {
      throw new Error(USAGE);
    } else if (arg.startsWith('-')) {
      throw new Error(`unknown flag ${arg}`);
    } else if (!image) {
      image = arg;
    } else {
      throw new Error(`unexpected argument ${arg}`);
    }
  }
  if (!image || !out) throw new Error(USAGE);
  return { image, out, detector, minConfidence };
}

export async function run(argv: string[]): Promise<number> {
  let args: CliArgs;
  try {
    args = parseArgs(argv);
  } catch (err) {
    console.error((err as Error).message);
    return 2;
  }
  try {
    const image = loadImage(args.image);
    const result = await extractLandmarks(
      image,
      args.detector,
      args.minConfidence,
      (msg) => console.warn(`warning: ${msg}`),
    );
    writeFileSync(args.out, JSON.stringify(toLandmarkFile(result), null, 2) + '\n');
    console.log(
      `detector=${result.detector} version=${result.detectorVersion} ` +
        `score=${result.score.toFixed(3)} points=${result.points.length} -> ${args.out}`,
    );
    return 0;
  } catch (err) {
    if (err instanceof NoFaceDetectedError) {
      console.error('NoFaceDetected: no frontal face found in the image');
    } else if (err instanceof ImageDecodeError) {
      console.error(err.message);
    } else {
      console.error(`extraction failed: ${(err as Error).message}`);
    }
    return 1;
  }
}

if (require.main === module) {
  run(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
