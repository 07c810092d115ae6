// Parsing of the bundle files a rater loads: the manifest, the emotion
// probability frames (for the trajectory preview), and WAV duration checks.

import { EMOTION_COORDINATES } from "./emotionMap.js";
import { BundleManifest } from "./model.js";

export class BundleFormatError extends Error {}

export function parseManifest(text: string): BundleManifest {
  let parsed: unknown;
  try {
    parsed = JSON.parse(text);
  } catch (err) {
    throw new BundleFormatError(`manifest is not valid JSON: ${err}`);
  }
  const manifest = parsed as BundleManifest;
  for (const key of ["session_id", "participant_id", "scenario_id", "duration_s", "files"]) {
    if (!(key in (manifest as object))) {
      throw new BundleFormatError(`manifest missing key ${key}`);
    }
  }
  if (!(manifest.duration_s > 0)) {
    throw new BundleFormatError(`duration_s must be positive, got ${manifest.duration_s}`);
  }
  return manifest;
}

export interface TrajectoryPoint {
  tNorm: number;
  x: number;
  y: number;
}

/** Trajectory from raw emotions.csv rows (frame,t_s,<48 probabilities>). */
export function trajectoryFromEmotionsCsv(text: string): TrajectoryPoint[] {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length < 2) return [];
  const header = lines[0].split(",");
  if (header[0] !== "frame" || header[1] !== "t_s") {
    throw new BundleFormatError("emotions header must start with frame,t_s");
  }
  const nameToCoord = new Map(EMOTION_COORDINATES.map(([n, x, y]) => [n, [x, y] as const]));
  const columns: Array<readonly [number, number]> = [];
  for (const name of header.slice(2)) {
    const coord = nameToCoord.get(name);
    if (coord === undefined) {
      throw new BundleFormatError(`unknown emotion column ${name}`);
    }
    columns.push(coord);
  }
  const times: number[] = [];
  const points: Array<[number, number]> = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    if (cells.length !== header.length) {
      throw new BundleFormatError(`row has ${cells.length} cells, expected ${header.length}`);
    }
    const t = Number(cells[1]);
    let x = 0;
    let y = 0;
    for (let i = 0; i < columns.length; i++) {
      const p = Number(cells[i + 2]);
      if (!(p >= 0 && p <= 1)) {
        throw new BundleFormatError(`probability ${cells[i + 2]} outside [0, 1]`);
      }
      x += p * columns[i][0];
      y += p * columns[i][1];
    }
    times.push(t);
    points.push([x, y]);
  }
  const t0 = times[0];
  const span = times[times.length - 1] - t0;
  return points.map(([x, y], k) => ({
    tNorm: span > 0 ? (times[k] - t0) / span : (points.length > 1 ? k / (points.length - 1) : 0),
    x,
    y,
  }));
}

/** Trajectory from a precomputed export (t_norm,x,y columns). */
export function trajectoryFromCsv(text: string): TrajectoryPoint[] {
  const lines = text.split("\n").filter((line) => line.trim().length > 0);
  if (lines.length < 2 || lines[0].trim() !== "t_norm,x,y") {
    throw new BundleFormatError("trajectory header must be t_norm,x,y");
  }
  return lines.slice(1).map((line) => {
    const [tNorm, x, y] = line.split(",").map(Number);
    return { tNorm, x, y };
  });
}

/** Duration of a RIFF WAVE file in seconds; throws on anything unplayable. */
export function wavDuration(bytes: ArrayBuffer): number {
  const view = new DataView(bytes);
  if (bytes.byteLength < 44 ||
      view.getUint32(0, false) !== 0x52494646 || // "RIFF"
      view.getUint32(8, false) !== 0x57415645) { // "WAVE"
    throw new BundleFormatError("not a RIFF WAVE file");
  }
  let offset = 12;
  let byteRate = 0;
  while (offset + 8 <= bytes.byteLength) {
    const chunkId = view.getUint32(offset, false);
    const size = view.getUint32(offset + 4, true);
    if (chunkId === 0x666d7420) { // "fmt "
      byteRate = view.getUint32(offset + 16, true);
    } else if (chunkId === 0x64617461) { // "data"
      if (byteRate <= 0) {
        throw new BundleFormatError("fmt chunk missing before data");
      }
      return size / byteRate;
    }
    offset += 8 + size + (size % 2);
  }
  throw new BundleFormatError("no data chunk found");
}
