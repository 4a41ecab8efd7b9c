/**
 * Sequential single-hue color scale.
 *
 * The scale is normalized over the whole frame set, not per frame, so a
 * tile keeps its color while the animation plays and magnitudes stay
 * comparable across frames.
 */

import type { FramePayload } from "./api.js";

export interface ValueRange {
  min: number;
  max: number;
}

/** Min/max over every present value in every frame; null when all-absent. */
export function frameSetRange(frames: FramePayload[]): ValueRange | null {
  let min = Infinity;
  let max = -Infinity;
  for (const frame of frames) {
    for (const row of frame.values) {
      for (const value of row) {
        if (value === null) continue;
        if (value < min) min = value;
        if (value > max) max = value;
      }
    }
  }
  if (min === Infinity) return null;
  return { min, max };
}

/** Normalized intensity in [0, 1], monotone in the value. */
export function intensity(value: number, range: ValueRange): number {
  if (range.max === range.min) return 1;
  const t = (value - range.min) / (range.max - range.min);
  return Math.min(1, Math.max(0, t));
}

/** Light-to-deep blue ramp; deeper = larger value. */
export function rampColor(t: number): string {
  const from = { r: 239, g: 246, b: 255 };
  const to = { r: 8, g: 48, b: 107 };
  const r = Math.round(from.r + (to.r - from.r) * t);
  const g = Math.round(from.g + (to.g - from.g) * t);
  const b = Math.round(from.b + (to.b - from.b) * t);
  return `rgb(${r},${g},${b})`;
}

/** Tile fill for a cell value; null means "render as absent". */
export function cellColor(value: number | null, range: ValueRange | null): string | null {
  if (value === null || range === null) return null;
  return rampColor(intensity(value, range));
}
