/**
 * Tooltip content for a hovered tile.
 *
 * The value shown is exactly the API payload value for that cell; absent
 * cells still name their coordinates but read "no data".
 */

import type { FramePayload } from "./api.js";

export interface TooltipContent {
  xId: string;
  yId: string;
  value: number | null;
  text: string;
}

export function formatValue(value: number | null): string {
  if (value === null) return "no data";
  if (Number.isInteger(value)) return String(value);
  return value.toFixed(3);
}

export function tooltipFor(
  frame: FramePayload,
  xi: number,
  yi: number,
): TooltipContent | null {
  if (yi < 0 || yi >= frame.y.length || xi < 0 || xi >= frame.x.length) {
    return null;
  }
  const value = frame.values[yi][xi];
  const xId = frame.x[xi];
  const yId = frame.y[yi];
  return {
    xId,
    yId,
    value,
    text: `${formatValue(value)} @ (x: ${xId}, y: ${yId})`,
  };
}
