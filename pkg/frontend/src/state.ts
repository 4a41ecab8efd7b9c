/**
 * View state rules and request sequencing.
 *
 * Control combinations that the API would reject are made unselectable
 * here (percent mode needs call_volume plus at least one return code),
 * and stale heatmap responses are discarded by last-issued-wins
 * sequencing so overlapping fetches can never paint old data.
 */

import type { QuerySelection } from "./api.js";

/** Percent mode is only meaningful for call volume with a code filter. */
export function canUsePercent(selection: Pick<QuerySelection, "metric" | "codes">): boolean {
  return selection.metric === "call_volume" && selection.codes.length > 0;
}

/** Coerce a selection into an API-valid one (drops an illegal percent mode). */
export function normalizeSelection(selection: QuerySelection): QuerySelection {
  if (selection.mode === "percent" && !canUsePercent(selection)) {
    return { ...selection, mode: "absolute" };
  }
  return selection;
}

/** Last-issued-wins ticket counter for in-flight requests. */
export class RequestSequencer {
  private issued = 0;
  private latestApplied = 0;

  issue(): number {
    this.issued += 1;
    return this.issued;
  }

  /** True when this ticket is newer than anything applied so far. */
  accept(ticket: number): boolean {
    if (ticket < this.issued) return false; // a newer request was issued
    if (ticket <= this.latestApplied) return false;
    this.latestApplied = ticket;
    return true;
  }
}

export function defaultWindow(
  firstTs: number | null,
  lastTs: number | null,
  baseIntervalMs: number,
): { fromMs: number; toMs: number; stepMs: number } {
  if (firstTs === null || lastTs === null) {
    return { fromMs: 0, toMs: 60 * baseIntervalMs, stepMs: baseIntervalMs };
  }
  const end = lastTs + baseIntervalMs;
  const span = Math.max(baseIntervalMs, end - firstTs);
  // Aim for roughly 24 animation frames, snapped to whole base intervals.
  const rawStep = Math.max(baseIntervalMs, Math.ceil(span / 24 / baseIntervalMs) * baseIntervalMs);
  const alignedFrom = Math.floor(firstTs / rawStep) * rawStep;
  const alignedTo = Math.ceil(end / rawStep) * rawStep;
  return { fromMs: alignedFrom, toMs: alignedTo, stepMs: rawStep };
}
