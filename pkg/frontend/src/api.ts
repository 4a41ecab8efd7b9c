/**
 * Typed client for the heatmon HTTP API.
 *
 * The UI is a pure consumer: every number it shows comes straight out of
 * these payloads, never from client-side recomputation.
 */

export type ViewName = "datacenter_services" | "caller_callee";
export type MetricName = "call_volume" | "mean_rt" | "min_rt" | "max_rt" | "std_rt";
export type ModeName = "absolute" | "percent";

export interface FramePayload {
  start: number;
  end: number;
  aggregate: boolean;
  x: string[];
  y: string[];
  values: (number | null)[][];
}

export interface HeatmapResponse {
  spec: {
    view: ViewName;
    metric: MetricName;
    codes: string[] | null;
    mode: ModeName;
    lo: number | null;
    hi: number | null;
    from: number;
    to: number;
    step: number;
  };
  frames: FramePayload[];
}

export interface Catalog {
  data_centers: string[];
  microservices: string[];
  callers: string[];
  callees: string[];
  return_codes: string[];
}

export interface DataRange {
  first_ts: number | null;
  last_ts: number | null;
  base_interval_ms: number;
}

export interface QuerySelection {
  view: ViewName;
  metric: MetricName;
  codes: string[]; // empty = all return codes combined
  mode: ModeName;
  lo: number | null;
  hi: number | null;
  fromMs: number;
  toMs: number;
  stepMs: number;
}

export function heatmapQueryString(selection: QuerySelection): string {
  const params = new URLSearchParams({
    view: selection.view,
    metric: selection.metric,
    mode: selection.mode,
    from: String(selection.fromMs),
    to: String(selection.toMs),
    step: String(selection.stepMs),
  });
  if (selection.codes.length > 0) params.set("codes", selection.codes.join(","));
  if (selection.lo !== null) params.set("lo", String(selection.lo));
  if (selection.hi !== null) params.set("hi", String(selection.hi));
  return params.toString();
}

async function getJson<T>(url: string): Promise<T> {
  const response = await fetch(url);
  if (!response.ok) {
    let detail = response.statusText;
    try {
      const body = await response.json();
      if (body && typeof body.detail === "string") detail = body.detail;
    } catch {
      /* keep statusText */
    }
    throw new Error(`${response.status}: ${detail}`);
  }
  return (await response.json()) as T;
}

export function fetchHeatmap(
  base: string,
  selection: QuerySelection,
): Promise<HeatmapResponse> {
  return getJson(`${base}/api/v1/heatmap?${heatmapQueryString(selection)}`);
}

export function fetchCatalog(base: string, fromMs: number, toMs: number): Promise<Catalog> {
  return getJson(`${base}/api/v1/catalog?from=${fromMs}&to=${toMs}`);
}

export function fetchRange(base: string): Promise<DataRange> {
  return getJson(`${base}/api/v1/range`);
}
