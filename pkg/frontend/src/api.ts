/**
 * Typed client for the analysis service.
 *
 * Each logical request key owns an AbortController: starting a new request
 * under the same key aborts the previous one, so a stale response can never
 * overwrite newer state.
 */

import type {
  CorrelationDoc,
  DensityDoc,
  DistributionDoc,
  FilterDoc,
  FitDoc,
  RegionsDoc,
  RowsDoc,
  ScatterDoc,
  SummaryDoc,
  UploadDoc,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parseResponse<T>(response: Response): Promise<T> {
  const text = await response.text();
  if (!response.ok) {
    try {
      const doc = JSON.parse(text);
      throw new ApiError(response.status, doc.code ?? "error", doc.message ?? text);
    } catch (err) {
      if (err instanceof ApiError) throw err;
      throw new ApiError(response.status, "error", text || response.statusText);
    }
  }
  return JSON.parse(text) as T;
}

export class ApiClient {
  private readonly controllers = new Map<string, AbortController>();

  constructor(private readonly base: string = "") {}

  private signal(key: string): AbortSignal {
    this.controllers.get(key)?.abort();
    const controller = new AbortController();
    this.controllers.set(key, controller);
    return controller.signal;
  }

  private url(path: string, params?: Record<string, string | number | boolean>): string {
    const query = params
      ? "?" +
        Object.entries(params)
          .map(([k, v]) => `${encodeURIComponent(k)}=${encodeURIComponent(String(v))}`)
          .join("&")
      : "";
    return `${this.base}${path}${query}`;
  }

  private async get<T>(key: string, path: string, params?: Record<string, string | number | boolean>): Promise<T> {
    const response = await fetch(this.url(path, params), { signal: this.signal(key) });
    return parseResponse<T>(response);
  }

  async upload(csv: string): Promise<UploadDoc> {
    const response = await fetch(this.url("/datasets"), {
      method: "POST",
      body: csv,
      headers: { "content-type": "text/csv" },
      signal: this.signal("upload"),
    });
    return parseResponse<UploadDoc>(response);
  }

  summary(id: string): Promise<SummaryDoc> {
    return this.get("summary", `/datasets/${id}/summary`);
  }

  rows(id: string, offset: number, limit: number): Promise<RowsDoc> {
    return this.get("rows", `/datasets/${id}/rows`, { offset, limit });
  }

  distribution(id: string, variable: string, key = "distribution"): Promise<DistributionDoc> {
    return this.get(key, `/datasets/${id}/distribution`, { variable });
  }

  async filter(id: string, clauses: object[]): Promise<FilterDoc> {
    const response = await fetch(this.url(`/datasets/${id}/filter`), {
      method: "POST",
      body: JSON.stringify({ clauses }),
      headers: { "content-type": "application/json" },
      signal: this.signal("filter"),
    });
    return parseResponse<FilterDoc>(response);
  }

  async regression(id: string, predictors: string[]): Promise<FitDoc> {
    const response = await fetch(this.url(`/datasets/${id}/regression`), {
      method: "POST",
      body: JSON.stringify({ predictors }),
      headers: { "content-type": "application/json" },
      signal: this.signal("regression"),
    });
    return parseResponse<FitDoc>(response);
  }

  density(id: string, variable: string, weighted: boolean): Promise<DensityDoc> {
    return this.get("density", `/datasets/${id}/density`, { variable, weighted });
  }

  regions(id: string): Promise<RegionsDoc> {
    return this.get("regions", `/datasets/${id}/regions`);
  }

  scatter3d(id: string, x: string, y: string, z: string): Promise<ScatterDoc> {
    return this.get("scatter3d", `/datasets/${id}/scatter3d`, { x, y, z, max_points: 2000, seed: 0 });
  }

  correlation(id: string, variables: string[]): Promise<CorrelationDoc> {
    return this.get("correlation", `/datasets/${id}/correlation`, { variables: variables.join(",") });
  }

  health(): Promise<{ status: string; version: string }> {
    return this.get("health", "/health");
  }
}
