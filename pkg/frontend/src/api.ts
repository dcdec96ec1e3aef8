/** Thin typed client for the enhancement service HTTP API. */

import { PipelineParams, paramsToQuery } from './params.js';

export interface SessionDescriptor {
  id: string;
  n_frames: number;
  width: number;
  height: number;
  pre_contrast: { start: number; end: number };
  bolus_arrival_index: number;
}

export interface QualityReport {
  spread_ratio: number;
  per_frame_totals: number[];
}

export interface RoiBody {
  version: 1;
  rois: { label: string; polygon: [number, number][] }[];
}

export interface MetricsReport {
  contrast_ratio: number;
  lesion_mean: number;
  normal_mean: number;
  evaluation_index: number;
  evaluation_input_window: [number, number];
  spread_ratio: number;
  config: Record<string, unknown>;
  improvement_factor?: number;
  baseline?: {
    definition: string;
    contrast_ratio: number;
    lesion_mean: number;
    normal_mean: number;
  };
}

export type TimeSeries = [number, number][];

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = 'ApiError';
  }
}

async function errorMessage(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { error?: unknown };
    if (typeof body.error === 'string') return body.error;
  } catch {
    // non-JSON error body, fall through to the status line
  }
  return `HTTP ${response.status}`;
}

export class ApiClient {
  private readonly fetchImpl: typeof fetch;

  constructor(
    public readonly baseUrl: string,
    fetchImpl?: typeof fetch,
  ) {
    // bind so a bare global fetch keeps its expected receiver in browsers
    this.fetchImpl = fetchImpl ?? globalThis.fetch.bind(globalThis);
  }

  private url(path: string, query?: URLSearchParams): string {
    const suffix = query ? `?${query.toString()}` : '';
    return `${this.baseUrl}${path}${suffix}`;
  }

  private async request(path: string, init?: RequestInit, query?: URLSearchParams): Promise<Response> {
    const response = await this.fetchImpl(this.url(path, query), init);
    if (!response.ok) {
      throw new ApiError(response.status, await errorMessage(response));
    }
    return response;
  }

  private async json<T>(path: string, init?: RequestInit, query?: URLSearchParams): Promise<T> {
    const response = await this.request(path, init, query);
    return (await response.json()) as T;
  }

  createSession(manifest: string): Promise<SessionDescriptor> {
    return this.json<SessionDescriptor>('/v1/sessions', {
      method: 'POST',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify({ manifest }),
    });
  }

  enhancedFrameUrl(sessionId: string, index: number, params: PipelineParams): string {
    return this.url(`/v1/sessions/${sessionId}/enhanced/${index}`, paramsToQuery(params));
  }

  async enhancedFrame(sessionId: string, index: number, params: PipelineParams): Promise<ArrayBuffer> {
    const response = await this.request(`/v1/sessions/${sessionId}/enhanced/${index}`, undefined, paramsToQuery(params));
    return response.arrayBuffer();
  }

  quality(sessionId: string): Promise<QualityReport> {
    return this.json<QualityReport>(`/v1/sessions/${sessionId}/quality`);
  }

  async putRois(sessionId: string, body: RoiBody): Promise<void> {
    await this.request(`/v1/sessions/${sessionId}/rois`, {
      method: 'PUT',
      headers: { 'content-type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  getRois(sessionId: string): Promise<RoiBody> {
    return this.json<RoiBody>(`/v1/sessions/${sessionId}/rois`);
  }

  metrics(
    sessionId: string,
    params: PipelineParams,
    options?: { evalIndex?: number; baseline?: 'none' | 'raw' },
  ): Promise<MetricsReport> {
    const query = paramsToQuery(params);
    if (options?.evalIndex !== undefined) query.set('eval_index', String(options.evalIndex));
    if (options?.baseline !== undefined) query.set('baseline', options.baseline);
    return this.json<MetricsReport>(`/v1/sessions/${sessionId}/metrics`, undefined, query);
  }

  timeseries(
    sessionId: string,
    params: PipelineParams,
    where: { x: number; y: number } | { roiLabel: string },
  ): Promise<TimeSeries> {
    const query = paramsToQuery(params);
    if ('roiLabel' in where) {
      query.set('roi_label', where.roiLabel);
    } else {
      query.set('x', String(where.x));
      query.set('y', String(where.y));
    }
    return this.json<TimeSeries>(`/v1/sessions/${sessionId}/timeseries`, undefined, query);
  }
}
