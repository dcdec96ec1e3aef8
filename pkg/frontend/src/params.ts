/**
 * Enhancement parameters and their URL encoding.
 *
 * The viewer never computes pixel values; it only carries these settings to
 * the service and back. Every numeric field is serialized with String(),
 * which emits the shortest decimal that parses back to the same float64, so
 * encode/decode is lossless for any finite value.
 */

export type Method = 'stat' | 'minip' | 'perip' | 'none';

export interface PipelineParams {
  method: Method;
  alpha: number;
  window: number;
  percentile: number;
  closure: number;
  leakage: boolean;
}

/** Viewer state that should survive a page reload via the URL. */
export interface ViewerState extends PipelineParams {
  frame: number;
  threshold: number;
}

export const DEFAULT_PARAMS: PipelineParams = {
  method: 'stat',
  alpha: 2.7,
  window: 20,
  percentile: 20,
  closure: 2,
  leakage: true,
};

export const DEFAULT_STATE: ViewerState = {
  ...DEFAULT_PARAMS,
  frame: 0,
  threshold: 1.5,
};

const METHODS: readonly Method[] = ['stat', 'minip', 'perip', 'none'];

export function isMethod(value: string): value is Method {
  return (METHODS as readonly string[]).includes(value);
}

function parseNumber(raw: string, key: string): number {
  const value = Number(raw);
  if (raw.trim() === '' || Number.isNaN(value)) {
    throw new Error(`query parameter "${key}" is not a number: ${raw}`);
  }
  return value;
}

function parseFlag(raw: string, key: string): boolean {
  if (raw === 'on') return true;
  if (raw === 'off') return false;
  throw new Error(`query parameter "${key}" must be "on" or "off": ${raw}`);
}

/** Encode pipeline params the way the service query string expects them. */
export function paramsToQuery(params: PipelineParams): URLSearchParams {
  return new URLSearchParams({
    method: params.method,
    alpha: String(params.alpha),
    window: String(params.window),
    percentile: String(params.percentile),
    closure: String(params.closure),
    leakage: params.leakage ? 'on' : 'off',
  });
}

export function queryToParams(query: URLSearchParams): PipelineParams {
  const out: PipelineParams = { ...DEFAULT_PARAMS };
  const method = query.get('method');
  if (method !== null) {
    if (!isMethod(method)) throw new Error(`unknown method: ${method}`);
    out.method = method;
  }
  const alpha = query.get('alpha');
  if (alpha !== null) out.alpha = parseNumber(alpha, 'alpha');
  const window = query.get('window');
  if (window !== null) out.window = parseNumber(window, 'window');
  const percentile = query.get('percentile');
  if (percentile !== null) out.percentile = parseNumber(percentile, 'percentile');
  const closure = query.get('closure');
  if (closure !== null) out.closure = parseNumber(closure, 'closure');
  const leakage = query.get('leakage');
  if (leakage !== null) out.leakage = parseFlag(leakage, 'leakage');
  return out;
}

/** Full viewer state, bookmarkable. Superset of the service params. */
export function stateToQuery(state: ViewerState): URLSearchParams {
  const query = paramsToQuery(state);
  query.set('frame', String(state.frame));
  query.set('threshold', String(state.threshold));
  return query;
}

export function queryToState(query: URLSearchParams): ViewerState {
  const out: ViewerState = { ...DEFAULT_STATE, ...queryToParams(query) };
  const frame = query.get('frame');
  if (frame !== null) out.frame = parseNumber(frame, 'frame');
  const threshold = query.get('threshold');
  if (threshold !== null) out.threshold = parseNumber(threshold, 'threshold');
  return out;
}

/** Number of output frames a loop of n input frames produces. */
export function outputCount(nFrames: number, params: PipelineParams): number {
  if (params.method === 'none') return nFrames;
  return Math.max(nFrames - params.window + 1, 0);
}

/**
 * Input-frame index that output index k is aligned to: the window covers
 * samples k .. k+w-1, so the matched raw frame is the last one in it.
 */
export function rawIndexFor(outputIndex: number, params: PipelineParams): number {
  if (params.method === 'none') return outputIndex;
  return outputIndex + params.window - 1;
}
