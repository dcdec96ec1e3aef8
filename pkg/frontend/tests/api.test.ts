import { describe, expect, test } from 'vitest';
import { ApiClient, ApiError } from '../src/api.js';
import { DEFAULT_PARAMS } from '../src/params.js';

interface Recorded {
  url: string;
  init?: RequestInit;
}

function clientWith(response: Response): { client: ApiClient; calls: Recorded[] } {
  const calls: Recorded[] = [];
  const fake: typeof fetch = async (input, init) => {
    calls.push({ url: String(input), init });
    return response.clone();
  };
  return { client: new ApiClient('http://svc:8000', fake), calls };
}

function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { 'content-type': 'application/json' },
  });
}

describe('request construction', () => {
  test('createSession posts the manifest path', async () => {
    const { client, calls } = clientWith(
      jsonResponse({
        id: 'abc',
        n_frames: 40,
        width: 48,
        height: 40,
        pre_contrast: { start: 0, end: 8 },
        bolus_arrival_index: 8,
      }),
    );
    const session = await client.createSession('case/manifest.json');
    expect(session.id).toBe('abc');
    expect(calls[0].url).toBe('http://svc:8000/v1/sessions');
    expect(calls[0].init?.method).toBe('POST');
    expect(JSON.parse(String(calls[0].init?.body))).toEqual({ manifest: 'case/manifest.json' });
  });

  test('enhanced frame URL carries every parameter', async () => {
    const { client, calls } = clientWith(new Response(new Uint8Array([1, 2, 3])));
    await client.enhancedFrame('abc', 7, { ...DEFAULT_PARAMS, alpha: 1.25, leakage: false });
    const url = new URL(calls[0].url);
    expect(url.pathname).toBe('/v1/sessions/abc/enhanced/7');
    expect(url.searchParams.get('method')).toBe('stat');
    expect(url.searchParams.get('alpha')).toBe('1.25');
    expect(url.searchParams.get('window')).toBe('20');
    expect(url.searchParams.get('percentile')).toBe('20');
    expect(url.searchParams.get('closure')).toBe('2');
    expect(url.searchParams.get('leakage')).toBe('off');
  });

  test('enhancedFrameUrl matches what enhancedFrame fetches', async () => {
    const { client, calls } = clientWith(new Response(new Uint8Array([0])));
    await client.enhancedFrame('abc', 3, DEFAULT_PARAMS);
    expect(client.enhancedFrameUrl('abc', 3, DEFAULT_PARAMS)).toBe(calls[0].url);
  });

  test('metrics forwards eval index and baseline', async () => {
    const { client, calls } = clientWith(jsonResponse({ contrast_ratio: 2 }));
    await client.metrics('abc', DEFAULT_PARAMS, { evalIndex: 12, baseline: 'raw' });
    const url = new URL(calls[0].url);
    expect(url.pathname).toBe('/v1/sessions/abc/metrics');
    expect(url.searchParams.get('eval_index')).toBe('12');
    expect(url.searchParams.get('baseline')).toBe('raw');
  });

  test('metrics omits optional knobs when unset', async () => {
    const { client, calls } = clientWith(jsonResponse({ contrast_ratio: 2 }));
    await client.metrics('abc', DEFAULT_PARAMS);
    const url = new URL(calls[0].url);
    expect(url.searchParams.has('eval_index')).toBe(false);
    expect(url.searchParams.has('baseline')).toBe(false);
  });

  test('timeseries selects pixel or region, never both', async () => {
    const { client, calls } = clientWith(jsonResponse([[0, 0.5]]));
    await client.timeseries('abc', DEFAULT_PARAMS, { x: 3, y: 4 });
    await client.timeseries('abc', DEFAULT_PARAMS, { roiLabel: 'lesion' });
    const pixel = new URL(calls[0].url);
    expect(pixel.searchParams.get('x')).toBe('3');
    expect(pixel.searchParams.get('y')).toBe('4');
    expect(pixel.searchParams.has('roi_label')).toBe(false);
    const roi = new URL(calls[1].url);
    expect(roi.searchParams.get('roi_label')).toBe('lesion');
    expect(roi.searchParams.has('x')).toBe(false);
  });

  test('putRois sends the body as JSON', async () => {
    const { client, calls } = clientWith(new Response(null, { status: 204 }));
    await client.putRois('abc', {
      version: 1,
      rois: [{ label: 'lesion', polygon: [[0, 0], [4, 0], [2, 3]] }],
    });
    expect(calls[0].init?.method).toBe('PUT');
    const sent = JSON.parse(String(calls[0].init?.body));
    expect(sent.rois[0].polygon).toHaveLength(3);
  });
});

describe('error mapping', () => {
  test('service error bodies become ApiError with the message', async () => {
    const { client } = clientWith(jsonResponse({ error: 'no regions stored' }, 422));
    await expect(client.metrics('abc', DEFAULT_PARAMS)).rejects.toMatchObject({
      name: 'ApiError',
      status: 422,
      message: 'no regions stored',
    });
  });

  test('non-JSON error bodies fall back to the status code', async () => {
    const { client } = clientWith(new Response('boom', { status: 500 }));
    try {
      await client.quality('abc');
      expect.unreachable();
    } catch (err) {
      expect(err).toBeInstanceOf(ApiError);
      expect((err as ApiError).message).toBe('HTTP 500');
    }
  });
});
