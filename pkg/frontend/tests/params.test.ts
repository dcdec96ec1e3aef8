import { describe, expect, test } from 'vitest';
import {
  DEFAULT_PARAMS,
  DEFAULT_STATE,
  Method,
  PipelineParams,
  ViewerState,
  outputCount,
  paramsToQuery,
  queryToParams,
  queryToState,
  rawIndexFor,
  stateToQuery,
} from '../src/params.js';

const METHODS: Method[] = ['stat', 'minip', 'perip', 'none'];

function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) >>> 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

function randomState(rand: () => number): ViewerState {
  return {
    method: METHODS[Math.floor(rand() * METHODS.length)],
    alpha: rand() * 10,
    window: 2 + Math.floor(rand() * 60),
    percentile: 1 + Math.floor(rand() * 100),
    closure: Math.floor(rand() * 8),
    leakage: rand() < 0.5,
    frame: Math.floor(rand() * 500),
    threshold: 1 + rand() * 4,
  };
}

describe('query round trips', () => {
  test('random states survive encode/decode unchanged', () => {
    const rand = mulberry32(42);
    for (let i = 0; i < 200; i++) {
      const state = randomState(rand);
      const back = queryToState(new URLSearchParams(stateToQuery(state).toString()));
      expect(back).toEqual(state);
    }
  });

  test('awkward floats stay bit-exact', () => {
    for (const alpha of [0.1, 0.30000000000000004, 2.7, 1e-9, 1 / 3, 5e-324, 123456.789012345]) {
      const params: PipelineParams = { ...DEFAULT_PARAMS, alpha };
      expect(queryToParams(paramsToQuery(params)).alpha).toBe(alpha);
    }
  });

  test('leakage flag uses the service spelling', () => {
    expect(paramsToQuery({ ...DEFAULT_PARAMS, leakage: true }).get('leakage')).toBe('on');
    expect(paramsToQuery({ ...DEFAULT_PARAMS, leakage: false }).get('leakage')).toBe('off');
  });

  test('empty query yields the defaults', () => {
    expect(queryToParams(new URLSearchParams())).toEqual(DEFAULT_PARAMS);
    expect(queryToState(new URLSearchParams())).toEqual(DEFAULT_STATE);
  });

  test('partial query keeps the other defaults', () => {
    const state = queryToState(new URLSearchParams('alpha=1.5&frame=7'));
    expect(state.alpha).toBe(1.5);
    expect(state.frame).toBe(7);
    expect(state.method).toBe(DEFAULT_STATE.method);
    expect(state.window).toBe(DEFAULT_STATE.window);
    expect(state.threshold).toBe(DEFAULT_STATE.threshold);
  });

  test('garbage is rejected, not silently defaulted', () => {
    expect(() => queryToParams(new URLSearchParams('method=fancy'))).toThrow(/unknown method/);
    expect(() => queryToParams(new URLSearchParams('alpha=abc'))).toThrow(/not a number/);
    expect(() => queryToParams(new URLSearchParams('alpha='))).toThrow(/not a number/);
    expect(() => queryToParams(new URLSearchParams('leakage=maybe'))).toThrow(/on.*off/);
    expect(() => queryToState(new URLSearchParams('frame=x'))).toThrow(/not a number/);
  });
});

describe('index arithmetic', () => {
  test('windowed methods shorten the loop, none does not', () => {
    expect(outputCount(90, { ...DEFAULT_PARAMS, window: 20 })).toBe(71);
    expect(outputCount(90, { ...DEFAULT_PARAMS, method: 'none', window: 20 })).toBe(90);
    expect(outputCount(5, { ...DEFAULT_PARAMS, window: 20 })).toBe(0);
  });

  test('output k is aligned with the last input sample of its window', () => {
    expect(rawIndexFor(0, { ...DEFAULT_PARAMS, window: 20 })).toBe(19);
    expect(rawIndexFor(7, { ...DEFAULT_PARAMS, window: 5 })).toBe(11);
    expect(rawIndexFor(7, { ...DEFAULT_PARAMS, method: 'none' })).toBe(7);
  });
});
