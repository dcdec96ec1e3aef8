import { describe, expect, test } from 'vitest';
import { DEFAULT_STABILITY_THRESHOLD, stabilityLabel } from '../src/badge.js';

describe('stability badge', () => {
  test('default threshold is 1.5, inclusive', () => {
    expect(DEFAULT_STABILITY_THRESHOLD).toBe(1.5);
    expect(stabilityLabel(1.0)).toBe('stable');
    expect(stabilityLabel(1.5)).toBe('stable');
    expect(stabilityLabel(1.5000001)).toBe('unstable');
    expect(stabilityLabel(3.2)).toBe('unstable');
  });

  test('flips when the configured threshold crosses the value', () => {
    const ratio = 1.8;
    expect(stabilityLabel(ratio, 2.0)).toBe('stable');
    expect(stabilityLabel(ratio, 1.7)).toBe('unstable');
    expect(stabilityLabel(ratio, ratio)).toBe('stable');
  });
});
