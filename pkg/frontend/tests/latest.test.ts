import { describe, expect, test } from 'vitest';
import { LatestGate } from '../src/latest.js';

describe('LatestGate', () => {
  test('only the newest ticket is current', () => {
    const gate = new LatestGate();
    const a = gate.take();
    expect(gate.isCurrent(a)).toBe(true);
    const b = gate.take();
    expect(gate.isCurrent(a)).toBe(false);
    expect(gate.isCurrent(b)).toBe(true);
  });

  test('a stale response arriving after a newer one is rejected', async () => {
    const gate = new LatestGate();
    const applied: string[] = [];

    const request = async (name: string, delayMs: number): Promise<void> => {
      const ticket = gate.take();
      await new Promise((resolve) => setTimeout(resolve, delayMs));
      if (gate.isCurrent(ticket)) applied.push(name);
    };

    // older request resolves after the newer one: it must not be applied
    await Promise.all([request('slow-old', 30), request('fast-new', 1)]);
    expect(applied).toEqual(['fast-new']);
  });

  test('independent gates do not interfere', () => {
    const frames = new LatestGate();
    const metrics = new LatestGate();
    const f = frames.take();
    metrics.take();
    metrics.take();
    expect(frames.isCurrent(f)).toBe(true);
  });
});
