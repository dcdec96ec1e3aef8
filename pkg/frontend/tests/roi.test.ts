import { describe, expect, test } from 'vitest';
import { PolygonDraft, canSubmit, roiBody } from '../src/roi.js';

function draftWith(label: string, points: [number, number][]): PolygonDraft {
  const d = new PolygonDraft(label);
  for (const [x, y] of points) d.add(x, y);
  return d;
}

describe('polygon drafts', () => {
  test('fewer than three vertices blocks submission', () => {
    const d = new PolygonDraft('lesion');
    expect(canSubmit([d])).toBe(false);
    d.add(1, 1);
    expect(d.complete).toBe(false);
    expect(canSubmit([d])).toBe(false);
    d.add(5, 1);
    expect(canSubmit([d])).toBe(false);
    d.add(3, 4);
    expect(d.complete).toBe(true);
    expect(canSubmit([d])).toBe(true);
  });

  test('an untouched second draft does not block a finished first one', () => {
    const lesion = draftWith('lesion', [[0, 0], [4, 0], [2, 3]]);
    const normal = new PolygonDraft('normal');
    expect(canSubmit([lesion, normal])).toBe(true);
  });

  test('a started but incomplete draft blocks everything', () => {
    const lesion = draftWith('lesion', [[0, 0], [4, 0], [2, 3]]);
    const normal = draftWith('normal', [[9, 9]]);
    expect(canSubmit([lesion, normal])).toBe(false);
  });

  test('undo and clear adjust completeness', () => {
    const d = draftWith('lesion', [[0, 0], [4, 0], [2, 3]]);
    d.undo();
    expect(d.complete).toBe(false);
    d.add(2, 3);
    d.clear();
    expect(d.empty).toBe(true);
  });

  test('roiBody emits the versioned wire shape, skipping empty drafts', () => {
    const lesion = draftWith('lesion', [[0, 0], [4, 0], [2, 3]]);
    const normal = new PolygonDraft('normal');
    expect(roiBody([lesion, normal])).toEqual({
      version: 1,
      rois: [{ label: 'lesion', polygon: [[0, 0], [4, 0], [2, 3]] }],
    });
  });

  test('roiBody refuses incomplete drafts', () => {
    const d = draftWith('lesion', [[0, 0], [4, 0]]);
    expect(() => roiBody([d])).toThrow(/3 vertices/);
    expect(() => roiBody([])).toThrow(/3 vertices/);
  });

  test('the emitted polygon is a copy, not a live reference', () => {
    const d = draftWith('lesion', [[0, 0], [4, 0], [2, 3]]);
    const body = roiBody([d]);
    d.add(9, 9);
    expect(body.rois[0].polygon).toHaveLength(3);
  });
});
