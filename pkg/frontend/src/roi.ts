/** Click-to-place polygon editing, kept separate from canvas code for tests. */

import { RoiBody } from './api.js';

export type Point = [number, number];

export class PolygonDraft {
  private points: Point[] = [];

  constructor(public readonly label: string) {}

  add(x: number, y: number): void {
    this.points.push([x, y]);
  }

  undo(): void {
    this.points.pop();
  }

  clear(): void {
    this.points = [];
  }

  get vertices(): readonly Point[] {
    return this.points;
  }

  /** A polygon needs at least three vertices before it can be submitted. */
  get complete(): boolean {
    return this.points.length >= 3;
  }

  get empty(): boolean {
    return this.points.length === 0;
  }
}

/** Drafts are submittable once every started polygon has three vertices. */
export function canSubmit(drafts: readonly PolygonDraft[]): boolean {
  const started = drafts.filter((d) => !d.empty);
  return started.length > 0 && started.every((d) => d.complete);
}

export function roiBody(drafts: readonly PolygonDraft[]): RoiBody {
  const started = drafts.filter((d) => !d.empty);
  if (!canSubmit(drafts)) {
    throw new Error('every region needs at least 3 vertices before submitting');
  }
  return {
    version: 1,
    rois: started.map((d) => ({
      label: d.label,
      polygon: d.vertices.map((p) => [p[0], p[1]] as [number, number]),
    })),
  };
}
