export type Stability = 'stable' | 'unstable';

export const DEFAULT_STABILITY_THRESHOLD = 1.5;

/**
 * Classify a loop by its spread ratio. At or below the threshold the
 * tissue-leakage estimate is trusted; above it the probe moved too much.
 */
export function stabilityLabel(spreadRatio: number, threshold = DEFAULT_STABILITY_THRESHOLD): Stability {
  return spreadRatio <= threshold ? 'stable' : 'unstable';
}
