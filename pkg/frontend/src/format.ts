/**
 * Readout formatting. The service owns all pixel math; values shown in the
 * viewer are formatted verbatim from what it returned.
 */

export function formatRatio(value: number): string {
  return value.toFixed(6);
}

export function formatSpread(value: number): string {
  return value.toFixed(4);
}
