/** Pure model for the sensitivity panel. */

import type { SensitivityEntry, SensitivityResponse } from "./types.js";

export interface SliderState {
  nodeId: string;
  /** Relative perturbation, e.g. -0.10 .. +0.10. */
  delta: number;
}

export interface SensitivityRequest {
  nodes: string[];
  deltas: number[];
}

/**
 * Turn the slider states into one request. Sliders resting at zero are
 * dropped; the remaining nodes share the distinct set of nonzero deltas.
 */
export function buildRequest(sliders: SliderState[]): SensitivityRequest | null {
  const active = sliders.filter((s) => s.delta !== 0);
  if (active.length === 0) {
    return null;
  }
  const nodes = [...new Set(active.map((s) => s.nodeId))];
  const deltas = [...new Set(active.map((s) => s.delta))].sort((a, b) => a - b);
  return { nodes, deltas };
}

export interface FlipSummary {
  stable: boolean;
  flips: { nodeId: string; delta: number; ranking: string[] }[];
}

/** Collect the perturbations that changed the ranking. */
export function flipSummary(resp: SensitivityResponse): FlipSummary {
  const flips = resp.entries
    .filter((e) => e.rank_changed)
    .map((e) => ({ nodeId: e.node_id, delta: e.delta, ranking: e.ranking }));
  return { stable: resp.stable, flips };
}

/** Entry lookup for rendering one slider's current outcome. */
export function entryFor(
  resp: SensitivityResponse,
  nodeId: string,
  delta: number,
): SensitivityEntry | null {
  return (
    resp.entries.find(
      (e) => e.node_id === nodeId && Math.abs(e.delta - delta) < 1e-12,
    ) ?? null
  );
}

/** "+10%" / "-10%" label for a slider position. */
export function deltaLabel(delta: number): string {
  const pct = (delta * 100).toFixed(0);
  return delta > 0 ? `+${pct}%` : `${pct}%`;
}
