/** Pure presentation helpers for the results panel. */

import type { EvaluationReport, RankingEntry } from "./types.js";

/** "C > A > B" summary line. */
export function rankingLine(entries: RankingEntry[]): string {
  return entries.map((e) => e.provider_id).join(" > ");
}

export interface BarSegment {
  label: string;
  value: number;
  /** Width as a CSS percentage string, e.g. "66.0%". */
  width: string;
}

/** Membership vector rendered as horizontal bar segments. */
export function membershipBars(
  labels: string[],
  values: number[],
): BarSegment[] {
  return values.map((v, k) => ({
    label: labels[k] ?? `#${k}`,
    value: v,
    width: `${(v * 100).toFixed(1)}%`,
  }));
}

export interface ResultRow {
  providerId: string;
  rank: number;
  score: string;
  level: string;
  goalVector: number[];
}

/** Rows for the ranking table, in ranked order. */
export function resultRows(report: EvaluationReport): ResultRow[] {
  const byId = new Map(report.results.map((r) => [r.provider_id, r]));
  return report.ranking.map((entry, idx) => ({
    providerId: entry.provider_id,
    rank: idx + 1,
    score: entry.score.toFixed(4),
    level: entry.level,
    goalVector: byId.get(entry.provider_id)?.goal_vector ?? [],
  }));
}
