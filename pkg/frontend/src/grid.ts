/**
 * Pure model for the pairwise comparison grid. Upper-triangle cells are
 * editable; lower-triangle cells only mirror the reciprocal values the server
 * reported, so the client never computes a number itself.
 */

import type { CellInfo, ConsistencyInfo, GroupFeedback } from "./types.js";

export type GridCell =
  | { kind: "diagonal" }
  | { kind: "editable"; value: number | null }
  | { kind: "mirror"; value: number | null };

/** Lay out an order-n grid from the server's cell list. */
export function gridCells(order: number, cells: CellInfo[]): GridCell[][] {
  const upper = new Map<string, number>();
  const lower = new Map<string, number>();
  for (const c of cells) {
    upper.set(`${c.i},${c.j}`, c.value);
    lower.set(`${c.j},${c.i}`, c.reciprocal);
  }
  const rows: GridCell[][] = [];
  for (let i = 0; i < order; i++) {
    const row: GridCell[] = [];
    for (let j = 0; j < order; j++) {
      if (i === j) {
        row.push({ kind: "diagonal" });
      } else if (i < j) {
        row.push({ kind: "editable", value: upper.get(`${i},${j}`) ?? null });
      } else {
        row.push({ kind: "mirror", value: lower.get(`${i},${j}`) ?? null });
      }
    }
    rows.push(row);
  }
  return rows;
}

export interface CrBadge {
  state: "incomplete" | "pass" | "fail";
  text: string;
}

/** Badge text and colour class for a group's latest server feedback. */
export function crBadge(feedback: Pick<GroupFeedback, "complete" | "consistency"> | null): CrBadge {
  if (!feedback || !feedback.complete || !feedback.consistency) {
    return { state: "incomplete", text: "incomplete" };
  }
  const c = feedback.consistency;
  const text = `CR ${c.cr.toFixed(4)}`;
  return c.consistent
    ? { state: "pass", text }
    : { state: "fail", text: `${text} (inconsistent)` };
}

export interface GroupStatus {
  group: string;
  complete: boolean;
  consistency?: ConsistencyInfo;
  /** True when the document supplied explicit weights instead of judgments. */
  explicit?: boolean;
}

/**
 * Evaluation is allowed only when every weight group is complete and every
 * judged group passes the consistency gate. Explicit-weight groups have no
 * consistency ratio and count as acceptable when complete.
 */
export function canEvaluate(groups: GroupStatus[]): boolean {
  if (groups.length === 0) {
    return false;
  }
  return groups.every(
    (g) =>
      g.complete && (g.explicit === true || g.consistency?.consistent === true),
  );
}
