import { describe, expect, it } from "vitest";
import { canEvaluate, crBadge, gridCells } from "../src/grid.js";
import type { CellInfo, ConsistencyInfo } from "../src/types.js";

const cells: CellInfo[] = [
  { i: 0, j: 1, value: 3, reciprocal: 1 / 3 },
  { i: 0, j: 2, value: 5, reciprocal: 0.2 },
];

describe("gridCells", () => {
  it("marks the diagonal", () => {
    const grid = gridCells(3, cells);
    for (let k = 0; k < 3; k++) {
      expect(grid[k][k]).toEqual({ kind: "diagonal" });
    }
  });

  it("places judged values in the upper triangle", () => {
    const grid = gridCells(3, cells);
    expect(grid[0][1]).toEqual({ kind: "editable", value: 3 });
    expect(grid[0][2]).toEqual({ kind: "editable", value: 5 });
    expect(grid[1][2]).toEqual({ kind: "editable", value: null });
  });

  it("mirrors the server reciprocals below the diagonal", () => {
    const grid = gridCells(3, cells);
    expect(grid[1][0]).toEqual({ kind: "mirror", value: 1 / 3 });
    expect(grid[2][0]).toEqual({ kind: "mirror", value: 0.2 });
    expect(grid[2][1]).toEqual({ kind: "mirror", value: null });
  });
});

const pass: ConsistencyInfo = {
  lambda_max: 3.0037,
  ci: 0.0018,
  ri: 0.58,
  cr: 0.0032,
  consistent: true,
};
const fail: ConsistencyInfo = { ...pass, cr: 0.45, consistent: false };

describe("crBadge", () => {
  it("reports incomplete groups", () => {
    expect(crBadge(null).state).toBe("incomplete");
    expect(crBadge({ complete: false }).state).toBe("incomplete");
  });

  it("goes green when the server says the matrix is consistent", () => {
    const badge = crBadge({ complete: true, consistency: pass });
    expect(badge.state).toBe("pass");
    expect(badge.text).toBe("CR 0.0032");
  });

  it("goes red above the consistency threshold", () => {
    const badge = crBadge({ complete: true, consistency: fail });
    expect(badge.state).toBe("fail");
    expect(badge.text).toContain("inconsistent");
  });
});

describe("canEvaluate", () => {
  it("requires at least one group", () => {
    expect(canEvaluate([])).toBe(false);
  });

  it("requires every group to be complete", () => {
    expect(
      canEvaluate([
        { group: "a", complete: true, consistency: pass },
        { group: "b", complete: false },
      ]),
    ).toBe(false);
  });

  it("requires every judged group to pass the consistency gate", () => {
    expect(
      canEvaluate([
        { group: "a", complete: true, consistency: pass },
        { group: "b", complete: true, consistency: fail },
      ]),
    ).toBe(false);
  });

  it("accepts explicit-weight groups without a consistency report", () => {
    expect(
      canEvaluate([
        { group: "a", complete: true, consistency: pass },
        { group: "b", complete: true, explicit: true },
      ]),
    ).toBe(true);
  });
});
