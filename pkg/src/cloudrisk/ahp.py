"""Pairwise-comparison engine: judgment matrices, weight derivation,
consistency validation, and global-weight synthesis."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .model import Hierarchy, Node

# Random consistency index for matrix orders 1..15 (standard Saaty table).
RI_TABLE = (0.0, 0.0, 0.58, 0.90, 1.12, 1.24, 1.32, 1.41, 1.45, 1.49,
            1.51, 1.48, 1.56, 1.57, 1.59)
MAX_ORDER = len(RI_TABLE)

CR_LIMIT = 0.1
RECIPROCAL_TOL = 1e-12
SAATY_TOL = 1e-9

POWER_ITER_TOL = 1e-12
POWER_ITER_CAP = 10_000

_SAATY = tuple(float(k) for k in range(1, 10)) + tuple(1.0 / k for k in range(2, 10))


class MatrixError(ValueError):
    """Malformed judgment matrix or judgment list."""


class ConvergenceError(RuntimeError):
    """Power iteration failed to reach a fixed point within the cap."""


def is_saaty_value(v: float, tol: float = SAATY_TOL) -> bool:
    return any(abs(v - s) <= tol for s in _SAATY)


@dataclass(frozen=True)
class JudgmentMatrix:
    """Positive reciprocal pairwise-comparison matrix with unit diagonal."""

    entries: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        n = len(self.entries)
        if n < 1 or any(len(row) != n for row in self.entries):
            raise MatrixError("judgment matrix must be square and non-empty")
        for i in range(n):
            if self.entries[i][i] != 1.0:
                raise MatrixError(f"diagonal entry ({i},{i}) must be exactly 1")
            for j in range(n):
                v = self.entries[i][j]
                if not (v > 0.0):
                    raise MatrixError(f"entry ({i},{j})={v!r} must be strictly positive")
                if abs(v * self.entries[j][i] - 1.0) > RECIPROCAL_TOL:
                    raise MatrixError(
                        f"entries ({i},{j}) and ({j},{i}) are not reciprocal within {RECIPROCAL_TOL}")

    @property
    def order(self) -> int:
        return len(self.entries)

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=float)

    def upper_cells(self) -> list[tuple[int, int, float]]:
        return [(i, j, self.entries[i][j])
                for i in range(self.order) for j in range(i + 1, self.order)]


def build_matrix(order: int, upper_judgments: list[tuple[int, int, float]]) -> JudgmentMatrix:
    """Build a reciprocal matrix from upper-triangle Saaty judgments.

    Every cell (i, j) with i < j must be supplied exactly once, with a value
    in {1..9} or a reciprocal thereof. The lower triangle is filled with
    exact reciprocals so reciprocity holds by construction.
    """
    if order < 1:
        raise MatrixError(f"order must be >= 1, got {order}")
    grid: list[list[Fraction | None]] = [[None] * order for _ in range(order)]
    for i in range(order):
        grid[i][i] = Fraction(1)
    for i, j, value in upper_judgments:
        if not (0 <= i < j < order):
            raise MatrixError(f"cell ({i},{j}) outside the upper triangle of an order-{order} matrix")
        if not (value > 0):
            raise MatrixError(f"cell ({i},{j}): value {value!r} must be positive")
        if not is_saaty_value(value):
            raise MatrixError(f"cell ({i},{j}): value {value!r} is not on the 1..9 comparison scale")
        if grid[i][j] is not None:
            raise MatrixError(f"cell ({i},{j}) supplied more than once")
        frac = Fraction(value).limit_denominator(9)
        grid[i][j] = frac
        grid[j][i] = 1 / frac
    missing = [(i, j) for i in range(order) for j in range(i + 1, order) if grid[i][j] is None]
    if missing:
        raise MatrixError(f"missing judgment cells: {missing}")
    return JudgmentMatrix(tuple(tuple(float(v) for v in row) for row in grid))  # type: ignore[union-attr]


def matrix_from_rows(rows: list[list[float]]) -> JudgmentMatrix:
    """Load a raw positive reciprocal matrix (entries need not be on the 1..9 scale)."""
    return JudgmentMatrix(tuple(tuple(float(v) for v in row) for row in rows))


@dataclass(frozen=True)
class WeightVector:
    weights: tuple[float, ...]

    def __post_init__(self):
        if not self.weights:
            raise ValueError("empty weight vector")
        if any(not (0.0 < w <= 1.0) for w in self.weights):
            raise ValueError(f"weights must lie in (0, 1]: {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {sum(self.weights)!r}")

    def __len__(self) -> int:
        return len(self.weights)

    def to_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=float)


@dataclass(frozen=True)
class ConsistencyReport:
    lambda_max: float
    ci: float
    ri: float
    cr: float
    consistent: bool


def derive_weights(matrix: JudgmentMatrix, method: str = "eigenvector") -> WeightVector:
    """Priority weights of a judgment matrix.

    ``eigenvector`` runs power iteration to the normalized principal
    eigenvector; ``geometric-mean`` normalizes the row geometric means.
    The two agree for perfectly consistent matrices.
    """
    a = matrix.to_array()
    n = matrix.order
    if method == "eigenvector":
        w = np.full(n, 1.0 / n)
        for _ in range(POWER_ITER_CAP):
            nxt = a @ w
            nxt /= nxt.sum()
            if np.max(np.abs(nxt - w)) < POWER_ITER_TOL:
                w = nxt
                break
            w = nxt
        else:
            raise ConvergenceError(
                f"power iteration did not converge in {POWER_ITER_CAP} steps")
    elif method == "geometric-mean":
        w = np.exp(np.log(a).mean(axis=1))
        w /= w.sum()
    else:
        raise ValueError(f"unknown weight derivation method {method!r}")
    # Guard against float drift breaking the sum-to-one invariant.
    w = w / w.sum()
    return WeightVector(tuple(float(x) for x in w))


def lambda_max(matrix: JudgmentMatrix, weights: WeightVector) -> float:
    """Principal-eigenvalue estimate: mean over i of (A w)_i / w_i."""
    if len(weights) != matrix.order:
        raise ValueError(
            f"weight vector length {len(weights)} != matrix order {matrix.order}")
    a = matrix.to_array()
    w = weights.to_array()
    return float(np.mean((a @ w) / w))


def consistency(matrix: JudgmentMatrix, weights: WeightVector | None = None) -> ConsistencyReport:
    """CI / CR consistency check. CR < 0.1 passes; orders 1 and 2 are
    consistent by construction."""
    n = matrix.order
    if n > MAX_ORDER:
        raise MatrixError(f"matrix order {n} exceeds the random-index table bound {MAX_ORDER}")
    if weights is None:
        weights = derive_weights(matrix)
    lm = lambda_max(matrix, weights)
    ci = (lm - n) / (n - 1) if n >= 2 else 0.0
    ri = RI_TABLE[n - 1]
    cr = ci / ri if n >= 3 else 0.0
    return ConsistencyReport(lambda_max=lm, ci=ci, ri=ri, cr=cr,
                             consistent=(cr < CR_LIMIT))


def synthesize_global_weights(hierarchy: Hierarchy) -> dict[str, float]:
    """Global weight of every node: product of local weights down from the
    root. The root gets 1; a group of size 1 defaults to local weight 1."""
    globals_: dict[str, float] = {}

    def descend(node: Node, acc: float) -> None:
        globals_[node.id] = acc
        for child in node.children:
            lw = child.local_weight
            if lw is None:
                if len(node.children) == 1:
                    lw = 1.0
                else:
                    raise ValueError(f"node {child.id!r} has no local weight")
            descend(child, acc * lw)

    descend(hierarchy.root, 1.0)
    return globals_
