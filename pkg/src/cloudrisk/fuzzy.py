"""Fuzzy evaluation engine: membership construction from measurements and
expert ballots, composition, normalization, defuzzification, scoring."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .ahp import WeightVector
from .model import ExpertBallot, RatingScale


class FuzzyError(ValueError):
    pass


@dataclass(frozen=True)
class MembershipVector:
    """Degrees of membership in the ordered rating levels; sums to 1."""

    values: tuple[float, ...]

    def __post_init__(self):
        if any(not (-1e-12 <= v <= 1.0 + 1e-12) for v in self.values):
            raise FuzzyError(f"memberships must lie in [0, 1]: {self.values}")
        if abs(sum(self.values) - 1.0) > 1e-9:
            raise FuzzyError(f"memberships must sum to 1, got {sum(self.values)!r}")

    def __len__(self) -> int:
        return len(self.values)

    def to_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


@dataclass(frozen=True)
class MembershipMatrix:
    """Row-stochastic factors x levels matrix, one row per factor."""

    factor_ids: tuple[str, ...]
    rows: tuple[MembershipVector, ...]

    def __post_init__(self):
        if len(self.factor_ids) != len(self.rows):
            raise FuzzyError("factor_ids and rows disagree in length")
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise FuzzyError(f"rows have mixed widths: {sorted(widths)}")

    def to_array(self) -> np.ndarray:
        return np.array([r.values for r in self.rows], dtype=float)


def threshold_membership(x: float, scale: RatingScale) -> MembershipVector:
    """Piecewise-linear memberships of a measured value against the scale
    thresholds.

    Below the first threshold all mass sits on the first level; above the
    last it sits on the last. In between the mass is split linearly between
    the two adjacent levels, so the result always sums to 1 and has at most
    two (adjacent) nonzero components.
    """
    v = scale.thresholds
    n = len(v)
    if any(b <= a for a, b in zip(v, v[1:])):
        raise FuzzyError("scale thresholds must be strictly increasing")
    out = [0.0] * n
    if x <= v[0]:
        out[0] = 1.0
    elif x >= v[-1]:
        out[-1] = 1.0
    else:
        for j in range(n - 1):
            if v[j] < x <= v[j + 1]:
                r = (v[j + 1] - x) / (v[j + 1] - v[j])
                out[j] = r
                out[j + 1] = 1.0 - r
                break
    return MembershipVector(tuple(out))


def ballot_membership(ballots: Iterable[ExpertBallot], factors: Sequence[str],
                      scale: RatingScale) -> MembershipMatrix:
    """Vote-share membership matrix: r_ij = (# experts voting level j on
    factor i) / H, where H is the number of distinct experts."""
    by_factor: dict[str, dict[str, int]] = {f: {} for f in factors}
    for b in ballots:
        if b.factor_id not in by_factor:
            raise FuzzyError(f"ballot references unknown factor {b.factor_id!r}")
        if not (0 <= b.level_index < scale.n):
            raise FuzzyError(f"ballot level_index {b.level_index} outside [0, {scale.n})")
        votes = by_factor[b.factor_id]
        if b.expert_id in votes:
            raise FuzzyError(
                f"duplicate ballot for expert {b.expert_id!r} on factor {b.factor_id!r}")
        votes[b.expert_id] = b.level_index

    expert_sets = [frozenset(v) for v in by_factor.values()]
    for f, experts in zip(factors, expert_sets):
        if not experts:
            raise FuzzyError(f"factor {f!r} has no ballots")
    if len(set(expert_sets)) > 1:
        raise FuzzyError("expert set differs across factors")

    h = len(expert_sets[0])
    rows = []
    for f in factors:
        counts = [0] * scale.n
        for level in by_factor[f].values():
            counts[level] += 1
        rows.append(MembershipVector(tuple(c / h for c in counts)))
    return MembershipMatrix(tuple(factors), tuple(rows))


def compose(weights: WeightVector, matrix: MembershipMatrix,
            operator: str = "weighted-sum") -> MembershipVector:
    """Combine factor memberships into one vector.

    weighted-sum: B_j = sum_i w_i r_ij (stays normalized). max-min:
    B_j = max_i min(w_i, r_ij), renormalized afterwards.
    """
    r = matrix.to_array()
    w = weights.to_array()
    if len(w) != r.shape[0]:
        raise FuzzyError(f"{len(w)} weights for {r.shape[0]} matrix rows")
    if operator == "weighted-sum":
        # Already normalized when rows and weights are; renormalizing here
        # would perturb the exact one-hot-weight case.
        b = w @ r
        return MembershipVector(tuple(float(x) for x in b))
    if operator == "max-min":
        b = np.minimum(w[:, None], r).max(axis=0)
        return normalize([float(x) for x in b])
    raise ValueError(f"unknown composition operator {operator!r}")


def normalize(raw: Sequence[float]) -> MembershipVector:
    """Scale a nonnegative vector to sum to 1."""
    if any(v < 0 for v in raw):
        raise FuzzyError(f"cannot normalize a vector with negative components: {raw}")
    total = sum(raw)
    if total <= 0:
        raise FuzzyError("cannot normalize an all-zero vector")
    return MembershipVector(tuple(v / total for v in raw))


def defuzzify_level(b: MembershipVector, scale: RatingScale) -> str:
    """Label of the maximum-membership level; ties break toward the worse
    (higher-risk) level."""
    best = 0
    for j in range(1, len(b.values)):
        if b.values[j] >= b.values[best]:
            best = j
    return scale.levels[best].label


def score(b: MembershipVector, scale: RatingScale) -> float:
    """Expected numeric score of a membership vector over the level scores."""
    return float(np.dot(b.to_array(), scale.scores))
