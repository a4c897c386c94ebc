"""Pipeline orchestration: weight resolution, two-stage fuzzy evaluation,
provider ranking, and weight-perturbation sensitivity analysis."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from . import ahp, fuzzy
from .ahp import ConsistencyReport, WeightVector
from .fuzzy import MembershipMatrix, MembershipVector
from .model import Hierarchy, Node, Project, RatingScale


class EvaluationError(ValueError):
    pass


class InconsistentMatrixError(EvaluationError):
    """A sibling group's judgment matrix fails the CR < 0.1 check."""

    def __init__(self, group_id: str, report: ConsistencyReport):
        self.group_id = group_id
        self.report = report
        super().__init__(
            f"judgment matrix for group {group_id!r} is inconsistent "
            f"(CR = {report.cr:.4f} >= {ahp.CR_LIMIT}); revise it or pass force=True")


class MissingDataError(EvaluationError):
    pass


@dataclass(frozen=True)
class CriterionResult:
    vector: MembershipVector
    level: str
    score: float


@dataclass(frozen=True)
class AssessmentResult:
    provider_id: str
    goal_vector: MembershipVector
    level: str
    score: float
    per_criterion: dict[str, CriterionResult]
    weights_used: dict[str, float]
    scale: RatingScale
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class Ranking:
    entries: tuple[tuple[str, float, str], ...]  # (provider_id, score, level)

    def order(self) -> tuple[str, ...]:
        return tuple(pid for pid, _, _ in self.entries)


@dataclass(frozen=True)
class SensitivityEntry:
    node_id: str
    delta: float
    scores: dict[str, float]
    ranking: tuple[str, ...]
    rank_changed: bool


@dataclass(frozen=True)
class SensitivityReport:
    base_ranking: tuple[str, ...]
    entries: tuple[SensitivityEntry, ...]
    stable: bool


def group_consistency(project: Project, method: str = "eigenvector",
                      ) -> dict[str, tuple[WeightVector, ConsistencyReport]]:
    """Derived weights and consistency report for every judgment matrix."""
    out = {}
    for group_id, matrix in project.judgment_matrices.items():
        w = ahp.derive_weights(matrix, method)
        out[group_id] = (w, ahp.consistency(matrix, w))
    return out


def resolve_weights(project: Project, method: str = "eigenvector",
                    force: bool = False,
                    ) -> tuple[Project, dict[str, ConsistencyReport], list[str]]:
    """Fill every sibling group's local weights.

    Groups with explicit weights are kept; groups with judgment matrices get
    derived weights; size-1 groups get weight 1. Inconsistent matrices
    (CR >= 0.1) raise unless ``force`` is set, in which case a warning is
    recorded instead.
    """
    reports: dict[str, ConsistencyReport] = {}
    warnings: list[str] = []
    derived: dict[str, WeightVector] = {}
    for group_id, (w, report) in group_consistency(project, method).items():
        reports[group_id] = report
        if not report.consistent:
            if not force:
                raise InconsistentMatrixError(group_id, report)
            warnings.append(
                f"group {group_id!r} evaluated despite CR = {report.cr:.4f} >= {ahp.CR_LIMIT}")
        derived[group_id] = w

    def fill(parent: Node) -> Node:
        kids = parent.children
        if not kids:
            return parent
        if len(kids) == 1:
            new = (kids[0].with_weight(1.0),) if kids[0].local_weight is None else kids
        elif all(k.local_weight is not None for k in kids):
            new = kids
        elif parent.id in derived:
            w = derived[parent.id]
            new = tuple(k.with_weight(wi) for k, wi in zip(kids, w.weights))
        else:
            raise MissingDataError(
                f"group {parent.id!r} has neither explicit weights nor a judgment matrix")
        return replace(parent, children=new)

    hier = project.hierarchy.map_nodes(fill)
    return replace(project, hierarchy=hier), reports, warnings


def _factor_rows(project: Project, provider_id: str, factors: list[Node],
                 ) -> MembershipMatrix:
    """Membership row per factor: ballots when present, measurements otherwise."""
    prov = project.provider(provider_id)
    balloted = {b.factor_id for b in prov.ballots}
    measured = {m.factor_id: m.value for m in prov.measurements}

    ballot_factors = [f.id for f in factors if f.id in balloted]
    ballot_rows: dict[str, MembershipVector] = {}
    if ballot_factors:
        relevant = [b for b in prov.ballots if b.factor_id in set(ballot_factors)]
        m = fuzzy.ballot_membership(relevant, ballot_factors, project.scale)
        ballot_rows = dict(zip(m.factor_ids, m.rows))

    rows = []
    for f in factors:
        if f.id in ballot_rows:
            rows.append(ballot_rows[f.id])
        elif f.id in measured:
            rows.append(fuzzy.threshold_membership(measured[f.id], project.scale))
        else:
            raise MissingDataError(
                f"factor {f.id!r} has neither ballots nor a measurement "
                f"for provider {provider_id!r}")
    return MembershipMatrix(tuple(f.id for f in factors), tuple(rows))


def _group_weights(children: tuple[Node, ...]) -> WeightVector:
    return WeightVector(tuple(k.local_weight for k in children))  # type: ignore[arg-type]


def evaluate_provider(project: Project, provider_id: str,
                      method: str = "eigenvector",
                      operator: str = "weighted-sum",
                      force: bool = False) -> AssessmentResult:
    """Two-stage evaluation: indicators -> criterion vectors -> goal vector,
    then defuzzification and scoring."""
    resolved, _, warnings = resolve_weights(project, method, force)
    scale = resolved.scale
    root = resolved.hierarchy.root

    per_criterion: dict[str, CriterionResult] = {}
    criterion_rows = []
    for criterion in root.children:
        factors = list(criterion.children)
        r = _factor_rows(resolved, provider_id, factors)
        vec = fuzzy.compose(_group_weights(criterion.children), r, operator)
        per_criterion[criterion.id] = CriterionResult(
            vector=vec,
            level=fuzzy.defuzzify_level(vec, scale),
            score=fuzzy.score(vec, scale),
        )
        criterion_rows.append(vec)

    goal_matrix = MembershipMatrix(
        tuple(c.id for c in root.children), tuple(criterion_rows))
    goal_vec = fuzzy.compose(_group_weights(root.children), goal_matrix, operator)

    return AssessmentResult(
        provider_id=provider_id,
        goal_vector=goal_vec,
        level=fuzzy.defuzzify_level(goal_vec, scale),
        score=fuzzy.score(goal_vec, scale),
        per_criterion=per_criterion,
        weights_used=ahp.synthesize_global_weights(resolved.hierarchy),
        scale=scale,
        warnings=tuple(warnings),
    )


def evaluate_flat(project: Project, provider_id: str,
                  method: str = "eigenvector",
                  force: bool = False) -> MembershipVector:
    """Cross-check: compose the full leaf matrix with global leaf weights in
    one step. Agrees with the two-stage weighted-sum path within 1e-9."""
    resolved, _, _ = resolve_weights(project, method, force)
    leaves = list(resolved.hierarchy.leaves())
    globals_ = ahp.synthesize_global_weights(resolved.hierarchy)
    r = _factor_rows(resolved, provider_id, leaves)
    w = WeightVector(tuple(globals_[f.id] for f in leaves))
    return fuzzy.compose(w, r, "weighted-sum")


def evaluate_all(project: Project, method: str = "eigenvector",
                 operator: str = "weighted-sum",
                 force: bool = False) -> list[AssessmentResult]:
    return [evaluate_provider(project, p.provider_id, method, operator, force)
            for p in project.providers]


def rank_providers(results: list[AssessmentResult]) -> Ranking:
    """Sort by score descending; ties broken by provider id ascending."""
    if not results:
        raise EvaluationError("cannot rank zero results")
    scales = {r.scale for r in results}
    if len(scales) > 1:
        raise EvaluationError("results were produced on different rating scales")
    ordered = sorted(results, key=lambda r: (-r.score, r.provider_id))
    return Ranking(tuple((r.provider_id, r.score, r.level) for r in ordered))


def perturb_weights(project: Project, node_id: str, delta: float) -> Project:
    """Scale one node's local weight by (1 + delta) and renormalize its
    siblings so the group still sums to 1. Returns a new project; the
    perturbed group's judgment matrix (if any) is replaced by the explicit
    perturbed weights."""
    hier = project.hierarchy
    parent = hier.parent_of(node_id)
    if parent is None:
        raise EvaluationError("cannot perturb the root node's weight")
    if len(parent.children) < 2:
        raise EvaluationError(f"node {node_id!r} has no siblings to renormalize")

    kids = parent.children
    if any(k.local_weight is None for k in kids):
        matrix = project.judgment_matrices.get(parent.id)
        if matrix is None:
            raise MissingDataError(
                f"group {parent.id!r} has no weights to perturb")
        w = ahp.derive_weights(matrix)
        kids = tuple(k.with_weight(wi) for k, wi in zip(kids, w.weights))

    current = next(k.local_weight for k in kids if k.id == node_id)
    target = current * (1.0 + delta)
    if not (0.0 < target < 1.0):
        raise EvaluationError(
            f"perturbed weight {target!r} for {node_id!r} falls outside (0, 1)")

    if delta == 0.0:
        scaled = kids  # exact fixed point
    else:
        factor = (1.0 - target) / (1.0 - current)
        scaled = tuple(
            k.with_weight(target if k.id == node_id else k.local_weight * factor)
            for k in kids)

    def swap(node: Node) -> Node:
        return replace(node, children=scaled) if node.id == parent.id else node

    matrices = {g: m for g, m in project.judgment_matrices.items() if g != parent.id}
    return replace(project, hierarchy=hier.map_nodes(swap), judgment_matrices=matrices)


def sensitivity_report(project: Project, node_ids: list[str],
                       deltas: list[float],
                       method: str = "eigenvector",
                       operator: str = "weighted-sum",
                       force: bool = False) -> SensitivityReport:
    """Re-rank all providers under every (node, delta) weight perturbation.

    ``stable`` is true iff no perturbation changes the base ranking order.
    """
    base, _, _ = resolve_weights(project, method, force)
    base_ranking = rank_providers(evaluate_all(base, method, operator, force)).order()

    entries = []
    for node_id in node_ids:
        for delta in deltas:
            perturbed = perturb_weights(base, node_id, delta)
            results = evaluate_all(perturbed, method, operator, force)
            ranking = rank_providers(results).order()
            entries.append(SensitivityEntry(
                node_id=node_id,
                delta=delta,
                scores={r.provider_id: r.score for r in results},
                ranking=ranking,
                rank_changed=(ranking != base_ranking),
            ))
    return SensitivityReport(
        base_ranking=base_ranking,
        entries=tuple(entries),
        stable=not any(e.rank_changed for e in entries),
    )
