"""Core domain types: rating scales, the evaluation hierarchy, ballots, projects."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING, Iterator, Mapping

if TYPE_CHECKING:
    from .ahp import JudgmentMatrix

WEIGHT_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ScaleLevel:
    label: str
    score: float
    threshold: float


@dataclass(frozen=True)
class RatingScale:
    """Ordered rating levels, best (lowest risk) first.

    Thresholds are the measurement cut-points used by the piecewise-linear
    membership ramps; they must be strictly increasing in level order.
    Lower measured values map to better (lower-risk) levels.
    """

    levels: tuple[ScaleLevel, ...]

    @property
    def n(self) -> int:
        return len(self.levels)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lv.label for lv in self.levels)

    @property
    def scores(self) -> tuple[float, ...]:
        return tuple(lv.score for lv in self.levels)

    @property
    def thresholds(self) -> tuple[float, ...]:
        return tuple(lv.threshold for lv in self.levels)

    def index_of(self, label: str) -> int:
        """Level index for a label, matched case-insensitively."""
        want = label.strip().lower()
        for i, lv in enumerate(self.levels):
            if lv.label.lower() == want:
                return i
        raise KeyError(f"unknown level label {label!r}")

    def problems(self) -> list[str]:
        """Invariant violations, empty when the scale is well formed."""
        out = []
        if len(self.levels) < 2:
            out.append("scale needs at least 2 levels")
            return out
        labels = [lv.label.lower() for lv in self.levels]
        if len(set(labels)) != len(labels):
            out.append("scale labels are not unique")
        thr = self.thresholds
        if any(b <= a for a, b in zip(thr, thr[1:])):
            out.append("scale thresholds are not strictly increasing")
        sc = self.scores
        diffs = [b - a for a, b in zip(sc, sc[1:])]
        if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
            out.append("scale scores are not strictly monotone")
        return out


def default_scale() -> RatingScale:
    """Five-level A..E risk scale, A = no risk (score 5) down to E (score 1).

    Thresholds default to 1..5 so that low measured values land on A.
    """
    labels = ("A", "B", "C", "D", "E")
    return RatingScale(tuple(
        ScaleLevel(label=lab, score=float(5 - i), threshold=float(i + 1))
        for i, lab in enumerate(labels)
    ))


@dataclass(frozen=True)
class Node:
    """One node of the goal / criteria / indicators tree.

    Ids are caller-supplied stable strings; names are display-only.
    ``local_weight`` is the weight within the node's sibling group and is
    absent until derived or explicitly assigned.
    """

    id: str
    name: str
    kind: str  # "goal" | "criterion" | "indicator"
    children: tuple[Node, ...] = ()
    local_weight: float | None = None

    def with_weight(self, w: float) -> Node:
        return replace(self, local_weight=w)


@dataclass(frozen=True)
class Hierarchy:
    root: Node

    def walk(self) -> Iterator[tuple[Node, Node | None]]:
        """Yield (node, parent) pairs in depth-first order."""
        stack: list[tuple[Node, Node | None]] = [(self.root, None)]
        while stack:
            node, parent = stack.pop()
            yield node, parent
            for child in reversed(node.children):
                stack.append((child, node))

    def node(self, node_id: str) -> Node:
        for n, _ in self.walk():
            if n.id == node_id:
                return n
        raise KeyError(f"no node with id {node_id!r}")

    def parent_of(self, node_id: str) -> Node | None:
        for n, parent in self.walk():
            if n.id == node_id:
                return parent
        raise KeyError(f"no node with id {node_id!r}")

    def leaves(self) -> tuple[Node, ...]:
        return tuple(n for n, _ in self.walk() if not n.children)

    def leaf_ids(self) -> set[str]:
        return {n.id for n in self.leaves()}

    def groups(self) -> dict[str, tuple[Node, ...]]:
        """Sibling groups keyed by the parent node id."""
        return {n.id: n.children for n, _ in self.walk() if n.children}

    def map_nodes(self, fn) -> Hierarchy:
        """Rebuild the tree, applying fn to every node bottom-up."""

        def rebuild(node: Node) -> Node:
            kids = tuple(rebuild(c) for c in node.children)
            return fn(replace(node, children=kids))

        return Hierarchy(rebuild(self.root))


@dataclass(frozen=True)
class ExpertBallot:
    """One expert's one-hot rating of one factor (leaf indicator)."""

    expert_id: str
    factor_id: str
    level_index: int


@dataclass(frozen=True)
class Measurement:
    """A measured value for a factor, in the units of the scale thresholds."""

    factor_id: str
    value: float


@dataclass(frozen=True)
class Provider:
    provider_id: str
    ballots: tuple[ExpertBallot, ...] = ()
    measurements: tuple[Measurement, ...] = ()
    # Relative path of the ballots CSV this provider's ballots came from,
    # kept so documents round-trip.
    ballots_ref: str | None = None


@dataclass(frozen=True)
class Project:
    """Immutable container for one assessment: hierarchy, scale, providers,
    and the pairwise judgment matrices keyed by sibling-group id."""

    hierarchy: Hierarchy
    scale: RatingScale
    providers: tuple[Provider, ...] = ()
    judgment_matrices: Mapping[str, "JudgmentMatrix"] = field(default_factory=dict)

    def provider(self, provider_id: str) -> Provider:
        for p in self.providers:
            if p.provider_id == provider_id:
                return p
        raise KeyError(f"unknown provider {provider_id!r}")


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    subject: str  # node / ballot / group the rule was violated on
    message: str

    def __str__(self) -> str:
        return f"[{self.severity}] {self.subject}: {self.message}"


_KIND_CHILD = {"goal": "criterion", "criterion": "indicator"}


def validate_project(project: Project) -> list[Diagnostic]:
    """Check every structural invariant; returns diagnostics, never raises.

    An empty list means the project is well formed. Warnings (e.g. judgment
    entries off the 1..9 comparison scale) do not make a project invalid.
    """
    from .ahp import SAATY_TOL, is_saaty_value

    diags: list[Diagnostic] = []
    err = lambda subject, msg: diags.append(Diagnostic("error", subject, msg))
    warn = lambda subject, msg: diags.append(Diagnostic("warning", subject, msg))

    for msg in project.scale.problems():
        err("scale", msg)

    # -- tree structure ----------------------------------------------------
    hier = project.hierarchy
    seen_ids: set[str] = set()
    for node, parent in hier.walk():
        if node.id in seen_ids:
            err(node.id, "duplicate node id")
        seen_ids.add(node.id)
        if parent is None:
            if node.kind != "goal":
                err(node.id, f"root must have kind 'goal', got {node.kind!r}")
        else:
            expected = _KIND_CHILD.get(parent.kind)
            if expected is None:
                err(node.id, f"{parent.kind!r} node {parent.id!r} cannot have children")
            elif node.kind != expected:
                err(node.id, f"child of {parent.kind!r} must be {expected!r}, got {node.kind!r}")
        if node.kind in _KIND_CHILD and not node.children:
            err(node.id, f"{node.kind} node has no children")
        if node.kind == "indicator" and node.children:
            err(node.id, "indicator nodes must be leaves")
        if node.local_weight is not None and not (0.0 <= node.local_weight <= 1.0):
            err(node.id, f"local_weight {node.local_weight} outside [0, 1]")

    # -- sibling weights / judgment matrices --------------------------------
    for group_id, children in hier.groups().items():
        weights = [c.local_weight for c in children]
        has_matrix = group_id in project.judgment_matrices
        if all(w is not None for w in weights):
            total = sum(weights)  # type: ignore[arg-type]
            if abs(total - 1.0) > WEIGHT_SUM_TOL:
                err(group_id, f"sibling local_weights sum to {total!r}, expected 1")
        elif any(w is not None for w in weights):
            err(group_id, "sibling group has only partial local_weights")
        elif len(children) > 1 and not has_matrix:
            err(group_id, "group has neither a judgment matrix nor explicit local weights")

        if has_matrix:
            m = project.judgment_matrices[group_id]
            if m.order != len(children):
                err(group_id, f"judgment matrix order {m.order} != group size {len(children)}")
            for i in range(m.order):
                for j in range(i + 1, m.order):
                    v = m.entries[i][j]
                    if not is_saaty_value(v, tol=SAATY_TOL):
                        warn(group_id, f"judgment cell ({i},{j})={v!r} is off the 1..9 scale")

    for group_id in project.judgment_matrices:
        if group_id not in hier.groups():
            err(group_id, "judgment matrix references no sibling group")

    # -- providers ----------------------------------------------------------
    leaf_ids = hier.leaf_ids()
    n_levels = project.scale.n
    seen_providers: set[str] = set()
    for prov in project.providers:
        pid = prov.provider_id
        if pid in seen_providers:
            err(pid, "duplicate provider id")
        seen_providers.add(pid)
        seen_ballots: set[tuple[str, str]] = set()
        for b in prov.ballots:
            subject = f"{pid}/{b.expert_id}/{b.factor_id}"
            if b.factor_id not in leaf_ids:
                err(subject, "ballot factor_id does not name a leaf indicator")
            if not (0 <= b.level_index < n_levels):
                err(subject, f"level_index {b.level_index} outside [0, {n_levels})")
            key = (b.expert_id, b.factor_id)
            if key in seen_ballots:
                err(subject, "more than one ballot for this (expert, factor) pair")
            seen_ballots.add(key)
        seen_meas: set[str] = set()
        for msr in prov.measurements:
            subject = f"{pid}/{msr.factor_id}"
            if msr.factor_id not in leaf_ids:
                err(subject, "measurement factor_id does not name a leaf indicator")
            if not math.isfinite(msr.value):
                err(subject, f"measurement value {msr.value!r} is not finite")
            if msr.factor_id in seen_meas:
                err(subject, "duplicate measurement for factor")
            seen_meas.add(msr.factor_id)

    return diags


# The nine assessment criteria of the default cloud-security hierarchy.
# Data protection and access control carry their published indicator sets;
# the remaining criteria get a single pass-through indicator so the full
# pipeline runs end to end.
_DEFAULT_CRITERIA: tuple[tuple[str, str, tuple[tuple[str, str], ...]], ...] = (
    ("data-protection", "Data protection", (
        ("encryption-capability", "Encryption capability"),
        ("backup-mechanism", "Backup mechanism"),
        ("data-isolation", "Data isolation"),
    )),
    ("access-control", "Access control", (
        ("permission-granularity", "Permission granularity"),
        ("audit-log", "Audit log"),
        ("dynamic-policy", "Dynamic policy"),
    )),
    ("identity-authentication", "Identity authentication", ()),
    ("security", "Security", ()),
    ("availability", "Availability", ()),
    ("performance", "Performance", ()),
    ("compliance", "Compliance", ()),
    ("return-on-investment", "Return on investment", ()),
    ("cost-saving", "Cost saving", ()),
)


def default_hierarchy() -> Hierarchy:
    """The shipped cloud-security hierarchy: one goal, nine criteria."""
    criteria = []
    for cid, cname, indicators in _DEFAULT_CRITERIA:
        if indicators:
            kids = tuple(Node(id=iid, name=iname, kind="indicator") for iid, iname in indicators)
        else:
            kids = (Node(id=f"{cid}-overall", name=cname, kind="indicator"),)
        criteria.append(Node(id=cid, name=cname, kind="criterion", children=kids))
    root = Node(id="cloud-security", name="Cloud service security", kind="goal",
                children=tuple(criteria))
    return Hierarchy(root)
