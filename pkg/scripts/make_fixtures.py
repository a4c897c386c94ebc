#!/usr/bin/env python3
"""Generate the golden fixture projects and ballot files under
src/cloudrisk/data/.

The cloud fixture's ballots are synthetic: five experts vote per indicator,
with per-provider vote profiles drawn by a seeded RNG so that the known
qualitative outcome holds (ranking C > A > B, C and A at level A, B at
level B, ranking stable under +/-10 percent weight perturbation of the
data-protection and access-control criteria). The script verifies all of
that before writing, so regenerating with the same seed is reproducible
and regenerating with a different seed fails loudly if the outcome drifts.

Run from the repo root:  python scripts/make_fixtures.py
"""

from __future__ import annotations

import random
from dataclasses import replace
from pathlib import Path

from cloudrisk import (ExpertBallot, Hierarchy, Node, Project, Provider,
                       build_matrix, default_hierarchy, default_scale,
                       emit_ballots_csv, emit_project, evaluate_all,
                       rank_providers, sensitivity_report, validate_project)

DATA_DIR = Path(__file__).resolve().parent.parent / "src" / "cloudrisk" / "data"

SEED = 7

CRITERION_WEIGHTS = {
    "data-protection": 0.35,
    "access-control": 0.20,
    "identity-authentication": 0.09,
    "security": 0.08,
    "availability": 0.07,
    "performance": 0.07,
    "compliance": 0.06,
    "return-on-investment": 0.04,
    "cost-saving": 0.04,
}

ACCESS_CONTROL_WEIGHTS = {
    "permission-granularity": 0.5,
    "audit-log": 0.3,
    "dynamic-policy": 0.2,
}

EXPERTS = ["e1", "e2", "e3", "e4", "e5"]

# Per-provider vote profiles: counts of votes per level (A..E) for one
# factor. A profile is picked per factor by the seeded RNG.
PROFILES = {
    "C": [(5, 0, 0, 0, 0), (5, 0, 0, 0, 0), (4, 1, 0, 0, 0)],
    "A": [(3, 2, 0, 0, 0), (3, 2, 0, 0, 0), (4, 1, 0, 0, 0)],
    "B": [(1, 3, 1, 0, 0), (0, 4, 1, 0, 0), (2, 3, 0, 0, 0)],
}


def weighted_hierarchy() -> Hierarchy:
    def assign(node: Node) -> Node:
        w = CRITERION_WEIGHTS.get(node.id, ACCESS_CONTROL_WEIGHTS.get(node.id))
        return replace(node, local_weight=w) if w is not None else node

    return default_hierarchy().map_nodes(assign)


def votes_to_ballots(counts: tuple[int, ...], factor_id: str) -> list[ExpertBallot]:
    levels = [lv for lv, c in enumerate(counts) for _ in range(c)]
    assert len(levels) == len(EXPERTS)
    return [ExpertBallot(expert_id=e, factor_id=factor_id, level_index=lv)
            for e, lv in zip(EXPERTS, levels)]


def make_cloud_project() -> Project:
    rng = random.Random(SEED)
    hier = weighted_hierarchy()
    factors = [n.id for n in hier.leaves()]

    providers = []
    for pid in ("A", "B", "C"):
        ballots: list[ExpertBallot] = []
        for factor in factors:
            profile = rng.choice(PROFILES[pid])
            ballots.extend(votes_to_ballots(profile, factor))
        providers.append(Provider(provider_id=pid, ballots=tuple(ballots),
                                  ballots_ref="cloud_ballots.csv"))

    matrix = build_matrix(3, [(0, 1, 3.0), (0, 2, 5.0), (1, 2, 2.0)])
    return Project(hierarchy=hier, scale=default_scale(),
                   providers=tuple(providers),
                   judgment_matrices={"data-protection": matrix})


def make_knife_edge_project() -> Project:
    """Two near-tied providers whose ranking flips when the dominant
    criterion's weight drops 10 percent."""
    hier = Hierarchy(Node(
        id="overall", name="Overall capability", kind="goal",
        children=(
            Node(id="service-capability", name="Service capability",
                 kind="criterion", local_weight=0.52,
                 children=(Node(id="service-quality", name="Service quality",
                                kind="indicator"),)),
            Node(id="support-capability", name="Support capability",
                 kind="criterion", local_weight=0.48,
                 children=(Node(id="support-quality", name="Support quality",
                                kind="indicator"),)),
        )))
    votes = {
        "X": {"service-quality": (5, 0, 0, 0, 0), "support-quality": (0, 0, 5, 0, 0)},
        "Y": {"service-quality": (0, 0, 5, 0, 0), "support-quality": (5, 0, 0, 0, 0)},
    }
    providers = tuple(
        Provider(provider_id=pid,
                 ballots=tuple(b for f, counts in factor_votes.items()
                               for b in votes_to_ballots(counts, f)),
                 ballots_ref="knife_edge_ballots.csv")
        for pid, factor_votes in votes.items())
    return Project(hierarchy=hier, scale=default_scale(), providers=providers)


def check_cloud(project: Project) -> None:
    assert validate_project(project) == []
    ranking = rank_providers(evaluate_all(project))
    assert ranking.order() == ("C", "A", "B"), ranking
    levels = {pid: level for pid, _, level in ranking.entries}
    assert levels == {"C": "A", "A": "A", "B": "B"}, levels
    sens = sensitivity_report(project, ["data-protection", "access-control"],
                              [-0.10, +0.10])
    assert sens.stable, sens


def check_knife_edge(project: Project) -> None:
    assert validate_project(project) == []
    ranking = rank_providers(evaluate_all(project))
    assert ranking.order() == ("X", "Y"), ranking
    sens = sensitivity_report(project, ["service-capability"], [-0.10, +0.10])
    assert not sens.stable, sens


def write(project: Project, doc_name: str, csv_name: str, title: str) -> None:
    DATA_DIR.mkdir(parents=True, exist_ok=True)
    (DATA_DIR / doc_name).write_bytes(emit_project(project, {"title": title}))
    (DATA_DIR / csv_name).write_bytes(emit_ballots_csv(project))
    print(f"wrote {doc_name} + {csv_name}")


def main() -> None:
    cloud = make_cloud_project()
    check_cloud(cloud)
    write(cloud, "cloud_project.json", "cloud_ballots.csv",
          "Cloud service provider security assessment")

    knife = make_knife_edge_project()
    check_knife_edge(knife)
    write(knife, "knife_edge_project.json", "knife_edge_ballots.csv",
          "Knife-edge ranking stability demo")


if __name__ == "__main__":
    main()
