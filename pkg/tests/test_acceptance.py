"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line. Run with `pytest tests/test_acceptance.py -s` to see the
per-criterion verdicts."""

import random
import time
from dataclasses import replace
from pathlib import Path

import numpy as np

from cloudrisk import (Hierarchy, Node, build_matrix, consistency,
                       derive_weights, evaluate_all, lambda_max,
                       matrix_from_rows, rank_providers, sensitivity_report,
                       synthesize_global_weights)
from cloudrisk import formats
from cloudrisk.assessment import evaluate_flat, evaluate_provider
from cloudrisk.cli import EXIT_OK, main
from cloudrisk.fuzzy import ballot_membership, threshold_membership
from cloudrisk.model import (ExpertBallot, Project, Provider, RatingScale,
                             ScaleLevel, default_scale)

from conftest import DATA_DIR
from test_assessment import one_criterion_project, random_project

REPO_ROOT = Path(__file__).resolve().parent.parent

EXAMPLE_CELLS = [(0, 1, 3.0), (0, 2, 5.0), (1, 2, 2.0)]


def verdict(name: str, ok: bool) -> None:
    print(f"{'PASS' if ok else 'FAIL'}: {name}")
    assert ok, name


def test_weight_reproduction():
    """Eigenvector weights of the worked-example matrix and the published
    global-weight table, within the stated tolerances, in under 1 s."""
    t0 = time.perf_counter()
    m = build_matrix(3, EXAMPLE_CELLS)
    w = derive_weights(m, "eigenvector")
    local_ok = np.allclose(w.weights, (0.65, 0.23, 0.12), atol=0.01)

    hier = Hierarchy(Node(id="g", name="g", kind="goal", children=(
        Node(id="data-protection", name="", kind="criterion", local_weight=0.35,
             children=(
                 Node(id="encryption-capability", name="", kind="indicator",
                      local_weight=0.65),
                 Node(id="backup-mechanism", name="", kind="indicator",
                      local_weight=0.23),
                 Node(id="data-isolation", name="", kind="indicator",
                      local_weight=0.12))),
        Node(id="access-control", name="", kind="criterion", local_weight=0.2,
             children=(
                 Node(id="permission-granularity", name="", kind="indicator",
                      local_weight=0.5),
                 Node(id="audit-log", name="", kind="indicator",
                      local_weight=0.3),
                 Node(id="dynamic-policy", name="", kind="indicator",
                      local_weight=0.2))),
        Node(id="rest", name="", kind="criterion", local_weight=0.45,
             children=(Node(id="rest-overall", name="", kind="indicator"),)),
    )))
    g = synthesize_global_weights(hier)
    expected = {
        "encryption-capability": 0.2275, "backup-mechanism": 0.0805,
        "data-isolation": 0.0420, "permission-granularity": 0.1000,
        "audit-log": 0.0600, "dynamic-policy": 0.0400,
    }
    global_ok = all(round(g[k], 4) == v for k, v in expected.items())
    elapsed = time.perf_counter() - t0
    verdict("weight reproduction: local weights within 0.01", local_ok)
    verdict("weight reproduction: global weights exact to 4 decimals", global_ok)
    verdict(f"weight reproduction: runtime {elapsed:.3f}s < 1s", elapsed < 1.0)


def test_consistency_check():
    """CR of the worked-example matrix passes (< 0.1) and matches an
    independent eigen-solver oracle within 1e-6; the divergence from the
    reference study's printed eigenvalue is documented in repo notes."""
    m = build_matrix(3, EXAMPLE_CELLS)
    w = derive_weights(m)
    rep = consistency(m, w)

    vals, _ = np.linalg.eig(m.to_array())
    lm_oracle = float(np.max(vals.real))
    cr_oracle = ((lm_oracle - 3) / 2) / 0.58

    verdict("consistency: CR < 0.1", rep.cr < 0.1 and rep.consistent)
    verdict("consistency: lambda_max matches oracle within 1e-6",
            abs(lambda_max(m, w) - lm_oracle) < 1e-6)
    verdict("consistency: CR matches oracle within 1e-6",
            abs(rep.cr - cr_oracle) < 1e-6)

    notes = (REPO_ROOT / "docs" / "methodology.md").read_text()
    verdict("consistency: eigenvalue discrepancy documented in repo notes",
            "3.038" in notes and "3.0037" in notes)


def test_property_suite():
    """>= 100 randomized cases per property, the whole suite under 30 s."""
    t0 = time.perf_counter()
    rnd = random.Random(7)

    ok = True
    for _ in range(100):  # consistent-matrix recovery
        n = rnd.randint(2, 9)
        w = [rnd.uniform(0.05, 1.0) for _ in range(n)]
        w = [x / sum(w) for x in w]
        m = matrix_from_rows([[wi / wj for wj in w] for wi in w])
        we = derive_weights(m, "eigenvector")
        wg = derive_weights(m, "geometric-mean")
        ok &= abs(lambda_max(m, we) - n) < 1e-8
        ok &= abs(consistency(m, we).cr) < 1e-8
        ok &= bool(np.allclose(we.weights, w, atol=1e-8))
        ok &= bool(np.allclose(wg.weights, w, atol=1e-8))
        ok &= bool(np.allclose(we.weights, wg.weights, atol=1e-8))
    verdict("properties: consistent-matrix recovery (100 cases)", ok)

    ok = True
    for _ in range(100):  # membership partition of unity + adjacency
        k = rnd.randint(2, 8)
        thr = sorted(rnd.uniform(-50, 50) for _ in range(k))
        while any(b - a < 1e-3 for a, b in zip(thr, thr[1:])):
            thr = sorted(rnd.uniform(-50, 50) for _ in range(k))
        scale = RatingScale(tuple(
            ScaleLevel(f"L{i}", float(k - i), t) for i, t in enumerate(thr)))
        for x in np.linspace(thr[0] - 10, thr[-1] + 10, 23):
            v = threshold_membership(float(x), scale)
            ok &= abs(sum(v.values) - 1.0) < 1e-12
            nz = [i for i, r in enumerate(v.values) if r > 0]
            ok &= len(nz) <= 2 and (len(nz) < 2 or nz[1] == nz[0] + 1)
    verdict("properties: membership partition of unity + adjacency (100 cases)", ok)

    ok = True
    scale = default_scale()
    for _ in range(100):  # ballot rows row-stochastic
        h = rnd.randint(1, 9)
        ballots = [ExpertBallot(f"e{k}", "f", rnd.randrange(5)) for k in range(h)]
        row = ballot_membership(ballots, ["f"], scale).rows[0]
        ok &= abs(sum(row.values) - 1.0) < 1e-12
        ok &= all(v >= 0 for v in row.values)
    verdict("properties: ballot rows row-stochastic (100 cases)", ok)

    ok = True
    for _ in range(100):  # two-stage vs flat weighted-sum equivalence
        p = random_project(rnd)
        staged = evaluate_provider(p, "p").goal_vector.to_array()
        flat = evaluate_flat(p, "p").to_array()
        ok &= bool(np.max(np.abs(staged - flat)) < 1e-9)
    verdict("properties: two-stage vs flat equivalence (100 cases)", ok)

    ok = True
    for _ in range(100):  # ranking invariance under affine score rescale
        votes = {pid: [rnd.randrange(5) for _ in range(4)]
                 for pid in ("p1", "p2", "p3")}
        p = one_criterion_project(votes)
        results = evaluate_all(p)
        scores = sorted(r.score for r in results)
        if any(b - a < 1e-9 for a, b in zip(scores, scores[1:])):
            continue  # exact ties only survive rescale in exact arithmetic
        base = rank_providers(results).order()
        a, c = rnd.uniform(0.1, 4.0), rnd.uniform(-10, 10)
        rescaled = RatingScale(tuple(
            ScaleLevel(lv.label, a * lv.score + c, lv.threshold)
            for lv in p.scale.levels))
        ok &= rank_providers(
            evaluate_all(replace(p, scale=rescaled))).order() == base
    verdict("properties: ranking invariant under affine rescale (100 cases)", ok)

    elapsed = time.perf_counter() - t0
    verdict(f"properties: total runtime {elapsed:.1f}s < 30s", elapsed < 30.0)


def test_experiment_fixture():
    """Golden fixture reproduces the known outcome: ranking C > A > B,
    C and A at level A, B at level B, ranking stable under +/-10 percent
    perturbation of the two headline criteria. Under 5 s."""
    t0 = time.perf_counter()
    project = formats.load_project(DATA_DIR / "cloud_project.json")
    ranking = rank_providers(evaluate_all(project))
    levels = {pid: level for pid, _, level in ranking.entries}
    sens = sensitivity_report(project, ["data-protection", "access-control"],
                              [-0.10, +0.10])
    elapsed = time.perf_counter() - t0
    verdict("experiment fixture: ranking C > A > B",
            ranking.order() == ("C", "A", "B"))
    verdict("experiment fixture: levels C=A, A=A, B=B",
            levels == {"C": "A", "A": "A", "B": "B"})
    verdict("experiment fixture: sensitivity stable under +/-10%", sens.stable)
    verdict(f"experiment fixture: runtime {elapsed:.2f}s < 5s", elapsed < 5.0)


def test_round_trip():
    """Every golden document parses, evaluates, re-serializes, re-parses and
    re-evaluates to scores within 1e-9."""
    ok = True
    for name in ("cloud_project.json", "knife_edge_project.json"):
        project = formats.load_project(DATA_DIR / name)
        before = {r.provider_id: r.score for r in evaluate_all(project)}
        reparsed = formats.attach_ballots(
            formats.parse_project(formats.emit_project(project)),
            formats.parse_ballots_csv(formats.emit_ballots_csv(project),
                                      project.scale))
        after = {r.provider_id: r.score for r in evaluate_all(reparsed)}
        ok &= before.keys() == after.keys()
        ok &= all(abs(before[k] - after[k]) < 1e-9 for k in before)
    verdict("round-trip: reevaluated scores within 1e-9", ok)


def test_cli_determinism(tmp_path):
    """`weights` and `evaluate` on the golden fixture are byte-identical
    across two runs."""
    cloud = str(DATA_DIR / "cloud_project.json")
    ok = True
    for argv in (["weights", "--project", cloud],
                 ["evaluate", "--project", cloud, "--format", "structured"],
                 ["evaluate", "--project", cloud, "--format", "text"]):
        out1 = tmp_path / "run1.out"
        out2 = tmp_path / "run2.out"
        ok &= main(argv + ["--out", str(out1)]) == EXIT_OK
        ok &= main(argv + ["--out", str(out2)]) == EXIT_OK
        ok &= out1.read_bytes() == out2.read_bytes()
    verdict("CLI determinism: weights/evaluate byte-identical across runs", ok)
