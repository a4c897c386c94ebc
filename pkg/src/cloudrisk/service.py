"""HTTP API for the analyst workbench: project sessions, live judgment
editing with immediate consistency feedback, ballot entry, evaluation and
sensitivity queries.

Sessions are held in memory with optimistic concurrency: every mutation
must carry the session's current revision and bumps it by one. Documents
are saved to / loaded from a projects directory as interchange files.
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import replace
from pathlib import Path

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware

from . import ahp, assessment, formats
from .ahp import JudgmentMatrix, MatrixError, build_matrix, is_saaty_value
from .assessment import EvaluationError, InconsistentMatrixError
from .formats import DocumentError
from .model import (ExpertBallot, Measurement, Project, Provider,
                    default_hierarchy, default_scale, validate_project)

Cells = dict[tuple[int, int], float]


class Session:
    """One editable project draft. Mutations are serialized by the lock;
    judgment cells live in an overlay so groups may be incomplete while
    the analyst is still eliciting them."""

    def __init__(self, session_id: str, project: Project):
        self.session_id = session_id
        self.lock = threading.Lock()
        self.revision = 0
        self.dirty = False
        self.scale = project.scale
        self.hierarchy = project.hierarchy
        self.providers = list(project.providers)
        self.cells: dict[str, Cells] = {
            gid: dict(((i, j), v) for i, j, v in m.upper_cells())
            for gid, m in project.judgment_matrices.items()}

    def group_order(self, group_id: str) -> int:
        groups = self.hierarchy.groups()
        if group_id not in groups:
            raise HTTPException(404, f"no sibling group {group_id!r}")
        return len(groups[group_id])

    def group_complete(self, group_id: str) -> bool:
        n = self.group_order(group_id)
        have = self.cells.get(group_id, {})
        return all((i, j) in have for i in range(n) for j in range(i + 1, n))

    def group_matrix(self, group_id: str) -> JudgmentMatrix:
        n = self.group_order(group_id)
        return build_matrix(n, [(i, j, v) for (i, j), v
                                in sorted(self.cells.get(group_id, {}).items())])

    def project(self) -> Project:
        matrices = {gid: self.group_matrix(gid)
                    for gid in self.cells if self.group_complete(gid)}
        return Project(hierarchy=self.hierarchy, scale=self.scale,
                       providers=tuple(self.providers),
                       judgment_matrices=matrices)


def _report_body(report: formats.Report) -> dict:
    return json.loads(formats.emit_report(report, "structured"))


def _consistency_body(c: ahp.ConsistencyReport) -> dict:
    return {"lambda_max": c.lambda_max, "ci": c.ci, "ri": c.ri, "cr": c.cr,
            "consistent": c.consistent}


def create_app(projects_dir: str | Path = ".") -> FastAPI:
    projects_dir = Path(projects_dir)
    app = FastAPI(title="cloudrisk", version="0.1.0")
    app.add_middleware(CORSMiddleware, allow_origins=["*"],
                       allow_methods=["*"], allow_headers=["*"])
    sessions: dict[str, Session] = {}

    def get_session(session_id: str) -> Session:
        s = sessions.get(session_id)
        if s is None:
            raise HTTPException(404, f"no session {session_id!r}")
        return s

    def check_revision(s: Session, revision) -> None:
        if revision != s.revision:
            raise HTTPException(
                409, f"stale revision {revision}; session is at {s.revision}")

    def session_info(s: Session) -> dict:
        return {"session_id": s.session_id, "revision": s.revision,
                "dirty": s.dirty}

    def new_session(project: Project) -> Session:
        s = Session(uuid.uuid4().hex[:12], project)
        sessions[s.session_id] = s
        return s

    # -- session lifecycle ---------------------------------------------------

    @app.post("/api/sessions")
    def create_session(body: dict = Body(default={})):
        if "document" in body:
            try:
                project = formats.parse_project(
                    json.dumps(body["document"]).encode("utf-8"))
            except DocumentError as exc:
                raise HTTPException(422, {"errors": exc.errors})
        else:
            project = Project(hierarchy=default_hierarchy(), scale=default_scale())
        s = new_session(project)
        return session_info(s)

    @app.get("/api/sessions")
    def list_sessions():
        return {"sessions": [session_info(s) for s in sessions.values()]}

    @app.get("/api/sessions/{session_id}")
    def get_session_state(session_id: str):
        s = get_session(session_id)
        doc = json.loads(formats.emit_project(s.project()))
        incomplete = [gid for gid in s.cells if not s.group_complete(gid)]
        return {**session_info(s), "document": doc,
                "incomplete_groups": sorted(incomplete)}

    @app.post("/api/sessions/load")
    def load_session(body: dict = Body(...)):
        name = body.get("name")
        if not name or "/" in str(name):
            raise HTTPException(422, "body must carry a plain document name")
        path = projects_dir / f"{name}.json"
        if not path.is_file():
            raise HTTPException(404, f"no saved project {name!r}")
        try:
            project = formats.load_project(path)
        except DocumentError as exc:
            raise HTTPException(422, {"errors": exc.errors})
        s = new_session(project)
        return session_info(s)

    @app.post("/api/sessions/{session_id}/save")
    def save_session(session_id: str, body: dict = Body(...)):
        s = get_session(session_id)
        name = body.get("name")
        if not name or "/" in str(name):
            raise HTTPException(422, "body must carry a plain document name")
        with s.lock:
            project = s.project()
            has_ballots = any(p.ballots for p in project.providers)
            if has_ballots:
                ballots_ref = f"{name}.ballots.csv"
                project = replace(project, providers=tuple(
                    replace(p, ballots_ref=ballots_ref if p.ballots else p.ballots_ref)
                    for p in project.providers))
                (projects_dir / ballots_ref).write_bytes(
                    formats.emit_ballots_csv(project))
            (projects_dir / f"{name}.json").write_bytes(
                formats.emit_project(project))
            s.dirty = False
        return {"saved": name, **session_info(s)}

    @app.get("/api/projects")
    def list_projects():
        return {"projects": sorted(p.stem for p in projects_dir.glob("*.json"))}

    # -- judgment editing ----------------------------------------------------

    def group_feedback(s: Session, group_id: str) -> dict:
        out: dict = {"group": group_id, "complete": s.group_complete(group_id),
                     "cells": [{"i": i, "j": j, "value": v, "reciprocal": 1.0 / v}
                               for (i, j), v in sorted(s.cells.get(group_id, {}).items())]}
        if out["complete"]:
            matrix = s.group_matrix(group_id)
            weights = ahp.derive_weights(matrix)
            report = ahp.consistency(matrix, weights)
            out["weights"] = list(weights.weights)
            out["consistency"] = _consistency_body(report)
        return out

    @app.put("/api/sessions/{session_id}/judgments/{group_id}")
    def put_judgment(session_id: str, group_id: str, body: dict = Body(...)):
        s = get_session(session_id)
        with s.lock:
            check_revision(s, body.get("revision"))
            n = s.group_order(group_id)
            try:
                i, j, value = int(body["i"]), int(body["j"]), float(body["value"])
            except (KeyError, TypeError, ValueError):
                raise HTTPException(422, "body must carry integer i, j and numeric value")
            if not (0 <= i < j < n):
                raise HTTPException(
                    422, f"cell ({i},{j}) outside the upper triangle of an order-{n} group")
            if not (value > 0 and is_saaty_value(value)):
                raise HTTPException(
                    422, f"value {value!r} is not on the 1..9 comparison scale")
            s.cells.setdefault(group_id, {})[(i, j)] = value
            s.revision += 1
            s.dirty = True
            return {**session_info(s), **group_feedback(s, group_id)}

    @app.delete("/api/sessions/{session_id}/judgments/{group_id}/cells/{i}/{j}")
    def delete_judgment(session_id: str, group_id: str, i: int, j: int,
                        revision: int):
        s = get_session(session_id)
        with s.lock:
            check_revision(s, revision)
            s.group_order(group_id)
            if (i, j) not in s.cells.get(group_id, {}):
                raise HTTPException(404, f"no judgment at cell ({i},{j})")
            del s.cells[group_id][(i, j)]
            s.revision += 1
            s.dirty = True
            return {**session_info(s), **group_feedback(s, group_id)}

    @app.get("/api/sessions/{session_id}/judgments/{group_id}")
    def get_judgments(session_id: str, group_id: str):
        s = get_session(session_id)
        return {**session_info(s), **group_feedback(s, group_id)}

    # -- ballots and measurements ---------------------------------------------

    def find_provider(s: Session, provider_id: str, create: bool = False) -> int:
        for idx, p in enumerate(s.providers):
            if p.provider_id == provider_id:
                return idx
        if create:
            s.providers.append(Provider(provider_id=provider_id))
            return len(s.providers) - 1
        raise HTTPException(404, f"no provider {provider_id!r}")

    @app.put("/api/sessions/{session_id}/ballots")
    def put_ballots(session_id: str, body: dict = Body(...)):
        s = get_session(session_id)
        with s.lock:
            check_revision(s, body.get("revision"))
            provider_id = body.get("provider_id")
            if not provider_id:
                raise HTTPException(422, "body must carry provider_id")
            leaf_ids = s.hierarchy.leaf_ids()
            incoming: list[ExpertBallot] = []
            for raw in body.get("ballots", []):
                try:
                    level = s.scale.index_of(str(raw["level"]))
                except KeyError:
                    raise HTTPException(422, f"unknown level label {raw.get('level')!r}")
                factor = str(raw.get("factor_id"))
                if factor not in leaf_ids:
                    raise HTTPException(422, f"factor {factor!r} is not a leaf indicator")
                incoming.append(ExpertBallot(expert_id=str(raw["expert_id"]),
                                             factor_id=factor, level_index=level))
            idx = find_provider(s, provider_id, create=True)
            prov = s.providers[idx]
            merged = {(b.expert_id, b.factor_id): b for b in prov.ballots}
            merged.update({(b.expert_id, b.factor_id): b for b in incoming})
            s.providers[idx] = replace(prov, ballots=tuple(merged.values()))
            s.revision += 1
            s.dirty = True
            return {**session_info(s), "provider_id": provider_id,
                    "ballot_count": len(merged)}

    @app.delete("/api/sessions/{session_id}/ballots")
    def delete_ballots(session_id: str, body: dict = Body(...)):
        s = get_session(session_id)
        with s.lock:
            check_revision(s, body.get("revision"))
            provider_id = body.get("provider_id")
            idx = find_provider(s, provider_id)
            expert = body.get("expert_id")
            factor = body.get("factor_id")
            prov = s.providers[idx]
            kept = tuple(b for b in prov.ballots
                         if not ((expert is None or b.expert_id == expert)
                                 and (factor is None or b.factor_id == factor)))
            s.providers[idx] = replace(prov, ballots=kept)
            s.revision += 1
            s.dirty = True
            return {**session_info(s), "provider_id": provider_id,
                    "ballot_count": len(kept)}

    @app.put("/api/sessions/{session_id}/measurements")
    def put_measurements(session_id: str, body: dict = Body(...)):
        s = get_session(session_id)
        with s.lock:
            check_revision(s, body.get("revision"))
            provider_id = body.get("provider_id")
            if not provider_id:
                raise HTTPException(422, "body must carry provider_id")
            leaf_ids = s.hierarchy.leaf_ids()
            incoming = {}
            for raw in body.get("measurements", []):
                factor = str(raw.get("factor"))
                if factor not in leaf_ids:
                    raise HTTPException(422, f"factor {factor!r} is not a leaf indicator")
                incoming[factor] = Measurement(factor_id=factor,
                                               value=float(raw["value"]))
            idx = find_provider(s, provider_id, create=True)
            prov = s.providers[idx]
            merged = {m.factor_id: m for m in prov.measurements}
            merged.update(incoming)
            s.providers[idx] = replace(prov, measurements=tuple(merged.values()))
            s.revision += 1
            s.dirty = True
            return {**session_info(s), "provider_id": provider_id,
                    "measurement_count": len(merged)}

    # -- evaluation ------------------------------------------------------------

    @app.get("/api/sessions/{session_id}/hierarchy")
    def get_hierarchy(session_id: str):
        s = get_session(session_id)
        doc = json.loads(formats.emit_project(s.project()))
        return {**session_info(s), "hierarchy": doc["hierarchy"],
                "scale": doc["scale"]}

    @app.get("/api/sessions/{session_id}/weights")
    def get_weights(session_id: str):
        s = get_session(session_id)
        project = s.project()
        groups = {}
        for gid in s.cells:
            groups[gid] = group_feedback(s, gid)
        for gid, children in project.hierarchy.groups().items():
            if gid in groups:
                continue
            if all(c.local_weight is not None for c in children):
                groups[gid] = {"group": gid, "complete": True,
                               "weights": [c.local_weight for c in children],
                               "explicit": True}
        body: dict = {**session_info(s), "groups": groups}
        try:
            resolved, _, _ = assessment.resolve_weights(project, force=True)
            body["global_weights"] = ahp.synthesize_global_weights(resolved.hierarchy)
        except (EvaluationError, MatrixError):
            body["global_weights"] = None
        return body

    @app.post("/api/sessions/{session_id}/evaluate")
    def evaluate(session_id: str, body: dict = Body(default={})):
        s = get_session(session_id)
        project = s.project()
        diags = [d for d in validate_project(project) if d.severity == "error"]
        if diags:
            raise HTTPException(422, {"diagnostics": [str(d) for d in diags]})
        method = body.get("method", "eigenvector")
        operator = body.get("operator", "weighted-sum")
        force = bool(body.get("force", False))
        try:
            results = assessment.evaluate_all(project, method, operator, force)
            ranking = assessment.rank_providers(results)
            consistency = {g: rep for g, (_, rep)
                           in assessment.group_consistency(project, method).items()}
        except InconsistentMatrixError as exc:
            raise HTTPException(422, {"error": str(exc), "group": exc.group_id,
                                      "consistency": _consistency_body(exc.report)})
        except EvaluationError as exc:
            raise HTTPException(422, {"error": str(exc)})
        report = formats.Report(scale=project.scale, results=tuple(results),
                                ranking=ranking, consistency=consistency)
        return _report_body(report)

    @app.post("/api/sessions/{session_id}/sensitivity")
    def sensitivity(session_id: str, body: dict = Body(...)):
        s = get_session(session_id)
        project = s.project()
        nodes = body.get("nodes") or []
        deltas = body.get("deltas") or [-0.10, +0.10]
        if not nodes:
            raise HTTPException(422, "body must carry a non-empty nodes list")
        try:
            report = assessment.sensitivity_report(
                project, [str(n) for n in nodes], [float(d) for d in deltas],
                body.get("method", "eigenvector"),
                body.get("operator", "weighted-sum"),
                bool(body.get("force", False)))
        except KeyError as exc:
            raise HTTPException(404, f"unknown node {exc}")
        except InconsistentMatrixError as exc:
            raise HTTPException(422, {"error": str(exc), "group": exc.group_id})
        except EvaluationError as exc:
            raise HTTPException(422, {"error": str(exc)})
        return {"base_ranking": list(report.base_ranking),
                "stable": report.stable,
                "entries": [
                    {"node_id": e.node_id, "delta": e.delta,
                     "scores": dict(e.scores), "ranking": list(e.ranking),
                     "rank_changed": e.rank_changed}
                    for e in report.entries]}

    return app
