"""Durable file formats: the JSON project document, the ballots CSV, and
structured / human-readable report rendering."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, replace
from pathlib import Path

from .ahp import ConsistencyReport, JudgmentMatrix, MatrixError, build_matrix
from .assessment import (AssessmentResult, CriterionResult, Ranking,
                         SensitivityEntry, SensitivityReport)
from .fuzzy import MembershipVector
from .model import (ExpertBallot, Hierarchy, Measurement, Node, Project,
                    Provider, RatingScale, ScaleLevel)

FORMAT_VERSION = "1"

BALLOT_CSV_HEADER = ["expert_id", "provider_id", "factor_id", "level"]


class DocumentError(ValueError):
    """Parse failure carrying every collected problem, not just the first."""

    def __init__(self, errors: list[str]):
        self.errors = errors
        super().__init__("; ".join(errors))


# ---------------------------------------------------------------------------
# project documents


def _require(obj: dict, path: str, allowed: set[str], required: set[str],
             errors: list[str]) -> bool:
    """Strict field check: unknown fields rejected, missing ones reported."""
    ok = True
    for key in obj:
        if key not in allowed:
            errors.append(f"{path}: unknown field {key!r}")
            ok = False
    for key in required:
        if key not in obj:
            errors.append(f"{path}: missing field {key!r}")
            ok = False
    return ok


def _parse_scale(obj, errors: list[str]) -> RatingScale | None:
    if not isinstance(obj, dict) or not _require(
            obj, "scale", {"levels"}, {"levels"}, errors):
        return None
    levels = obj["levels"]
    if not isinstance(levels, list):
        errors.append("scale.levels: expected a list")
        return None
    out = []
    for i, lv in enumerate(levels):
        path = f"scale.levels[{i}]"
        if not isinstance(lv, dict) or not _require(
                obj=lv, path=path, allowed={"label", "score", "threshold"},
                required={"label", "score"}, errors=errors):
            return None
        label = lv["label"]
        if not isinstance(label, str):
            errors.append(f"{path}.label: expected a string")
            return None
        for key in ("score", "threshold"):
            if key in lv and not isinstance(lv[key], (int, float)):
                errors.append(f"{path}.{key}: expected a number")
                return None
        out.append(lv)
    if any("threshold" not in lv for lv in out):
        if any("threshold" in lv for lv in out):
            errors.append("scale.levels: thresholds must be given for all levels or none")
            return None
        # Default thresholds: the level scores, reordered to be increasing.
        thresholds = sorted(float(lv["score"]) for lv in out)
    else:
        thresholds = [float(lv["threshold"]) for lv in out]
    return RatingScale(tuple(
        ScaleLevel(label=lv["label"], score=float(lv["score"]), threshold=thr)
        for lv, thr in zip(out, thresholds)))


def _parse_node(obj, path: str, errors: list[str]) -> Node | None:
    if not isinstance(obj, dict) or not _require(
            obj, path, {"id", "name", "kind", "children", "local_weight"},
            {"id", "name", "kind"}, errors):
        return None
    kids = []
    for i, child in enumerate(obj.get("children", [])):
        node = _parse_node(child, f"{path}.children[{i}]", errors)
        if node is None:
            return None
        kids.append(node)
    lw = obj.get("local_weight")
    if lw is not None and not isinstance(lw, (int, float)):
        errors.append(f"{path}.local_weight: expected a number")
        return None
    return Node(id=str(obj["id"]), name=str(obj["name"]), kind=str(obj["kind"]),
                children=tuple(kids),
                local_weight=float(lw) if lw is not None else None)


def _parse_judgments(obj, errors: list[str]) -> dict[str, JudgmentMatrix]:
    out: dict[str, JudgmentMatrix] = {}
    if not isinstance(obj, list):
        errors.append("judgments: expected a list")
        return out
    for gi, group in enumerate(obj):
        path = f"judgments[{gi}]"
        if not isinstance(group, dict) or not _require(
                group, path, {"group", "cells"}, {"group", "cells"}, errors):
            continue
        cells = []
        bad = False
        for ci, cell in enumerate(group["cells"]):
            cpath = f"{path}.cells[{ci}]"
            if not isinstance(cell, dict) or not _require(
                    cell, cpath, {"i", "j", "value"}, {"i", "j", "value"}, errors):
                bad = True
                continue
            cells.append((int(cell["i"]), int(cell["j"]), float(cell["value"])))
        if bad:
            continue
        order = max((j for _, j, _ in cells), default=0) + 1
        try:
            out[str(group["group"])] = build_matrix(order, cells)
        except MatrixError as exc:
            errors.append(f"{path} (group {group['group']!r}): {exc}")
    return out


def _parse_providers(obj, errors: list[str]) -> tuple[Provider, ...]:
    out = []
    if not isinstance(obj, list):
        errors.append("providers: expected a list")
        return ()
    for pi, prov in enumerate(obj):
        path = f"providers[{pi}]"
        if not isinstance(prov, dict) or not _require(
                prov, path, {"id", "ballots_ref", "measurements"}, {"id"}, errors):
            continue
        measurements = []
        for mi, m in enumerate(prov.get("measurements", [])):
            mpath = f"{path}.measurements[{mi}]"
            if not isinstance(m, dict) or not _require(
                    m, mpath, {"factor", "value"}, {"factor", "value"}, errors):
                continue
            measurements.append(Measurement(factor_id=str(m["factor"]),
                                            value=float(m["value"])))
        out.append(Provider(provider_id=str(prov["id"]),
                            ballots_ref=prov.get("ballots_ref"),
                            measurements=tuple(measurements)))
    return tuple(out)


def parse_project(data: bytes) -> Project:
    """Parse a project document. Raises DocumentError with every problem
    found; syntax errors carry the byte offset."""
    errors: list[str] = []
    try:
        doc = json.loads(data.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise DocumentError([f"document is not valid UTF-8: {exc}"]) from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(
            [f"syntax error at byte offset {exc.pos}: {exc.msg}"]) from exc

    if not isinstance(doc, dict):
        raise DocumentError(["document root must be an object"])
    _require(doc, "document",
             {"format_version", "metadata", "scale", "hierarchy", "judgments",
              "providers"},
             {"format_version", "scale", "hierarchy"}, errors)
    version = doc.get("format_version")
    if version is not None and version != FORMAT_VERSION:
        errors.append(f"unsupported format_version {version!r} (expected {FORMAT_VERSION!r})")

    metadata = doc.get("metadata", {})
    if metadata and isinstance(metadata, dict):
        _require(metadata, "metadata", {"title", "authors", "created"}, set(), errors)

    scale = _parse_scale(doc.get("scale", {}), errors)
    root = _parse_node(doc.get("hierarchy", {}), "hierarchy", errors)
    matrices = _parse_judgments(doc.get("judgments", []), errors)
    providers = _parse_providers(doc.get("providers", []), errors)

    if errors or scale is None or root is None:
        raise DocumentError(errors or ["document could not be parsed"])
    return Project(hierarchy=Hierarchy(root), scale=scale,
                   providers=providers, judgment_matrices=matrices)


def _node_to_obj(node: Node) -> dict:
    out: dict = {"id": node.id, "name": node.name, "kind": node.kind}
    if node.local_weight is not None:
        out["local_weight"] = node.local_weight
    if node.children:
        out["children"] = [_node_to_obj(c) for c in node.children]
    return out


def emit_project(project: Project, metadata: dict | None = None) -> bytes:
    """Serialize a project document. Floats keep full repr precision, so a
    reparsed document evaluates identically."""
    doc: dict = {"format_version": FORMAT_VERSION}
    if metadata:
        doc["metadata"] = metadata
    doc["scale"] = {"levels": [
        {"label": lv.label, "score": lv.score, "threshold": lv.threshold}
        for lv in project.scale.levels]}
    doc["hierarchy"] = _node_to_obj(project.hierarchy.root)
    if project.judgment_matrices:
        doc["judgments"] = [
            {"group": gid,
             "cells": [{"i": i, "j": j, "value": v} for i, j, v in m.upper_cells()]}
            for gid, m in sorted(project.judgment_matrices.items())]
    if project.providers:
        doc["providers"] = []
        for p in project.providers:
            obj: dict = {"id": p.provider_id}
            if p.ballots_ref:
                obj["ballots_ref"] = p.ballots_ref
            if p.measurements:
                obj["measurements"] = [{"factor": m.factor_id, "value": m.value}
                                       for m in p.measurements]
            doc["providers"].append(obj)
    return (json.dumps(doc, indent=2) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# ballots CSV


def parse_ballots_csv(data: bytes, scale: RatingScale,
                      ) -> list[tuple[str, ExpertBallot]]:
    """Parse ballot rows. Header must be exactly
    ``expert_id,provider_id,factor_id,level``; level labels match the scale
    case-insensitively. Returns (provider_id, ballot) pairs."""
    errors: list[str] = []
    try:
        text = data.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise DocumentError([f"ballots CSV is not valid UTF-8: {exc}"]) from exc

    reader = csv.reader(io.StringIO(text, newline=""))
    rows = [r for r in reader]
    if not rows:
        raise DocumentError(["ballots CSV is empty"])
    header = [c.strip() for c in rows[0]]
    if header != BALLOT_CSV_HEADER:
        raise DocumentError(
            [f"ballots CSV header must be {','.join(BALLOT_CSV_HEADER)!r}, got {','.join(header)!r}"])

    out: list[tuple[str, ExpertBallot]] = []
    seen: set[tuple[str, str, str]] = set()
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 4:
            errors.append(f"row {lineno}: expected 4 columns, got {len(row)}")
            continue
        expert, provider, factor, level = (c.strip() for c in row)
        try:
            level_index = scale.index_of(level)
        except KeyError:
            errors.append(f"row {lineno}: unknown level label {level!r}")
            continue
        key = (expert, provider, factor)
        if key in seen:
            errors.append(f"row {lineno}: duplicate ballot for {key}")
            continue
        seen.add(key)
        out.append((provider, ExpertBallot(expert_id=expert, factor_id=factor,
                                           level_index=level_index)))
    if errors:
        raise DocumentError(errors)
    return out


def emit_ballots_csv(project: Project) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(BALLOT_CSV_HEADER)
    for p in project.providers:
        for b in p.ballots:
            writer.writerow([b.expert_id, p.provider_id, b.factor_id,
                             project.scale.levels[b.level_index].label])
    return buf.getvalue().encode("utf-8")


def attach_ballots(project: Project,
                   rows: list[tuple[str, ExpertBallot]]) -> Project:
    """Attach parsed CSV ballots to the matching providers."""
    by_provider: dict[str, list[ExpertBallot]] = {}
    known = {p.provider_id for p in project.providers}
    for provider_id, ballot in rows:
        if provider_id not in known:
            raise DocumentError([f"ballots reference unknown provider {provider_id!r}"])
        by_provider.setdefault(provider_id, []).append(ballot)
    providers = tuple(
        replace(p, ballots=tuple(by_provider.get(p.provider_id, p.ballots)))
        for p in project.providers)
    return replace(project, providers=providers)


def load_project(path: str | Path) -> Project:
    """Read a project document and pull in any ballots CSVs referenced by
    providers (paths resolved relative to the document)."""
    path = Path(path)
    project = parse_project(path.read_bytes())
    refs = {p.ballots_ref for p in project.providers if p.ballots_ref}
    for ref in sorted(refs):
        rows = parse_ballots_csv((path.parent / ref).read_bytes(), project.scale)
        project = attach_ballots(
            project,
            [(pid, b) for pid, b in rows
             if _ballots_ref_of(project, pid) == ref])
    return project


def _ballots_ref_of(project: Project, provider_id: str) -> str | None:
    try:
        return project.provider(provider_id).ballots_ref
    except KeyError:
        return None


# ---------------------------------------------------------------------------
# reports


@dataclass(frozen=True)
class Report:
    """Self-contained evaluation output: results, ranking, per-group
    consistency, and (optionally) a sensitivity analysis."""

    scale: RatingScale
    results: tuple[AssessmentResult, ...]
    ranking: Ranking
    consistency: dict[str, ConsistencyReport]
    sensitivity: SensitivityReport | None = None


def _result_to_obj(r: AssessmentResult) -> dict:
    return {
        "provider_id": r.provider_id,
        "goal_vector": list(r.goal_vector.values),
        "level": r.level,
        "score": r.score,
        "per_criterion": {
            cid: {"vector": list(c.vector.values), "level": c.level, "score": c.score}
            for cid, c in r.per_criterion.items()},
        "weights_used": dict(r.weights_used),
        "warnings": list(r.warnings),
    }


def _sensitivity_to_obj(s: SensitivityReport) -> dict:
    return {
        "base_ranking": list(s.base_ranking),
        "stable": s.stable,
        "entries": [
            {"node_id": e.node_id, "delta": e.delta, "scores": dict(e.scores),
             "ranking": list(e.ranking), "rank_changed": e.rank_changed}
            for e in s.entries],
    }


def emit_report(report: Report, format: str = "structured",
                generated_at: str | None = None) -> bytes:
    if format == "structured":
        doc: dict = {"format_version": FORMAT_VERSION}
        if generated_at:
            doc["generated_at"] = generated_at
        doc["scale"] = {"levels": [
            {"label": lv.label, "score": lv.score, "threshold": lv.threshold}
            for lv in report.scale.levels]}
        doc["results"] = [_result_to_obj(r) for r in report.results]
        doc["ranking"] = [
            {"provider_id": pid, "score": score, "level": level}
            for pid, score, level in report.ranking.entries]
        doc["consistency"] = {
            gid: {"lambda_max": c.lambda_max, "ci": c.ci, "ri": c.ri,
                  "cr": c.cr, "consistent": c.consistent}
            for gid, c in sorted(report.consistency.items())}
        if report.sensitivity is not None:
            doc["sensitivity"] = _sensitivity_to_obj(report.sensitivity)
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    if format == "text":
        return _render_text(report, generated_at).encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def _fmt_vec(values) -> str:
    return "[" + " ".join(f"{v:.4f}" for v in values) + "]"


def _render_text(report: Report, generated_at: str | None) -> str:
    lines = ["Security assessment report", "=" * 26, ""]
    if generated_at:
        lines += [f"Generated at: {generated_at}", ""]

    lines.append("Ranking: " + " > ".join(report.ranking.order()))
    lines.append("")
    lines.append(f"{'provider':<12} {'score':>8}  level")
    for pid, score, level in report.ranking.entries:
        lines.append(f"{pid:<12} {score:>8.4f}  {level}")
    lines.append("")

    if report.consistency:
        lines.append("Consistency")
        for gid, c in sorted(report.consistency.items()):
            verdict = "pass" if c.consistent else "FAIL"
            lines.append(
                f"  {gid}: lambda_max {c.lambda_max:.4f}, CI {c.ci:.4f}, "
                f"RI {c.ri:.2f}, CR {c.cr:.4f} ({verdict})")
        lines.append("")

    lines.append("Per-criterion memberships")
    for r in report.results:
        lines.append(f"  provider {r.provider_id}: level {r.level}, "
                     f"score {r.score:.4f}, goal {_fmt_vec(r.goal_vector.values)}")
        for cid, c in r.per_criterion.items():
            lines.append(f"    {cid}: level {c.level}, score {c.score:.4f}, "
                         f"{_fmt_vec(c.vector.values)}")
        for w in r.warnings:
            lines.append(f"    warning: {w}")
    lines.append("")

    if report.sensitivity is not None:
        s = report.sensitivity
        lines.append(f"Sensitivity: stable: {'true' if s.stable else 'false'}")
        for e in s.entries:
            flag = "RANK CHANGE" if e.rank_changed else "unchanged"
            lines.append(f"  {e.node_id} delta {e.delta:+.2f} -> "
                         + " > ".join(e.ranking) + f" ({flag})")
        lines.append("")
    return "\n".join(lines)


def parse_report(data: bytes) -> Report:
    """Parse a structured report back into a Report (lossless round trip)."""
    try:
        doc = json.loads(data.decode("utf-8"))
    except json.JSONDecodeError as exc:
        raise DocumentError(
            [f"syntax error at byte offset {exc.pos}: {exc.msg}"]) from exc
    errors: list[str] = []
    scale = _parse_scale(doc.get("scale", {}), errors)
    if scale is None or errors:
        raise DocumentError(errors or ["report has no usable scale"])

    results = tuple(
        AssessmentResult(
            provider_id=r["provider_id"],
            goal_vector=MembershipVector(tuple(r["goal_vector"])),
            level=r["level"],
            score=r["score"],
            per_criterion={
                cid: CriterionResult(vector=MembershipVector(tuple(c["vector"])),
                                     level=c["level"], score=c["score"])
                for cid, c in r["per_criterion"].items()},
            weights_used=dict(r["weights_used"]),
            scale=scale,
            warnings=tuple(r.get("warnings", ())),
        )
        for r in doc.get("results", []))
    ranking = Ranking(tuple(
        (e["provider_id"], e["score"], e["level"]) for e in doc.get("ranking", [])))
    consistency = {
        gid: ConsistencyReport(lambda_max=c["lambda_max"], ci=c["ci"], ri=c["ri"],
                               cr=c["cr"], consistent=c["consistent"])
        for gid, c in doc.get("consistency", {}).items()}
    sensitivity = None
    if "sensitivity" in doc:
        s = doc["sensitivity"]
        sensitivity = SensitivityReport(
            base_ranking=tuple(s["base_ranking"]),
            stable=s["stable"],
            entries=tuple(
                SensitivityEntry(node_id=e["node_id"], delta=e["delta"],
                                 scores=dict(e["scores"]),
                                 ranking=tuple(e["ranking"]),
                                 rank_changed=e["rank_changed"])
                for e in s["entries"]))
    return Report(scale=scale, results=results, ranking=ranking,
                  consistency=consistency, sensitivity=sensitivity)
