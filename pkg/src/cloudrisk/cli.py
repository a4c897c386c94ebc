"""Batch command-line front end.

Exit codes:
  0  success (no error diagnostics, all consistency checks pass)
  1  validation diagnostics or a consistency failure (without --force)
  2  file not found / usage error
  3  document or CSV parse error
  4  evaluation error (missing data, non-convergence, ...)
"""

from __future__ import annotations

import argparse
import datetime
import sys
from pathlib import Path

from . import ahp, assessment, formats
from .assessment import EvaluationError, InconsistentMatrixError
from .formats import DocumentError
from .model import Project, validate_project

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_NOT_FOUND = 2
EXIT_PARSE = 3
EXIT_ENGINE = 4


class CliError(Exception):
    def __init__(self, code: int, message: str):
        self.code = code
        super().__init__(message)


def _load(args) -> Project:
    path = Path(args.project)
    if not path.is_file():
        raise CliError(EXIT_NOT_FOUND, f"project file not found: {path}")
    try:
        project = formats.load_project(path)
    except FileNotFoundError as exc:
        raise CliError(EXIT_NOT_FOUND, f"referenced file not found: {exc.filename}")
    except DocumentError as exc:
        raise CliError(EXIT_PARSE, "parse errors:\n  " + "\n  ".join(exc.errors))
    if args.ballots:
        bpath = Path(args.ballots)
        if not bpath.is_file():
            raise CliError(EXIT_NOT_FOUND, f"ballots file not found: {bpath}")
        try:
            rows = formats.parse_ballots_csv(bpath.read_bytes(), project.scale)
            project = formats.attach_ballots(project, rows)
        except DocumentError as exc:
            raise CliError(EXIT_PARSE, "ballot errors:\n  " + "\n  ".join(exc.errors))
    return project


def _write_out(args, data: bytes) -> None:
    if args.out:
        Path(args.out).write_bytes(data)
    else:
        sys.stdout.write(data.decode("utf-8"))


def _timestamp(args) -> str | None:
    if getattr(args, "timestamps", False):
        return datetime.datetime.now(datetime.timezone.utc).isoformat()
    return None


def cmd_validate(args) -> int:
    project = _load(args)
    diags = validate_project(project)
    for d in diags:
        print(str(d), file=sys.stderr)
    errors = [d for d in diags if d.severity == "error"]
    return EXIT_DIAGNOSTICS if errors else EXIT_OK


def cmd_weights(args) -> int:
    project = _load(args)
    lines = []
    all_consistent = True
    for group_id, (w, report) in sorted(
            assessment.group_consistency(project, args.method).items()):
        vec = ", ".join(f"{x:.4f}" for x in w.weights)
        verdict = "pass" if report.consistent else "FAIL"
        all_consistent &= report.consistent
        lines.append(f"{group_id}: weights ({vec})")
        lines.append(f"{group_id}: lambda_max {report.lambda_max:.4f}, "
                     f"CI {report.ci:.4f}, RI {report.ri:.2f}, "
                     f"CR {report.cr:.4f} ({verdict})")
    for group_id, children in sorted(project.hierarchy.groups().items()):
        if group_id in project.judgment_matrices:
            continue
        if all(c.local_weight is not None for c in children):
            vec = ", ".join(f"{c.local_weight:.4f}" for c in children)
            lines.append(f"{group_id}: weights ({vec}) [explicit]")
    _write_out(args, ("\n".join(lines) + "\n").encode("utf-8"))
    if not all_consistent and not args.force:
        print("consistency check failed (CR >= 0.1); use --force to proceed",
              file=sys.stderr)
        return EXIT_DIAGNOSTICS
    return EXIT_OK


def _build_report(project: Project, args, with_sensitivity: bool) -> formats.Report:
    results = assessment.evaluate_all(project, args.method, args.operator,
                                      args.force)
    ranking = assessment.rank_providers(results)
    consistency = {g: rep for g, (_, rep)
                   in assessment.group_consistency(project, args.method).items()}
    sensitivity = None
    if with_sensitivity:
        nodes = [n.strip() for n in args.nodes.split(",") if n.strip()]
        deltas = [float(d) for d in args.deltas.split(",") if d.strip()]
        sensitivity = assessment.sensitivity_report(
            project, nodes, deltas, args.method, args.operator, args.force)
    return formats.Report(scale=project.scale, results=tuple(results),
                          ranking=ranking, consistency=consistency,
                          sensitivity=sensitivity)


def cmd_evaluate(args) -> int:
    project = _load(args)
    report = _build_report(project, args, with_sensitivity=False)
    _write_out(args, formats.emit_report(report, args.format, _timestamp(args)))
    return EXIT_OK


def cmd_sensitivity(args) -> int:
    project = _load(args)
    report = _build_report(project, args, with_sensitivity=True)
    _write_out(args, formats.emit_report(report, args.format, _timestamp(args)))
    return EXIT_OK


def cmd_report(args) -> int:
    path = Path(args.report_file)
    if not path.is_file():
        raise CliError(EXIT_NOT_FOUND, f"report file not found: {path}")
    try:
        report = formats.parse_report(path.read_bytes())
    except DocumentError as exc:
        raise CliError(EXIT_PARSE, "parse errors:\n  " + "\n  ".join(exc.errors))
    _write_out(args, formats.emit_report(report, "text"))
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(projects_dir=Path(args.projects_dir))
    uvicorn.run(app, host=args.host, port=args.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cloudrisk",
        description="Multi-criteria security risk assessment: pairwise "
                    "weighting, fuzzy evaluation, ranking and sensitivity.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, ballots=True, output=True):
        p.add_argument("--project", required=True, help="project document (JSON)")
        if ballots:
            p.add_argument("--ballots", help="ballots CSV (overrides ballots_ref)")
        if output:
            p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--method", default="eigenvector",
                       choices=["eigenvector", "geometric-mean"])
        p.add_argument("--operator", default="weighted-sum",
                       choices=["weighted-sum", "max-min"])
        p.add_argument("--force", action="store_true",
                       help="evaluate even when a judgment matrix has CR >= 0.1")

    p = sub.add_parser("validate", help="check a project document's invariants")
    add_common(p, output=False)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("weights", help="print per-group weights and consistency")
    add_common(p)
    p.set_defaults(fn=cmd_weights)

    p = sub.add_parser("evaluate", help="evaluate all providers and write a report")
    add_common(p)
    p.add_argument("--format", default="text", choices=["structured", "text"])
    p.add_argument("--timestamps", action="store_true",
                   help="include a generation timestamp in the report")
    p.set_defaults(fn=cmd_evaluate)

    p = sub.add_parser("sensitivity", help="weight-perturbation sensitivity analysis")
    add_common(p)
    p.add_argument("--format", default="text", choices=["structured", "text"])
    p.add_argument("--nodes", required=True,
                   help="comma-separated criterion/indicator node ids to perturb")
    p.add_argument("--deltas", default="-0.10,+0.10",
                   help="comma-separated weight deltas (fractions)")
    p.add_argument("--timestamps", action="store_true")
    p.set_defaults(fn=cmd_sensitivity)

    p = sub.add_parser("report", help="render a saved structured report as text")
    p.add_argument("report_file", help="structured report (JSON)")
    p.add_argument("--out", help="write output here instead of stdout")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--projects-dir", default=".",
                   help="directory for saved project documents")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except InconsistentMatrixError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except (EvaluationError, ahp.ConvergenceError, ahp.MatrixError) as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ENGINE


if __name__ == "__main__":
    sys.exit(main())
