import json

import pytest

from cloudrisk import (DocumentError, attach_ballots, default_scale,
                       emit_ballots_csv, emit_project, emit_report,
                       evaluate_all, parse_ballots_csv, parse_project,
                       parse_report, rank_providers, sensitivity_report,
                       validate_project)
from cloudrisk import formats
from cloudrisk.assessment import group_consistency

from conftest import DATA_DIR


def make_report(project, with_sensitivity=False):
    results = tuple(evaluate_all(project))
    sensitivity = None
    if with_sensitivity:
        sensitivity = sensitivity_report(
            project, ["data-protection", "access-control"], [-0.10, +0.10])
    return formats.Report(
        scale=project.scale, results=results,
        ranking=rank_providers(list(results)),
        consistency={g: rep for g, (_, rep) in group_consistency(project).items()},
        sensitivity=sensitivity)


class TestParseProject:
    def test_shipped_fixture_parses_and_validates(self, cloud_project):
        assert validate_project(cloud_project) == []

    def test_out_of_scale_judgment_named(self):
        doc = json.loads((DATA_DIR / "cloud_project.json").read_bytes())
        doc["judgments"][0]["cells"][0]["value"] = 10
        with pytest.raises(DocumentError) as exc:
            parse_project(json.dumps(doc).encode())
        assert any("(0,1)" in e and "1..9" in e for e in exc.value.errors)

    def test_truncated_file_reports_byte_offset(self):
        data = (DATA_DIR / "cloud_project.json").read_bytes()[:100]
        with pytest.raises(DocumentError) as exc:
            parse_project(data)
        assert any("byte offset" in e for e in exc.value.errors)

    def test_unknown_field_rejected_by_name(self):
        doc = json.loads((DATA_DIR / "cloud_project.json").read_bytes())
        doc["surprise"] = 1
        doc["scale"]["levels"][0]["color"] = "red"
        with pytest.raises(DocumentError) as exc:
            parse_project(json.dumps(doc).encode())
        msgs = "\n".join(exc.value.errors)
        assert "'surprise'" in msgs
        assert "'color'" in msgs

    def test_errors_are_collected_not_fail_fast(self):
        doc = json.loads((DATA_DIR / "cloud_project.json").read_bytes())
        doc["surprise"] = 1
        doc["judgments"][0]["cells"][0]["value"] = 10
        with pytest.raises(DocumentError) as exc:
            parse_project(json.dumps(doc).encode())
        assert len(exc.value.errors) >= 2

    def test_format_version_checked(self):
        doc = json.loads((DATA_DIR / "cloud_project.json").read_bytes())
        doc["format_version"] = "99"
        with pytest.raises(DocumentError, match="format_version"):
            parse_project(json.dumps(doc).encode())

    def test_thresholds_default_to_sorted_scores(self):
        doc = {
            "format_version": "1",
            "scale": {"levels": [
                {"label": "A", "score": 5}, {"label": "B", "score": 4},
                {"label": "C", "score": 3}, {"label": "D", "score": 2},
                {"label": "E", "score": 1}]},
            "hierarchy": {"id": "g", "name": "g", "kind": "goal", "children": [
                {"id": "c", "name": "c", "kind": "criterion", "children": [
                    {"id": "i", "name": "i", "kind": "indicator"}]}]},
        }
        project = parse_project(json.dumps(doc).encode())
        assert project.scale.thresholds == (1.0, 2.0, 3.0, 4.0, 5.0)


class TestRoundTrip:
    def test_project_semantic_round_trip(self, cloud_project):
        emitted = emit_project(cloud_project)
        reparsed = parse_project(emitted)
        # ballots travel in the CSV, re-attach them for full equality
        rows = parse_ballots_csv(emit_ballots_csv(cloud_project),
                                 cloud_project.scale)
        reparsed = attach_ballots(reparsed, rows)
        assert reparsed == cloud_project
        assert emit_project(reparsed) == emitted

    def test_reevaluation_matches_within_tolerance(self, cloud_project):
        before = {r.provider_id: r.score for r in evaluate_all(cloud_project)}
        reparsed = attach_ballots(
            parse_project(emit_project(cloud_project)),
            parse_ballots_csv(emit_ballots_csv(cloud_project), cloud_project.scale))
        after = {r.provider_id: r.score for r in evaluate_all(reparsed)}
        assert before.keys() == after.keys()
        assert all(abs(before[k] - after[k]) < 1e-9 for k in before)


class TestBallotsCsv:
    def test_row_count(self):
        scale = default_scale()
        lines = ["expert_id,provider_id,factor_id,level"]
        for e in range(5):
            for f in range(3):
                lines.append(f"e{e},p1,f{f},A")
        rows = parse_ballots_csv("\n".join(lines).encode(), scale)
        assert len(rows) == 15

    def test_case_insensitive_level(self):
        data = b"expert_id,provider_id,factor_id,level\ne1,p1,f1,a\n"
        rows = parse_ballots_csv(data, default_scale())
        assert rows[0][1].level_index == 0

    def test_unknown_level_with_row_number(self):
        data = b"expert_id,provider_id,factor_id,level\ne1,p1,f1,A\ne2,p1,f1,F\n"
        with pytest.raises(DocumentError) as exc:
            parse_ballots_csv(data, default_scale())
        assert any("row 3" in e and "'F'" in e for e in exc.value.errors)

    def test_bad_header(self):
        data = b"expert,provider,factor,level\ne1,p1,f1,A\n"
        with pytest.raises(DocumentError, match="header"):
            parse_ballots_csv(data, default_scale())

    def test_duplicate_row(self):
        data = (b"expert_id,provider_id,factor_id,level\n"
                b"e1,p1,f1,A\ne1,p1,f1,B\n")
        with pytest.raises(DocumentError, match="duplicate"):
            parse_ballots_csv(data, default_scale())

    def test_crlf_accepted(self):
        data = b"expert_id,provider_id,factor_id,level\r\ne1,p1,f1,B\r\n"
        rows = parse_ballots_csv(data, default_scale())
        assert rows == [("p1", rows[0][1])]
        assert rows[0][1].level_index == 1

    def test_unknown_provider_on_attach(self, cloud_project):
        data = b"expert_id,provider_id,factor_id,level\ne1,ZZZ,f1,A\n"
        rows = parse_ballots_csv(data, default_scale())
        with pytest.raises(DocumentError, match="unknown provider"):
            attach_ballots(cloud_project, rows)


class TestReports:
    def test_text_contains_ranking_line(self, cloud_project):
        text = emit_report(make_report(cloud_project), "text").decode()
        assert "Ranking: C > A > B" in text
        assert "CR 0.0032" in text

    def test_empty_sensitivity_section_omitted(self, cloud_project):
        text = emit_report(make_report(cloud_project), "text").decode()
        assert "Sensitivity" not in text

    def test_sensitivity_verdict_rendered(self, cloud_project):
        text = emit_report(make_report(cloud_project, with_sensitivity=True),
                           "text").decode()
        assert "stable: true" in text

    def test_structured_round_trip_byte_equal(self, cloud_project):
        report = make_report(cloud_project, with_sensitivity=True)
        emitted = emit_report(report, "structured")
        assert emit_report(parse_report(emitted), "structured") == emitted

    def test_membership_vectors_four_decimals(self, cloud_project):
        text = emit_report(make_report(cloud_project), "text").decode()
        assert "[0.6600 0.3400 0.0000 0.0000 0.0000]" in text
