"""CLI behaviour: literal parsing, exit codes, report schema."""

import json
import math

import pytest

from mu_lab.cli import format_complex, main, parse_complex


class TestComplexLiterals:
    @pytest.mark.parametrize("text,value", [
        ("0.2+0.1i", 0.2 + 0.1j),
        ("-0.3", -0.3 + 0j),
        ("1i", 1j),
        ("-i", -1j),
        ("2.5e-1-1e-2i", 0.25 - 0.01j),
        ("0", 0j),
        ("1.25j", 1.25j),
    ])
    def test_parse(self, text, value):
        assert parse_complex(text) == value

    def test_reject_garbage(self):
        for bad in ("", "abc", "1+2", "i1"):
            with pytest.raises(ValueError):
                parse_complex(bad)

    def test_round_trip_lossless(self):
        z = complex(0.12345678901234567, -9.876543210987654e-05)
        assert parse_complex(format_complex(z)) == z


class TestExitCodes:
    def test_eval_ok(self, capsys):
        assert main(["eval", "eta", "--tau", "0+1i"]) == 0
        out = capsys.readouterr().out.strip()
        assert out.startswith("0.768225422326")

    def test_eval_matches_library(self, capsys):
        from mu_lab.mu import mu_zwegers
        from mu_lab.qcore import QContext
        assert main(["eval", "mu", "--u", "0.2+0.1i", "--v", "0.35-0.05i",
                     "--tau", "0+1i"]) == 0
        printed = capsys.readouterr().out.strip()
        want = mu_zwegers(0.2 + 0.1j, 0.35 - 0.05j, QContext(1j))
        assert parse_complex(printed) == pytest.approx(want, abs=1e-13)

    def test_eval_usage_error(self, capsys):
        assert main(["eval", "nope", "--tau", "0+1i"]) == 2
        assert main(["eval", "mu", "--tau", "0+1i"]) == 2  # missing args

    def test_eval_pole_is_exit_3(self, capsys):
        assert main(["eval", "mu", "--u", "0", "--v", "0.3",
                     "--tau", "0+1i"]) == 3

    def test_verify_unknown_suite(self, capsys):
        assert main(["verify", "--suite", "nope"]) == 2

    def test_verify_unknown_id(self, capsys):
        assert main(["verify", "--id", "NOPE-9"]) == 2

    def test_verify_passes_and_writes_schema_valid_report(
            self, capsys, tmp_path):
        jsonschema = pytest.importorskip("jsonschema")
        report = tmp_path / "report.json"
        code = main(["verify", "--suite", "theta", "--seed", "1",
                     "--samples", "3", "--json", "--report", str(report)])
        assert code == 0
        payload = json.loads(report.read_text())
        from importlib import resources
        schema = json.loads(
            resources.files("mu_lab").joinpath("report_schema.json")
            .read_text())
        jsonschema.validate(payload, schema)
        assert payload["all_pass"] is True
        assert payload["suite"] == "theta"
        assert {"id", "paper_tag", "max_rel_residual", "tol", "pass"} <= set(
            payload["results"][0])

    def test_verify_single_id(self, capsys):
        assert main(["verify", "--id", "TH-1", "--samples", "2"]) == 0

    def test_list_counts(self, capsys):
        assert main(["list"]) == 0
        out = capsys.readouterr().out
        count = int(out.strip().rsplit("\n", 1)[-1].split()[0])
        assert count >= 60

    def test_list_filter_and_json(self, capsys):
        assert main(["list", "--suite", "completion", "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload and all(r["suite"] == "completion" for r in payload)

    def test_list_unknown_suite(self, capsys):
        assert main(["list", "--suite", "nope"]) == 2
