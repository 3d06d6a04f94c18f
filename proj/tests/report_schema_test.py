# report_schema_test.py
# Copyright 2026 The incar Authors
# License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
"""Runs `incar report` and validates the JSON against schemas/report.schema.json."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema

KEY_ORDER = ["system", "reference_seconds", "missed_seconds", "false_alarm_seconds",
             "confusion_seconds", "missed_pct", "false_alarm_pct", "confusion_pct",
             "der_pct", "speaker_map"]


def main(cli, schema_path):
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        (tmp / "ref.rttm").write_text(
            "SPEAKER rec 1 0.00 10.00 <NA> <NA> A <NA> <NA>\n"
            "SPEAKER rec 1 12.00 3.00 <NA> <NA> B <NA> <NA>\n")
        (tmp / "hyp.rttm").write_text(
            "SPEAKER rec 1 0.00 8.00 <NA> <NA> x <NA> <NA>\n"
            "SPEAKER rec 1 11.50 3.00 <NA> <NA> y <NA> <NA>\n")
        (tmp / "gss.txt").write_text("3.5\n-1.25\n7\n")
        (tmp / "bad.txt").write_text("-inf\n2\n")
        (tmp / "empty.txt").write_text("")
        reports = []
        for args in (
            [],
            ["--reference", tmp / "ref.rttm", "--hyp", f"sys={tmp / 'hyp.rttm'}",
             "--hyp", tmp / "ref.rttm", "--sisdr", f"gss={tmp / 'gss.txt'}",
             "--sisdr", f"bad={tmp / 'bad.txt'}", "--sisdr", tmp / "empty.txt"],
        ):
            out = tmp / "report.json"
            subprocess.run([cli, "report", *map(str, args), "--json", str(out)], check=True)
            text = out.read_text()
            report = json.loads(text)
            validator.validate(report)
            assert json.loads(json.dumps(report)) == report
            reports.append(report)
        assert reports[0] == {"der": [], "si_sdr": []}
        full = reports[1]
        assert [list(row) for row in full["der"]] == [KEY_ORDER] * 2
        assert full["der"][0]["system"] == "sys"
        assert full["si_sdr"][1]["min_db"] == "-inf"
        assert full["si_sdr"][2]["count"] == 0
    print("report schema OK")


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
