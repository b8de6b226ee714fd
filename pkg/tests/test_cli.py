import json
import os

import pytest

from ddaudit.cli import main


def run(args):
    return main(args)


def test_synth_then_full_pipeline(tmp_path):
    data = tmp_path / "data"
    out = tmp_path / "out"
    run(["synth", "--out", str(data), "--n-admissions", "40", "--seed", "9"])
    for name in ("notes.csv", "assignments.csv", "dictionary.csv", "ground_truth.csv", "config.json"):
        assert (data / name).exists()

    run(
        [
            "extract-dd",
            "--notes", str(data / "notes.csv"),
            "--out", str(out / "dd"),
        ]
    )
    stats = json.loads((out / "dd" / "section_stats.json").read_text())
    assert stats["found"] == 40 and stats["missing"] == 0

    run(
        [
            "annotate",
            "--notes", str(data / "notes.csv"),
            "--dictionary", str(data / "dictionary.csv"),
            "--out", str(out / "ann"),
        ]
    )
    assert (out / "ann" / "spans.csv").exists()

    run(
        [
            "report",
            "--notes", str(data / "notes.csv"),
            "--assignments", str(data / "assignments.csv"),
            "--dictionary", str(data / "dictionary.csv"),
            "--out", str(out / "report"),
        ]
    )
    report = json.loads((out / "report" / "report.json").read_text())
    # Clean corpus: nothing predicted-but-unassigned.
    assert all(row["p_na"] == 0 for row in report["per_code"])
    assert (out / "report" / "per_code.csv").exists()
    assert (out / "report" / "config.json").exists()


def test_report_deterministic_across_threads(tmp_path):
    data = tmp_path / "data"
    run(["synth", "--out", str(data), "--n-admissions", "30", "--seed", "2",
         "--undercode-rate", "0.2"])
    outputs = []
    for i, threads in enumerate((1, 1, 4)):
        out = tmp_path / ("out%d" % i)
        run(
            [
                "report",
                "--notes", str(data / "notes.csv"),
                "--assignments", str(data / "assignments.csv"),
                "--dictionary", str(data / "dictionary.csv"),
                "--threads", str(threads),
                "--out", str(out),
            ]
        )
        outputs.append(
            ((out / "report.json").read_bytes(), (out / "per_code.csv").read_bytes())
        )
    assert outputs[0] == outputs[1] == outputs[2]


def test_partition_command(tmp_path):
    data = tmp_path / "data"
    run(["synth", "--out", str(data), "--n-admissions", "10", "--seed", "4",
         "--undercode-rate", "0.3"])
    out = tmp_path / "part"
    run(
        [
            "partition",
            "--notes", str(data / "notes.csv"),
            "--assignments", str(data / "assignments.csv"),
            "--dictionary", str(data / "dictionary.csv"),
            "--out", str(out),
        ]
    )
    lines = (out / "partition.csv").read_text().strip().split("\n")
    assert lines[0] == "admission_id,code,bucket,span_start,span_end,span_text"
    assert len(lines) > 1
    buckets = {line.split(",")[2] for line in lines[1:]}
    assert "P_NA" in buckets  # planted undercoding shows up


def test_emit_silver_requires_validation(tmp_path):
    data = tmp_path / "data"
    run(["synth", "--out", str(data), "--n-admissions", "5", "--seed", "1"])
    with pytest.raises(SystemExit, match="serve"):
        run(
            [
                "emit-silver",
                "--notes", str(data / "notes.csv"),
                "--assignments", str(data / "assignments.csv"),
                "--dictionary", str(data / "dictionary.csv"),
                "--validation", str(tmp_path / "missing.json"),
                "--out", str(tmp_path / "silver"),
            ]
        )


def test_emit_silver_roundtrip(tmp_path):
    data = tmp_path / "data"
    run(["synth", "--out", str(data), "--n-admissions", "15", "--seed", "6",
         "--undercode-rate", "0.2"])
    validation_path = tmp_path / "validation.json"
    # Pass every vocabulary code.
    import csv

    with open(data / "dictionary.csv") as f:
        codes = sorted({row["icd9_code"] for row in csv.DictReader(f)})
    validation_path.write_text(json.dumps({c: True for c in codes}))
    out = tmp_path / "silver"
    run(
        [
            "emit-silver",
            "--notes", str(data / "notes.csv"),
            "--assignments", str(data / "assignments.csv"),
            "--dictionary", str(data / "dictionary.csv"),
            "--validation", str(validation_path),
            "--out", str(out),
        ]
    )
    from ddaudit.corpus import load_silver_standard

    rows = load_silver_standard(out / "silver_standard.csv")
    assert rows
    assert {r.validated for r in rows} <= {"yes", "new_code", "no"}


def test_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("AUDIT_SEED", "123")
    from ddaudit.cli import build_parser

    args = build_parser().parse_args(["synth", "--out", str(tmp_path)])
    assert args.seed == 123
