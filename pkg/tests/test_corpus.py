import math

import pytest

from ddaudit.audit import PartitionRecord, partition
from ddaudit.corpus import (
    CorpusFormatError,
    SynthConfig,
    ValidationCoverageError,
    emit_silver_standard,
    generate_synthetic,
    load_assignments,
    load_notes,
    load_silver_standard,
    save_assignments,
    save_notes,
    vocabulary_dictionary,
)
from ddaudit.icd9 import parse_code
from ddaudit.nerl import EntitySpan
from ddaudit.pipeline import run_audit


def test_load_notes_roundtrip(tmp_path):
    path = tmp_path / "notes.csv"
    path.write_text(
        'ROW_ID,HADM_ID,CATEGORY,TEXT\n'
        '1,100001,Discharge summary,"Line one\nLine two"\n'
        '2,100002,Nursing,plain\n'
    )
    docs = load_notes(path)
    assert len(docs) == 2
    assert docs[0].text == "Line one\nLine two"
    assert load_notes(path, category="Discharge summary")[0].admission_id == "100001"
    save_notes(docs, tmp_path / "roundtrip.csv")
    again = load_notes(tmp_path / "roundtrip.csv")
    assert [(d.note_id, d.admission_id, d.category, d.text) for d in again] == [
        (d.note_id, d.admission_id, d.category, d.text) for d in docs
    ]


def test_load_notes_bad_header(tmp_path):
    path = tmp_path / "notes.csv"
    path.write_text("ROW_ID,HADM_ID,CATEGORY\n1,2,3\n")
    with pytest.raises(CorpusFormatError, match="TEXT"):
        load_notes(path)


def test_load_assignments(tmp_path):
    path = tmp_path / "dx.csv"
    path.write_text("HADM_ID,SEQ_NUM,ICD9_CODE\n100001,1,4019\n100001,2,XYZ\n")
    rows, errors = load_assignments(path)
    assert rows == [("100001", 1, parse_code("4019"))]
    assert len(errors) == 1 and errors[0][1] == "XYZ"
    save_assignments(rows, tmp_path / "rt.csv")
    again, errs = load_assignments(tmp_path / "rt.csv")
    assert again == rows and errs == []


def test_load_assignments_empty(tmp_path):
    path = tmp_path / "dx.csv"
    path.write_text("HADM_ID,SEQ_NUM,ICD9_CODE\n")
    assert load_assignments(path) == ([], [])


def test_synthetic_deterministic():
    config = SynthConfig(n_admissions=25, undercode_rate=0.3, synonym_noise_rate=0.2, seed=7)
    b1, g1 = generate_synthetic(config)
    b2, g2 = generate_synthetic(config)
    assert [(n.note_id, n.text) for n in b1.notes] == [(n.note_id, n.text) for n in b2.notes]
    assert b1.assignments == b2.assignments
    assert g1 == g2


def test_synthetic_no_undercoding_matches_truth():
    bundle, truth = generate_synthetic(SynthConfig(n_admissions=40, seed=1))
    by_adm = {}
    for adm, _, code in bundle.assignments:
        by_adm.setdefault(adm, set()).add(code)
    assert by_adm == truth


def test_synthetic_omissions_binomial_bound():
    config = SynthConfig(n_admissions=2000, undercode_rate=0.2, seed=11)
    bundle, truth = generate_synthetic(config)
    planted = sum(len(v) for v in truth.values())
    kept = len(bundle.assignments)
    omitted = planted - kept
    sigma = math.sqrt(planted * 0.2 * 0.8)
    assert abs(omitted - 0.2 * planted) <= 3 * sigma


def test_synthetic_end_to_end_clean():
    bundle, truth = generate_synthetic(SynthConfig(n_admissions=30, seed=3))
    d = vocabulary_dictionary()
    run = run_audit(bundle.notes, bundle.assignments, d, k=400)
    p_na = [r for r in run["records"] if r.bucket == "P_NA"]
    assert p_na == []
    p_a = {(r.admission_id, r.code) for r in run["records"] if r.bucket == "P_A"}
    for adm_id, codes in truth.items():
        for code in codes:
            assert (adm_id, code) in p_a


def span(start, end, text="x"):
    return EntitySpan(start, end, (0, 0), "C", None, 1.0, "unambiguous", surface=text)


def test_silver_standard_contract(tmp_path):
    a, b, c, d = (parse_code(x) for x in ["4019", "4280", "0389", "486"])
    records = [
        PartitionRecord("1", a, "P_A", [span(0, 4, "essential hypertension")]),
        PartitionRecord("1", b, "P_NA", [span(6, 9, "chf")]),
        PartitionRecord("1", c, "A_NP"),
        PartitionRecord("2", d, "P_NA", [span(2, 5, "pna")]),
    ]
    validation = {a: True, b: True, d: False}
    path = tmp_path / "silver.csv"
    rows = emit_silver_standard(records, validation, path)
    assert [(r.admission_id, r.code.canonical, r.validated) for r in rows] == [
        ("1", "0389", "no"),
        ("1", "4019", "yes"),
        ("1", "4280", "new_code"),
    ]
    # A_NP rows carry no span; failing code 486 dropped entirely.
    assert rows[0].span_start is None and rows[0].span_text == ""
    assert rows[1].span_text == "essential hypertension"
    loaded = load_silver_standard(path)
    assert [(r.admission_id, r.code, r.validated, r.span_start, r.span_end, r.span_text)
            for r in loaded] == [
        (r.admission_id, r.code, r.validated, r.span_start, r.span_end, r.span_text)
        for r in rows
    ]


def test_silver_standard_missing_validation(tmp_path):
    a = parse_code("4019")
    records = [PartitionRecord("1", a, "P_A", [span(0, 3)])]
    with pytest.raises(ValidationCoverageError, match="4019"):
        emit_silver_standard(records, {}, tmp_path / "s.csv")


def test_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(n_admissions=1, undercode_rate=1.5)
    with pytest.raises(ValueError):
        SynthConfig(n_admissions=1, code_vocabulary=[])
