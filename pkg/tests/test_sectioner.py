import pytest
from hypothesis import given
from hypothesis import strategies as st

from ddaudit.sectioner import (
    NoteDocument,
    SectionSpan,
    corpus_section_stats,
    find_dd_section,
    split_line_items,
)


def doc(text, adm="1"):
    return NoteDocument("n" + adm, adm, "Discharge summary", text)


def test_simple_section():
    text = "Discharge Diagnosis:\nSeizures.\n\nDischarge Condition:\nStable\n"
    span = find_dd_section(doc(text))
    assert span is not None
    assert span.body == "Seizures."
    assert text[span.start : span.end] == span.body
    assert span.line_items == ["Seizures."]


def test_case_insensitive_plural_heading():
    text = "DISCHARGE DIAGNOSES:\n1. Acute ST segment Elevation Myocardial Infarction\n\n\n"
    span = find_dd_section(doc(text))
    assert span is not None
    assert span.line_items == ["Acute ST segment Elevation Myocardial Infarction"]


def test_no_heading():
    assert find_dd_section(doc("History of Present Illness:\nNone remarkable.\n")) is None
    assert find_dd_section(doc("")) is None


def test_body_terminates_at_next_heading():
    text = (
        "Some preamble.\n\nDischarge Diagnosis:\nCAD now s/p CABG\n"
        "HTN, DM, Osteoarthritis, Dyslipidemia\nDischarge Medications:\n1. Aspirin\n"
    )
    span = find_dd_section(doc(text))
    assert span.body == "CAD now s/p CABG\nHTN, DM, Osteoarthritis, Dyslipidemia"
    assert len(span.line_items) == 2


def test_body_terminates_at_double_blank():
    text = "Final Diagnosis:\nPneumonia\n\n\nfree text continues without heading\n"
    span = find_dd_section(doc(text))
    assert span.body == "Pneumonia"


def test_heading_with_inline_body():
    span = find_dd_section(doc("Discharge Diagnosis: Seizures.\n\n\nOther text\n"))
    assert span.body == "Seizures."


def test_first_heading_wins():
    text = "Discharge Diagnosis:\nFirst.\n\n\nDischarge Diagnosis:\nSecond.\n"
    assert find_dd_section(doc(text)).body == "First."


def test_split_line_items_subheaders():
    body = (
        "Primary Diagnoses:\n1. Acute ST segment Elevation Myocardial Infarction\n"
        "Secondary Diagnoses:\n1. Hypertension\n2. Hyperlipidemia"
    )
    section = SectionSpan("Discharge Diagnosis", 0, len(body), body)
    assert split_line_items(section) == [
        "Acute ST segment Elevation Myocardial Infarction",
        "Hypertension",
        "Hyperlipidemia",
    ]


@pytest.mark.parametrize(
    "line,expected",
    [("- Sepsis", "Sepsis"), ("# Sepsis", "Sepsis"), ("3) Sepsis", "Sepsis"), ("12. Sepsis", "Sepsis")],
)
def test_enumeration_prefixes(line, expected):
    section = SectionSpan("h", 0, len(line), line)
    assert split_line_items(section) == [expected]


def test_items_are_substrings_of_body():
    body = "1. Acute renal failure\n- HTN, DM\nSecondary diagnosis:\n#Anemia"
    section = SectionSpan("h", 0, len(body), body)
    for item in split_line_items(section):
        assert item in body


def test_corpus_section_stats():
    docs = [
        doc("Discharge Diagnosis:\none two three four\n\n\n", "1"),
        doc("Discharge Diagnosis:\n%s\n\n\n" % " ".join(["w"] * 10), "2"),
        doc("Discharge Diagnosis:\n%s\n\n\n" % " ".join(["w"] * 10), "3"),
        doc("No section here at all\n", "4"),
    ]
    s = corpus_section_stats(docs)
    assert s.found == 3
    assert s.missing == 1
    assert s.token_lengths.mean == pytest.approx(8)
    assert s.token_lengths.median == 10


body_text = st.text(
    alphabet="abcdefgh XYZ.,\n", min_size=1, max_size=120
).filter(lambda s: s.strip() and ":" not in s)


@given(body_text, st.sampled_from(["Discharge Diagnosis", "FINAL DIAGNOSES"]))
def test_offset_fidelity_fuzz(body, heading):
    text = "Intro line.\n\n%s:\n%s\n\n\nNext Section:\nrest\n" % (heading, body)
    d = doc(text)
    span = find_dd_section(d)
    assert span is not None
    assert text[span.start : span.end] == span.body
    assert span.body == span.body.strip()
    # Determinism
    again = find_dd_section(d)
    assert (again.start, again.end, again.body) == (span.start, span.end, span.body)


@given(st.lists(st.sampled_from(["Sepsis", "HTN", "Acute renal failure", "Pneumonia"]),
                min_size=1, max_size=6))
def test_planted_sections_always_found(items):
    text = "Discharge Diagnosis:\n%s\n\nDischarge Condition:\nStable\n" % "\n".join(
        "%d. %s" % (i + 1, item) for i, item in enumerate(items)
    )
    span = find_dd_section(doc(text))
    assert span is not None
    assert span.line_items == items
