"""Glue for the end-to-end audit run: extract DD sections, annotate them,
assemble per-admission code sets, partition, and report."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import audit
from .icd9 import top_k_codes
from .nerl import MatchIndex, annotate_document
from .sectioner import find_dd_section, token_count


@dataclass
class AdmissionResult:
    admission_id: str
    section: object  # SectionSpan or None
    spans: list  # accepted EntitySpan, offsets relative to the DD body
    predicted: dict  # CodeId -> list of spans


def extract_sections(notes, rules=None):
    """admission_id -> SectionSpan for every note with a DD section."""
    sections = {}
    for doc in notes:
        if doc.admission_id in sections:
            continue
        span = find_dd_section(doc, rules)
        if span is not None:
            sections[doc.admission_id] = span
    return sections


def annotate_sections(sections, dictionary, model=None, threads=1):
    """Run NER+L over every DD body. Thread count never changes output:
    results are collected in admission-id order."""
    index = MatchIndex(dictionary)
    items = sorted(sections.items())

    def work(item):
        adm_id, section = item
        spans = annotate_document(section.body, dictionary, model, index=index)
        predicted = {}
        for span in spans:
            concept = dictionary.by_id[span.concept_id]
            for code in sorted(concept.codes):
                span.code = code
                predicted.setdefault(code, []).append(span)
        return AdmissionResult(adm_id, section, spans, predicted)

    if threads <= 1:
        results = [work(item) for item in items]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, items))
    return results


def admission_codes(results, assignments):
    """Merge NER results with the assigned-code table into AdmissionCodes.

    Admissions with assigned codes but no extracted DD section are kept
    (audit denominators) with empty predictions."""
    assigned_by_adm = {}
    for adm_id, _, code in assignments:
        assigned_by_adm.setdefault(adm_id, set()).add(code)
    out = {}
    for r in results:
        out[r.admission_id] = audit.AdmissionCodes(
            admission_id=r.admission_id,
            assigned=assigned_by_adm.get(r.admission_id, set()),
            predicted=r.predicted,
            dd_line_count=len(r.section.line_items),
            dd_char_length=len(r.section.body),
        )
    for adm_id, assigned in assigned_by_adm.items():
        if adm_id not in out:
            out[adm_id] = audit.AdmissionCodes(adm_id, assigned, {}, 0, 0)
    return sorted(out.values(), key=lambda a: a.admission_id)


def assignment_scope(assignments, k):
    """The top-k most frequently assigned codes."""
    codes = [code for _, _, code in assignments]
    if not codes:
        return set()
    return set(top_k_codes(codes, k))


def run_audit(notes, assignments, dictionary, model=None, k=400, rules=None, threads=1):
    """Full pipeline over loaded inputs; returns everything a report needs."""
    sections = extract_sections(notes, rules)
    results = annotate_sections(sections, dictionary, model, threads=threads)
    admissions = admission_codes(results, assignments)
    scope = assignment_scope(assignments, k)
    records = audit.partition(admissions, scope)
    coverage = [audit.coverage_fraction(r.section, r.spans) for r in results]
    token_lengths = [token_count(r.section.body) for r in results]
    report = audit.build_report(admissions, records, coverage, token_lengths)
    report["section_stats"] = {
        "found": len(sections),
        "missing": len(notes) - len(sections),
    }
    return {
        "sections": sections,
        "results": results,
        "admissions": admissions,
        "scope": scope,
        "records": records,
        "report": report,
    }


def concept_for_code(dictionary):
    """code -> lexicographically-first concept id carrying it."""
    mapping = {}
    for cid in sorted(dictionary.by_id):
        for code in dictionary.by_id[cid].codes:
            mapping.setdefault(code, cid)
    return mapping
