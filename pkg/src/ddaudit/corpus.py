"""Corpus ingestion, the seeded synthetic-corpus generator, and
silver-standard dataset emission."""

import csv
import random
from dataclasses import dataclass, field

from .audit import A_NP, P_A, P_NA
from .icd9 import Concept, ConceptDictionary, InvalidCodeError, normalize_name, parse_code
from .sectioner import NoteDocument

NOTES_HEADER = ["ROW_ID", "HADM_ID", "CATEGORY", "TEXT"]
ASSIGNMENTS_HEADER = ["HADM_ID", "SEQ_NUM", "ICD9_CODE"]
SILVER_HEADER = ["admission_id", "code", "validated", "span_start", "span_end", "span_text"]

VALIDATED_YES = "yes"
VALIDATED_NEW = "new_code"
VALIDATED_NO = "no"


class CorpusFormatError(ValueError):
    pass


@dataclass
class CorpusBundle:
    notes: list  # list of NoteDocument
    assignments: list  # list of (admission_id, seq_num, CodeId)

    def orphan_admissions(self):
        known = {n.admission_id for n in self.notes}
        return sorted({a for a, _, _ in self.assignments if a not in known})


@dataclass
class SilverStandardRow:
    admission_id: str
    code: object
    validated: str
    span_start: object = None
    span_end: object = None
    span_text: str = ""


def load_notes(path, category=None):
    """Read the note table CSV; TEXT may contain quoted embedded newlines."""
    docs = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != NOTES_HEADER:
            raise CorpusFormatError(
                "bad notes header %r, expected %r" % (reader.fieldnames, NOTES_HEADER)
            )
        for i, row in enumerate(reader, start=2):
            if any(row[col] is None for col in NOTES_HEADER):
                raise CorpusFormatError("malformed notes row %d" % i)
            if category is not None and row["CATEGORY"] != category:
                continue
            docs.append(NoteDocument(row["ROW_ID"], row["HADM_ID"], row["CATEGORY"], row["TEXT"]))
    return docs


def load_assignments(path):
    """Read the assigned-code table; invalid codes go to an error report."""
    rows, errors = [], []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != ASSIGNMENTS_HEADER:
            raise CorpusFormatError(
                "bad assignments header %r, expected %r" % (reader.fieldnames, ASSIGNMENTS_HEADER)
            )
        for i, row in enumerate(reader, start=2):
            try:
                code = parse_code(row["ICD9_CODE"])
            except InvalidCodeError as e:
                errors.append((i, row["ICD9_CODE"], str(e)))
                continue
            rows.append((row["HADM_ID"], int(row["SEQ_NUM"]), code))
    return rows, errors


def save_notes(docs, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(NOTES_HEADER)
        for d in docs:
            writer.writerow([d.note_id, d.admission_id, d.category, d.text])


def save_assignments(rows, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ASSIGNMENTS_HEADER)
        for adm, seq, code in rows:
            writer.writerow([adm, seq, code.canonical])


# --- synthetic corpus ------------------------------------------------------

# Small ICD-9 vocabulary with synonyms; first name form is preferred.
DEFAULT_VOCABULARY = [
    ("4019", ["Essential hypertension", "elevated blood pressure"]),
    ("41401", ["Coronary atherosclerosis", "coronary artery disease"]),
    ("4280", ["Congestive heart failure", "cardiac failure"]),
    ("42731", ["Atrial fibrillation", "irregular atrial rhythm"]),
    ("0389", ["Unspecified septicemia", "bloodstream infection"]),
    ("25000", ["Diabetes mellitus type two", "adult onset diabetes"]),
    ("2724", ["Hyperlipidemia", "elevated cholesterol levels"]),
    ("5849", ["Acute kidney failure", "acute renal failure"]),
    ("5859", ["Chronic kidney disease", "chronic renal insufficiency"]),
    ("486", ["Pneumonia organism unspecified", "lung consolidation infection"]),
    ("49390", ["Asthma unspecified", "reactive airway disease"]),
    ("51881", ["Acute respiratory failure", "ventilatory failure"]),
    ("2859", ["Anemia unspecified", "low hemoglobin state"]),
    ("2762", ["Acidosis", "metabolic acid excess"]),
    ("5990", ["Urinary tract infection", "bladder infection"]),
    ("53081", ["Esophageal reflux", "gastroesophageal reflux disease"]),
    ("30000", ["Anxiety state unspecified", "generalized anxious state"]),
    ("311", ["Depressive disorder", "clinical depression"]),
    ("41519", ["Pulmonary embolism", "lung clot embolus"]),
    ("34590", ["Epilepsy unspecified", "recurrent seizure disorder"]),
    ("7140", ["Rheumatoid arthritis", "inflammatory joint arthritis"]),
    ("5712", ["Alcoholic cirrhosis", "alcohol related liver scarring"]),
    ("56210", ["Diverticulosis of colon", "colonic diverticular disease"]),
    ("2851", ["Acute posthemorrhagic anemia", "blood loss anemia"]),
    ("99591", ["Sepsis", "systemic infection response"]),
    ("4589", ["Hypotension unspecified", "low blood pressure state"]),
    ("78039", ["Other convulsions", "convulsive episodes"]),
    ("V4581", ["Aortocoronary bypass status", "prior bypass graft status"]),
    ("E8889", ["Unspecified fall", "accidental fall injury"]),
    ("7907", ["Bacteremia", "bacteria in bloodstream"]),
]


@dataclass
class SynthConfig:
    n_admissions: int
    code_vocabulary: list = field(default_factory=lambda: list(DEFAULT_VOCABULARY))
    undercode_rate: float = 0.0
    synonym_noise_rate: float = 0.0
    seed: int = 0
    min_codes: int = 1
    max_codes: int = 12

    def __post_init__(self):
        if not 0.0 <= self.undercode_rate < 1.0:
            raise ValueError("undercode_rate must be in [0,1)")
        if not 0.0 <= self.synonym_noise_rate < 1.0:
            raise ValueError("synonym_noise_rate must be in [0,1)")
        if not self.code_vocabulary:
            raise ValueError("code_vocabulary is empty")


def vocabulary_dictionary(vocabulary=None):
    """Build the concept dictionary matching a synthetic vocabulary."""
    d = ConceptDictionary()
    for raw_code, names in vocabulary or DEFAULT_VOCABULARY:
        code = parse_code(raw_code)
        d.add_concept(
            Concept(
                concept_id="C_" + code.canonical,
                preferred_name=names[0],
                name_forms=[(n, normalize_name(n)) for n in names],
                codes={code},
            )
        )
    d.check_consistency()
    return d


_NOTE_TEMPLATE = """Admission Date:  [**{adm}**]

History of Present Illness:
Patient admitted with the above complaints. Hospital course was
notable for gradual improvement on supportive care.

Discharge Medications:
1. Aspirin 81 mg daily
2. Multivitamin one tablet daily

Discharge Diagnosis:
{diagnoses}

Discharge Condition:
Stable, ambulating independently.
"""


def generate_synthetic(config):
    """Deterministic synthetic corpus with planted under-coding.

    Each admission gets a code set rendered as a DD list (non-preferred
    name forms at synonym_noise_rate); the assignments table independently
    drops each truly present code at undercode_rate. Returns the bundle
    and the per-admission ground-truth code sets.
    """
    vocab = [(parse_code(c), names) for c, names in config.code_vocabulary]
    notes, assignments = [], []
    ground_truth = {}
    for i in range(config.n_admissions):
        rng = random.Random("%d:%d" % (config.seed, i))
        adm_id = str(100000 + i)
        n_codes = rng.randint(config.min_codes, min(config.max_codes, len(vocab)))
        chosen = rng.sample(vocab, n_codes)
        lines = []
        for j, (code, names) in enumerate(chosen, start=1):
            name = names[0]
            if len(names) > 1 and rng.random() < config.synonym_noise_rate:
                name = rng.choice(names[1:])
            lines.append("%d. %s" % (j, name))
        text = _NOTE_TEMPLATE.format(adm=adm_id, diagnoses="\n".join(lines))
        notes.append(NoteDocument(str(i + 1), adm_id, "Discharge summary", text))
        ground_truth[adm_id] = {code for code, _ in chosen}
        seq = 1
        for code, _ in chosen:
            if rng.random() < config.undercode_rate:
                continue
            assignments.append((adm_id, seq, code))
            seq += 1
    return CorpusBundle(notes, assignments), ground_truth


# --- silver standard -------------------------------------------------------

_BUCKET_TO_VALIDATED = {P_A: VALIDATED_YES, P_NA: VALIDATED_NEW, A_NP: VALIDATED_NO}


class ValidationCoverageError(ValueError):
    pass


def emit_silver_standard(records, validation_results, path):
    """Write the silver-standard table; codes failing validation are
    dropped entirely. validation_results maps CodeId -> bool(passed) and
    must cover every code seen in P_A or P_NA."""
    rows = []
    for r in records:
        if r.bucket in (P_A, P_NA):
            if r.code not in validation_results:
                raise ValidationCoverageError(
                    "no validation result for predicted code %s" % r.code.canonical
                )
        passed = validation_results.get(r.code, True)
        if not passed:
            continue
        span = min(r.spans, key=lambda s: s.start) if r.spans else None
        rows.append(
            SilverStandardRow(
                admission_id=r.admission_id,
                code=r.code,
                validated=_BUCKET_TO_VALIDATED[r.bucket],
                span_start=span.start if span else None,
                span_end=span.end if span else None,
                span_text=span.surface if span else "",
            )
        )
    rows.sort(key=lambda r: (r.admission_id, r.code.canonical))
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SILVER_HEADER)
        for r in rows:
            writer.writerow(
                [
                    r.admission_id,
                    r.code.canonical,
                    r.validated,
                    "" if r.span_start is None else r.span_start,
                    "" if r.span_end is None else r.span_end,
                    r.span_text,
                ]
            )
    return rows


def load_silver_standard(path):
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != SILVER_HEADER:
            raise CorpusFormatError(
                "bad silver-standard header %r, expected %r" % (reader.fieldnames, SILVER_HEADER)
            )
        for row in reader:
            if row["validated"] not in (VALIDATED_YES, VALIDATED_NEW, VALIDATED_NO):
                raise CorpusFormatError("bad validated value %r" % row["validated"])
            rows.append(
                SilverStandardRow(
                    admission_id=row["admission_id"],
                    code=parse_code(row["code"]),
                    validated=row["validated"],
                    span_start=int(row["span_start"]) if row["span_start"] else None,
                    span_end=int(row["span_end"]) if row["span_end"] else None,
                    span_text=row["span_text"],
                )
            )
    return rows
