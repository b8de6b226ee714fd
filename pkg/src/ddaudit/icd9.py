"""ICD-9-CM code handling, chapter grouping, and the concept dictionary."""

import csv
import hashlib
import re
from collections import Counter
from dataclasses import dataclass, field

_CODE_RE = re.compile(r"^(\d{3,5}|V\d{2,4}|E\d{3,4})$")

# Standard ICD-9-CM top-level chapters plus the V and E supplementary groups.
# Numeric ranges are over the 3-digit code root.
CHAPTERS = [
    ("001-139", 1, 139),
    ("140-239", 140, 239),
    ("240-279", 240, 279),
    ("280-289", 280, 289),
    ("290-319", 290, 319),
    ("320-389", 320, 389),
    ("390-459", 390, 459),
    ("460-519", 460, 519),
    ("520-579", 520, 579),
    ("580-629", 580, 629),
    ("630-679", 630, 679),
    ("680-709", 680, 709),
    ("710-739", 710, 739),
    ("740-759", 740, 759),
    ("760-779", 760, 779),
    ("780-799", 780, 799),
    ("800-999", 800, 999),
    ("V01-V99", None, None),
    ("E000-E999", None, None),
]

N_CHAPTERS = len(CHAPTERS)

_NORM_TOKEN_RE = re.compile(r"[a-z0-9]+")


class InvalidCodeError(ValueError):
    pass


class DictionaryError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class CodeId:
    """An ICD-9-CM diagnosis code, stored dotless ("4019")."""

    canonical: str

    @property
    def display(self):
        root = 4 if self.canonical.startswith("E") else 3
        if len(self.canonical) <= root:
            return self.canonical
        return self.canonical[:root] + "." + self.canonical[root:]

    def __str__(self):
        return self.canonical


def parse_code(raw):
    """Normalize a raw code string ("401.9" or "4019") to a CodeId."""
    cleaned = raw.strip().upper().replace(".", "")
    if not _CODE_RE.match(cleaned):
        raise InvalidCodeError("not a valid ICD-9-CM code: %r" % raw)
    return CodeId(cleaned)


@dataclass(frozen=True)
class Chapter:
    ordinal: int
    label: str


def chapter_of(code):
    """Map a code to its top-level chapter (numeric ranges, then V, then E)."""
    c = code.canonical
    if c.startswith("V"):
        return Chapter(N_CHAPTERS - 2, CHAPTERS[-2][0])
    if c.startswith("E"):
        return Chapter(N_CHAPTERS - 1, CHAPTERS[-1][0])
    root = int(c[:3])
    for i, (label, low, high) in enumerate(CHAPTERS[:-2]):
        if low <= root <= high:
            return Chapter(i, label)
    raise InvalidCodeError("code root %r outside all chapters" % c)


def top_k_codes(assigned, k):
    """The k most frequent codes, ties broken by canonical form ascending."""
    if k < 1:
        raise ValueError("k must be >= 1")
    counts = Counter(assigned)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].canonical))
    return [code for code, _ in ranked[:k]]


def normalize_name(surface):
    """Normalized token sequence for a surface form: lowercase alnum runs.

    "HTN," -> ("htn",); "s/p CABG" -> ("s", "p", "cabg").
    """
    return tuple(_NORM_TOKEN_RE.findall(surface.lower()))


@dataclass
class Concept:
    concept_id: str
    preferred_name: str
    name_forms: list  # list of (surface, normalized tuple)
    codes: set  # set of CodeId
    context_vector: object = None

    def __post_init__(self):
        if not self.name_forms:
            raise DictionaryError("concept %s has no name forms" % self.concept_id)
        if not self.codes:
            raise DictionaryError("concept %s has no codes" % self.concept_id)


@dataclass
class ConceptDictionary:
    """Maps normalized names to concepts and concepts to ICD-9 codes.

    Immutable during a matching run; add_synonym happens between runs.
    """

    by_id: dict = field(default_factory=dict)
    by_name: dict = field(default_factory=dict)  # normalized tuple -> set of ids

    def add_concept(self, concept):
        if concept.concept_id in self.by_id:
            raise DictionaryError("duplicate concept id %s" % concept.concept_id)
        self.by_id[concept.concept_id] = concept
        for _, norm in concept.name_forms:
            self.by_name.setdefault(norm, set()).add(concept.concept_id)

    def add_synonym(self, concept_id, surface):
        if concept_id not in self.by_id:
            raise DictionaryError("unknown concept id %s" % concept_id)
        norm = normalize_name(surface)
        if not norm:
            raise DictionaryError("surface %r normalizes to nothing" % surface)
        concept = self.by_id[concept_id]
        if all(n != norm for _, n in concept.name_forms):
            concept.name_forms.append((surface, norm))
        self.by_name.setdefault(norm, set()).add(concept_id)

    def lookup(self, surface):
        return set(self.by_name.get(normalize_name(surface), set()))

    def ambiguous_names(self):
        return {n for n, ids in self.by_name.items() if len(ids) > 1}

    def max_name_tokens(self):
        return max((len(n) for n in self.by_name), default=0)

    def check_consistency(self):
        for cid, concept in self.by_id.items():
            for _, norm in concept.name_forms:
                if cid not in self.by_name.get(norm, set()):
                    raise DictionaryError("name %r missing from index" % (norm,))
        for norm, ids in self.by_name.items():
            for cid in ids:
                concept = self.by_id.get(cid)
                if concept is None or all(n != norm for _, n in concept.name_forms):
                    raise DictionaryError("index entry %r -> %s has no backing name form" % (norm, cid))

    def content_hash(self):
        h = hashlib.sha256()
        for cid in sorted(self.by_id):
            concept = self.by_id[cid]
            h.update(cid.encode())
            for surface, _ in sorted(concept.name_forms):
                h.update(surface.encode())
            for code in sorted(concept.codes):
                h.update(code.canonical.encode())
        return h.hexdigest()


DICTIONARY_HEADER = ["concept_id", "icd9_code", "name", "is_preferred"]


def load_dictionary(path):
    """Load a concept dictionary from its CSV interchange format.

    One row per (concept, name, code) triple; repeated rows add codes/names.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != DICTIONARY_HEADER:
            raise DictionaryError(
                "bad dictionary header %r, expected %r" % (reader.fieldnames, DICTIONARY_HEADER)
            )
        rows = list(reader)

    d = ConceptDictionary()
    for row in rows:
        cid = row["concept_id"]
        code = parse_code(row["icd9_code"])
        surface = row["name"]
        norm = normalize_name(surface)
        if not norm:
            raise DictionaryError("name %r normalizes to nothing" % surface)
        preferred = row["is_preferred"] == "1"
        if cid not in d.by_id:
            d.add_concept(Concept(cid, surface, [(surface, norm)], {code}))
            if not preferred:
                d.by_id[cid].preferred_name = ""
        else:
            concept = d.by_id[cid]
            concept.codes.add(code)
            d.add_synonym(cid, surface)
        if preferred:
            d.by_id[cid].preferred_name = surface
    for concept in d.by_id.values():
        if not concept.preferred_name:
            concept.preferred_name = concept.name_forms[0][0]
    d.check_consistency()
    return d


def save_dictionary(d, path):
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(DICTIONARY_HEADER)
        for cid in sorted(d.by_id):
            concept = d.by_id[cid]
            for surface, _ in concept.name_forms:
                pref = "1" if surface == concept.preferred_name else "0"
                for code in sorted(concept.codes):
                    writer.writerow([cid, code.canonical, surface, pref])
