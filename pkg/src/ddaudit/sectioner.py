"""Rule-based extraction of the Discharge Diagnosis subsection from
discharge-summary text."""

import re
from dataclasses import dataclass, field

from .stats import summarize

DEFAULT_RULES = [
    "discharge diagnosis",
    "discharge diagnoses",
    "final diagnosis",
    "final diagnoses",
]

# A line that looks like the next section heading terminates the body.
_NEXT_HEADING_RE = re.compile(r"^[A-Za-z ]{2,40}:\s*$")
_SUBHEADER_RE = re.compile(r"^(primary|secondary)\s+diagnos\w*\s*:?\s*$", re.I)
_ENUM_PREFIX_RE = re.compile(r"^(\d+[.)]|[-#*])\s*")
_TOKEN_RE = re.compile(r"[A-Za-z0-9]+")


@dataclass
class NoteDocument:
    note_id: str
    admission_id: str
    category: str
    text: str


@dataclass
class SectionSpan:
    heading: str
    start: int
    end: int
    body: str
    line_items: list = field(default_factory=list)


@dataclass
class SectionStats:
    found: int
    missing: int
    token_lengths: object = None  # SummaryStats over extracted bodies


def load_rules(path):
    with open(path, encoding="utf-8") as f:
        rules = [line.strip() for line in f if line.strip()]
    if not rules:
        raise ValueError("rule file %s contains no rules" % path)
    return rules


def _heading_regex(rules):
    alts = "|".join(re.escape(r) for r in rules)
    return re.compile(r"^[ \t]*(%s)[ \t]*:?[ \t]*" % alts, re.I | re.M)


def find_dd_section(doc, rules=None):
    """Locate the first Discharge Diagnosis section; None if no rule matches.

    The body runs from just after the heading (rest of the heading line if
    non-empty, else the following line) to the next heading-shaped line or
    a double blank line.
    """
    rules = rules or DEFAULT_RULES
    text = doc.text
    m = _heading_regex(rules).search(text)
    if m is None:
        return None
    start = m.end()
    # Heading alone on its line: body starts on the next line.
    nl = text.find("\n", start)
    if nl != -1 and not text[start:nl].strip():
        start = nl + 1

    end = len(text)
    pos = start
    blank_run = 0
    while pos < len(text):
        nl = text.find("\n", pos)
        line_end = len(text) if nl == -1 else nl
        line = text[pos:line_end]
        if not line.strip():
            blank_run += 1
            if blank_run >= 2:
                end = pos
                break
        else:
            blank_run = 0
            if pos > start and _NEXT_HEADING_RE.match(line):
                end = pos
                break
        if nl == -1:
            break
        pos = nl + 1

    # Shrink to the non-whitespace extent so body is a stripped exact slice.
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start == end:
        return None
    span = SectionSpan(m.group(1), start, end, text[start:end])
    span.line_items = split_line_items(span)
    return span


def split_line_items(section):
    """Body lines as trimmed items, minus enumeration prefixes and
    primary/secondary sub-headers. Lines are never merged."""
    items = []
    for line in section.body.split("\n"):
        line = line.strip()
        if not line or _SUBHEADER_RE.match(line):
            continue
        line = _ENUM_PREFIX_RE.sub("", line).strip()
        if line:
            items.append(line)
    return items


def token_count(text):
    return len(_TOKEN_RE.findall(text))


def corpus_section_stats(docs, rules=None):
    found, missing, lengths = 0, 0, []
    for doc in docs:
        span = find_dd_section(doc, rules)
        if span is None:
            missing += 1
        else:
            found += 1
            lengths.append(token_count(span.body))
    return SectionStats(found, missing, summarize(lengths) if lengths else None)
