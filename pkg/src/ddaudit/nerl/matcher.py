"""Dictionary span detection over tokenized text.

The inner loop lives in a small kernel with two interchangeable builds:
a compiled Cython extension and a pure-Python fallback, selected at import.
"""

from dataclasses import dataclass, field

try:
    from ._match_c import greedy_longest_match

    KERNEL = "cython"
except ImportError:  # extension not built
    from ._match_py import greedy_longest_match

    KERNEL = "python"

# Surfaces at most this many normalized characters are short forms ("DM")
# and need context confirmation even with a single candidate concept.
SHORT_FORM_MAX_CHARS = 3


@dataclass
class Candidate:
    start: int
    end: int
    first_token: int
    last_token: int
    concept_ids: list  # sorted
    ambiguous: bool


class MatchIndex:
    """Precomputed lookup structure for one dictionary version."""

    def __init__(self, dictionary):
        self.dictionary = dictionary
        self.name_keys = {" ".join(n): sorted(ids) for n, ids in dictionary.by_name.items()}
        self.key_set = set(self.name_keys)
        self.max_n = dictionary.max_name_tokens()


def detect_spans(tokens, dictionary, index=None):
    """Greedy longest-match candidates over normalized word n-grams.

    Candidates with one concept and a long-enough surface are unambiguous;
    the rest are left for context disambiguation. Accepted candidates never
    overlap.
    """
    if index is None:
        index = MatchIndex(dictionary)
    word_tokens = [t for t in tokens if t.is_word]
    words = [t.normalized for t in word_tokens]
    out = []
    for i, n in greedy_longest_match(words, index.key_set, index.max_n):
        first, last = word_tokens[i], word_tokens[i + n - 1]
        key = " ".join(words[i : i + n])
        ids = index.name_keys[key]
        out.append(
            Candidate(
                start=first.start,
                end=last.end,
                first_token=i,
                last_token=i + n - 1,
                concept_ids=ids,
                ambiguous=len(ids) > 1 or len(key) <= SHORT_FORM_MAX_CHARS,
            )
        )
    return out
