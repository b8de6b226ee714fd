"""Offset-faithful tokenization: alphanumeric runs plus punctuation tokens."""

import re
from dataclasses import dataclass

_TOKEN_RE = re.compile(r"[A-Za-z0-9]+|[^\sA-Za-z0-9]")


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    start: int
    end: int

    @property
    def is_word(self):
        return self.surface[0].isalnum()


def tokenize(text):
    return [
        Token(m.group(), m.group().lower(), m.start(), m.end())
        for m in _TOKEN_RE.finditer(text)
    ]
