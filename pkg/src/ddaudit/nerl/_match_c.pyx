# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled greedy longest-match kernel. Behavior must stay identical to
_match_py.greedy_longest_match."""


def greedy_longest_match(list words, set name_keys, int max_n):
    cdef Py_ssize_t n_words = len(words)
    cdef Py_ssize_t i = 0
    cdef Py_ssize_t n, limit, matched
    cdef list out = []
    cdef list prefixes = []
    cdef str key
    while i < n_words:
        limit = max_n if max_n < n_words - i else n_words - i
        matched = 0
        # Build the n-gram keys once per position, growing the string
        # instead of re-joining a slice for every candidate length.
        del prefixes[:]
        key = <str> words[i]
        prefixes.append(key)
        for n in range(2, limit + 1):
            key = key + " " + <str> words[i + n - 1]
            prefixes.append(key)
        for n in range(limit, 0, -1):
            if prefixes[n - 1] in name_keys:
                out.append((i, n))
                matched = n
                break
        i += matched if matched else 1
    return out
