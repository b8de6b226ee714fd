"""Pure-Python greedy longest-match kernel (fallback for the compiled one)."""


def greedy_longest_match(words, name_keys, max_n):
    """Left-to-right greedy longest match over a normalized word sequence.

    words: list of normalized word strings; name_keys: set of space-joined
    dictionary names; max_n: longest dictionary name in tokens.
    Returns a list of (start_index, n_tokens) pairs, non-overlapping.
    """
    out = []
    n_words = len(words)
    i = 0
    while i < n_words:
        limit = max_n if max_n < n_words - i else n_words - i
        matched = 0
        for n in range(limit, 0, -1):
            key = " ".join(words[i : i + n])
            if key in name_keys:
                out.append((i, n))
                matched = n
                break
        i += matched if matched else 1
    return out
