"""Benchmark the Cython greedy-match kernel against the pure-Python fallback.

Usage: python3 benchmarks/bench_matcher.py [--n-docs 2000] [--tokens 300]
"""

import argparse
import random
import time

from ddaudit.nerl import matcher
from ddaudit.nerl import _match_py

try:
    from ddaudit.nerl import _match_c
except ImportError:
    _match_c = None

VOCAB = [
    "aorta", "renal", "acute", "chronic", "failure", "infection", "cardiac",
    "hepatic", "injury", "mild", "severe", "stenosis", "ulcer", "anemia",
    "edema", "fracture", "sepsis", "embolism", "effusion", "necrosis",
]


def build_workload(n_docs, tokens_per_doc, n_names, seed=0):
    rng = random.Random(seed)
    names = set()
    while len(names) < n_names:
        names.add(tuple(rng.choice(VOCAB) for _ in range(rng.randint(1, 3))))
    name_keys = {" ".join(n) for n in names}
    max_n = max(len(n) for n in names)
    docs = [
        [rng.choice(VOCAB) for _ in range(tokens_per_doc)] for _ in range(n_docs)
    ]
    return docs, name_keys, max_n


def run(kernel, docs, name_keys, max_n):
    t0 = time.perf_counter()
    total = 0
    for words in docs:
        total += len(kernel.greedy_longest_match(words, name_keys, max_n))
    return time.perf_counter() - t0, total


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n-docs", type=int, default=2000)
    ap.add_argument("--tokens", type=int, default=300)
    ap.add_argument("--names", type=int, default=200)
    args = ap.parse_args()

    docs, name_keys, max_n = build_workload(args.n_docs, args.tokens, args.names)
    print("active kernel at import: %s" % matcher.KERNEL)

    py_t, py_total = run(_match_py, docs, name_keys, max_n)
    print("python: %.3f s (%d matches)" % (py_t, py_total))
    if _match_c is None:
        print("cython: not built")
        return
    c_t, c_total = run(_match_c, docs, name_keys, max_n)
    assert c_total == py_total, "kernels disagree"
    print("cython: %.3f s (%d matches)" % (c_t, c_total))
    print("speedup: %.2fx" % (py_t / c_t))


if __name__ == "__main__":
    main()
