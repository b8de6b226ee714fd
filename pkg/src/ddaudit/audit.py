"""Reconciliation of predicted vs assigned codes and the audit report."""

import csv
import json
import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field

from . import stats
from .icd9 import CHAPTERS

P_A = "P_A"
P_NA = "P_NA"
A_NP = "A_NP"
BUCKETS = (P_A, P_NA, A_NP)


@dataclass
class AdmissionCodes:
    admission_id: str
    assigned: set  # set of CodeId
    predicted: dict  # CodeId -> list of supporting EntitySpan
    dd_line_count: int = 0
    dd_char_length: int = 0


@dataclass
class PartitionRecord:
    admission_id: str
    code: object
    bucket: str
    spans: list = field(default_factory=list)


def partition(admissions, scope):
    """Per admission: P_A = predicted∩assigned, P_NA = predicted∖assigned,
    A_NP = assigned∖predicted, all restricted to the scope code set."""
    scope = set(scope)
    records = []
    for adm in sorted(admissions, key=lambda a: a.admission_id):
        assigned = adm.assigned & scope
        predicted = {c: s for c, s in adm.predicted.items() if c in scope}
        for code in sorted(predicted):
            bucket = P_A if code in assigned else P_NA
            records.append(PartitionRecord(adm.admission_id, code, bucket, predicted[code]))
        for code in sorted(assigned - set(predicted)):
            records.append(PartitionRecord(adm.admission_id, code, A_NP))
    return records


def coverage_fraction(section, spans):
    """Share of the body's non-whitespace characters under some span.

    Span offsets are relative to the section body."""
    body = section.body
    total = sum(1 for ch in body if not ch.isspace())
    if total == 0:
        return 0.0
    covered = [False] * len(body)
    for span in spans:
        lo = max(0, span.start)
        hi = min(len(body), span.end)
        for i in range(lo, hi):
            covered[i] = True
    hit = sum(1 for i, ch in enumerate(body) if covered[i] and not ch.isspace())
    return hit / total


def coverage_histogram(fractions):
    """Counts over [0,10%) .. [90,100%) plus a distinct exact-100% bin."""
    bins = [0] * 11
    for f in fractions:
        if not 0.0 <= f <= 1.0:
            raise ValueError("coverage fraction %r outside [0,1]" % f)
        bins[10 if f == 1.0 else int(f * 10)] += 1
    return bins


def match_proportion_buckets(records):
    """Histogram of per-admission |P_A| / |in-scope assigned| over (0,10%]
    .. (90,100%] intervals; zero-match admissions are excluded and counted,
    as are admissions with no in-scope assigned codes at all."""
    matched = Counter()
    assigned = Counter()
    admission_ids = set()
    for r in records:
        admission_ids.add(r.admission_id)
        if r.bucket == P_A:
            matched[r.admission_id] += 1
        if r.bucket in (P_A, A_NP):
            assigned[r.admission_id] += 1
    bins = [0] * 10
    excluded_zero_match = 0
    excluded_no_assigned = 0
    for adm_id in admission_ids:
        if assigned.get(adm_id, 0) == 0:
            excluded_no_assigned += 1
            continue
        m = matched.get(adm_id, 0)
        if m == 0:
            excluded_zero_match += 1
            continue
        p = m / assigned[adm_id]
        bins[min(9, math.ceil(p * 10) - 1)] += 1
    return {
        "bins": bins,
        "excluded_zero_match": excluded_zero_match,
        "excluded_no_assigned": excluded_no_assigned,
    }


MISSING_RATE_NEW_ONLY = float("inf")


def bucket_counts(records):
    counts = {b: Counter() for b in BUCKETS}
    for r in records:
        counts[r.bucket][r.code] += 1
    return counts


def per_code_missing_rate(records, assigned_counts):
    """P_NA occurrences over assigned occurrences per code; codes never
    assigned get the infinity sentinel (predicted-new-only)."""
    counts = bucket_counts(records)
    rates = {}
    for code in set(assigned_counts) | set(counts[P_NA]):
        a = assigned_counts.get(code, 0)
        p_na = counts[P_NA].get(code, 0)
        rates[code] = p_na / a if a else (MISSING_RATE_NEW_ONLY if p_na else 0.0)
    return rates


def per_code_undercoding_estimate(records):
    """Estimate of the underlying omission rate: P_NA / (P_NA + assigned).

    Treats text-predicted-but-unassigned occurrences plus assigned
    occurrences as the total true occurrence count of a code."""
    counts = bucket_counts(records)
    estimates = {}
    for code in set(counts[P_NA]) | set(counts[P_A]) | set(counts[A_NP]):
        p_na = counts[P_NA].get(code, 0)
        assigned = counts[P_A].get(code, 0) + counts[A_NP].get(code, 0)
        if p_na + assigned:
            estimates[code] = p_na / (p_na + assigned)
    return estimates


def _dist(codes):
    return stats.chapter_distribution(codes)


def build_report(admissions, records, coverage_fractions=None, dd_token_lengths=None):
    """Assemble the audit report: per-code table, per-chapter distributions,
    Wasserstein distances against the assigned distribution, correlations,
    and summary statistics. Deterministic: admissions ordered by id."""
    admissions = sorted(admissions, key=lambda a: a.admission_id)
    counts = bucket_counts(records)
    assigned_counts = Counter()
    for r in records:
        if r.bucket in (P_A, A_NP):
            assigned_counts[r.code] += 1

    multisets = {"assigned": list(assigned_counts.elements())}
    for b in BUCKETS:
        multisets[b] = list(counts[b].elements())

    chapters = {}
    distributions = {}
    for name, codes in multisets.items():
        d = _dist(codes)
        distributions[name] = d
        chapters[name] = [] if d.empty else [float(p) for p in d.probabilities]

    wasserstein = {}
    for b in BUCKETS:
        if distributions["assigned"].empty or distributions[b].empty:
            wasserstein[b + "_vs_assigned"] = None
        else:
            wasserstein[b + "_vs_assigned"] = stats.wasserstein_1d(
                distributions[b], distributions["assigned"]
            )

    line_counts = [a.dd_line_count for a in admissions]
    per_adm_assigned = []
    per_adm_p_na = []
    p_na_by_adm = Counter()
    assigned_by_adm = Counter()
    for r in records:
        if r.bucket == P_NA:
            p_na_by_adm[r.admission_id] += 1
        if r.bucket in (P_A, A_NP):
            assigned_by_adm[r.admission_id] += 1
    for adm in admissions:
        per_adm_assigned.append(assigned_by_adm.get(adm.admission_id, 0))
        per_adm_p_na.append(p_na_by_adm.get(adm.admission_id, 0))

    def _safe_pearson(x, y):
        try:
            return stats.pearson(x, y)
        except stats.StatsError:
            return None

    correlations = {
        "line_count_vs_assigned": _safe_pearson(line_counts, per_adm_assigned),
        "line_count_vs_p_na": _safe_pearson(line_counts, per_adm_p_na),
    }

    codes_per_dd = [len(a.predicted) for a in admissions]
    summary = {}
    if dd_token_lengths:
        summary["dd_token_length"] = vars(stats.summarize(dd_token_lengths))
    if codes_per_dd:
        summary["codes_per_dd"] = vars(stats.summarize(codes_per_dd))

    missing = per_code_missing_rate(records, assigned_counts)
    undercoding = per_code_undercoding_estimate(records)
    per_code = []
    for code in sorted(set(assigned_counts) | set(counts[P_NA])):
        rate = missing.get(code, 0.0)
        per_code.append(
            {
                "code": code.canonical,
                "assigned": assigned_counts.get(code, 0),
                "p_a": counts[P_A].get(code, 0),
                "p_na": counts[P_NA].get(code, 0),
                "a_np": counts[A_NP].get(code, 0),
                "missing_rate": "new_only" if rate == MISSING_RATE_NEW_ONLY else rate,
                "undercoding_estimate": undercoding.get(code, 0.0),
            }
        )

    report = {
        "n_admissions": len(admissions),
        "per_code": per_code,
        "chapters": {"labels": [c[0] for c in CHAPTERS], "distributions": chapters},
        "coverage_hist": coverage_histogram(coverage_fractions or []),
        "match_buckets": match_proportion_buckets(records),
        "correlations": correlations,
        "wasserstein": wasserstein,
        "summary_stats": summary,
    }
    return report


def write_report(report, json_path, csv_path=None):
    with open(json_path, "w", encoding="utf-8") as f:
        json.dump(report, f, sort_keys=True, indent=2)
        f.write("\n")
    if csv_path:
        with open(csv_path, "w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(
                ["code", "assigned", "p_a", "p_na", "a_np", "missing_rate", "undercoding_estimate"]
            )
            for row in report["per_code"]:
                writer.writerow(
                    [
                        row["code"],
                        row["assigned"],
                        row["p_a"],
                        row["p_na"],
                        row["a_np"],
                        row["missing_rate"],
                        row["undercoding_estimate"],
                    ]
                )
