"""Statistical primitives: 1-D Wasserstein over ordered bins, Pearson,
Cohen's kappa, and distribution summaries."""

from dataclasses import dataclass

import numpy as np

from .icd9 import N_CHAPTERS, chapter_of


class StatsError(ValueError):
    pass


class UndefinedStatistic(StatsError):
    """Raised when the statistic has no defined value (constant input etc.)."""


@dataclass
class SummaryStats:
    mean: float
    std: float
    median: float
    iqr: float


@dataclass
class ChapterDistribution:
    probabilities: np.ndarray
    empty: bool = False


def chapter_distribution(codes):
    """Normalized histogram of chapter membership over a code multiset."""
    codes = list(codes)
    counts = np.zeros(N_CHAPTERS)
    for code in codes:
        counts[chapter_of(code).ordinal] += 1
    if not codes:
        return ChapterDistribution(counts, empty=True)
    return ChapterDistribution(counts / counts.sum())


def wasserstein_1d(p, q):
    """W1 between two bin distributions with unit spacing: sum of |CDF diffs|."""
    if p.empty or q.empty:
        raise StatsError("wasserstein_1d undefined for empty distributions")
    a, b = np.asarray(p.probabilities, float), np.asarray(q.probabilities, float)
    if a.shape != b.shape:
        raise StatsError("distributions have different bin counts")
    return float(np.abs(np.cumsum(a - b)).sum())


def pearson(x, y):
    """Sample Pearson correlation; constant input is an error, not 0."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    if len(x) != len(y):
        raise StatsError("length mismatch")
    if len(x) < 2:
        raise StatsError("need at least 2 points")
    if np.ptp(x) == 0 or np.ptp(y) == 0:
        raise UndefinedStatistic("correlation undefined for constant input")
    return float(np.corrcoef(x, y)[0, 1])


def cohens_kappa(marks_a, marks_b):
    """Chance-corrected agreement between two boolean mark sequences."""
    if len(marks_a) != len(marks_b):
        raise StatsError("length mismatch")
    if not marks_a:
        raise StatsError("no paired marks")
    n = len(marks_a)
    a = sum(1 for x, y in zip(marks_a, marks_b) if x and y)
    b = sum(1 for x, y in zip(marks_a, marks_b) if x and not y)
    c = sum(1 for x, y in zip(marks_a, marks_b) if not x and y)
    d = n - a - b - c
    p_o = (a + d) / n
    p_e = ((a + b) * (a + c) + (c + d) * (b + d)) / (n * n)
    if p_e == 1.0:
        raise UndefinedStatistic("kappa undefined: chance agreement is 1")
    return (p_o - p_e) / (1 - p_e)


def summarize(values):
    """Mean, population std, median, and linear-interpolation IQR."""
    values = np.asarray(list(values), float)
    if values.size == 0:
        raise StatsError("cannot summarize an empty list")
    q1, q3 = np.percentile(values, [25, 75])
    return SummaryStats(
        mean=float(values.mean()),
        std=float(values.std()),
        median=float(np.median(values)),
        iqr=float(q3 - q1),
    )
