"""Rank statistics used by corpus analysis.

Spearman's rho with average ranks for ties, computed as the Pearson
correlation of the two rank vectors.
"""

from __future__ import annotations

import math
from typing import Sequence

from .errors import UndefinedCorrelationError, ValidationError


def average_ranks(values: Sequence[float]) -> list[float]:
    """Rank values 1..n, assigning tied values the mean of their ranks."""
    n = len(values)
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        while j + 1 < n and values[order[j + 1]] == values[order[i]]:
            j += 1
        # ranks are 1-based; a tied run [i, j] shares the mean rank
        shared = (i + j) / 2 + 1
        for k in range(i, j + 1):
            ranks[order[k]] = shared
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation with average-rank tie handling.

    Raises ValidationError for mismatched or too-short inputs and
    UndefinedCorrelationError when either side has zero rank variance
    (all values tied), where the coefficient has no defined value.
    """
    if len(xs) != len(ys):
        raise ValidationError(
            f"paired sequences differ in length: {len(xs)} vs {len(ys)}"
        )
    n = len(xs)
    if n < 2:
        raise ValidationError(f"need at least 2 pairs, got {n}")
    for v in list(xs) + list(ys):
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not math.isfinite(v):
            raise ValidationError(f"non-finite or non-numeric value {v!r}")
    rx = average_ranks(xs)
    ry = average_ranks(ys)
    mean_x = sum(rx) / n
    mean_y = sum(ry) / n
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(rx, ry))
    var_x = sum((a - mean_x) ** 2 for a in rx)
    var_y = sum((b - mean_y) ** 2 for b in ry)
    if var_x == 0.0 or var_y == 0.0:
        raise UndefinedCorrelationError(
            "rank variance is zero on at least one side; rho is undefined"
        )
    return cov / math.sqrt(var_x * var_y)
