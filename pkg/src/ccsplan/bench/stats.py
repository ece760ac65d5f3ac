"""Success-rate comparison and summary statistics."""

from __future__ import annotations

import math
from typing import Sequence

Z_CRITICAL = 1.2816  # one-tailed, alpha = 0.1


def z_test(successes_a: int, n_a: int, successes_b: int, n_b: int) -> tuple[float, bool]:
    """Pooled two-proportion z statistic for H1: p_a > p_b.

    Returns ``(z, significant)``.  A degenerate pooled proportion (0 or 1)
    gives ``z = 0``.
    """
    if n_a < 1 or n_b < 1:
        raise ValueError("both samples need at least one trial")
    if not (0 <= successes_a <= n_a and 0 <= successes_b <= n_b):
        raise ValueError("successes must lie between 0 and the number of trials")
    pooled = (successes_a + successes_b) / (n_a + n_b)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n_a + 1 / n_b))
    if se == 0:
        return 0.0, False
    z = (successes_a / n_a - successes_b / n_b) / se
    return z, z > Z_CRITICAL


def mean_std(values: Sequence[float]) -> tuple[float, float]:
    """Mean and population standard deviation; (0, 0) for no values."""
    if not values:
        return 0.0, 0.0
    m = math.fsum(values) / len(values)
    var = math.fsum((v - m) ** 2 for v in values) / len(values)
    return m, math.sqrt(var)
