"""Goodness-of-fit statistics used by the studies."""

from __future__ import annotations

import math

import numpy as np
from scipy import stats

from ..ctrw import ECDF
from ..errors import EmptyResultError, InvalidParameterError

__all__ = ["ks_statistic", "ks_critical", "pool_bins", "chi_square_test"]


def ks_statistic(ecdf, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance ``sup_x |F_n(x) - F(x)|``.

    ``ecdf`` is an :class:`~urnctrw.ctrw.ECDF` or a raw sample; ``cdf`` is a
    callable accepting arrays. The supremum is attained at sample points, on
    either side of the jump, so the statistic is exact for continuous ``F``.
    """
    if not isinstance(ecdf, ECDF):
        ecdf = ECDF(ecdf)
    x = ecdf.sorted
    n = x.size
    F = np.asarray(cdf(x), dtype=float)
    ranks = np.arange(1, n + 1)
    d_plus = (ranks / n - F).max()
    d_minus = (F - (ranks - 1) / n).max()
    return float(min(1.0, max(d_plus, d_minus, 0.0)))


def ks_critical(n: int, alpha: float = 0.01) -> float:
    """Large-sample critical value ``c(alpha)/sqrt(n)`` of the KS distance."""
    return float(stats.kstwobign.isf(alpha) / math.sqrt(n))


def pool_bins(observed, expected, min_expected: float = 5.0):
    """Merge neighbouring bins until every expected count reaches ``min_expected``.

    Bins are swept left to right; a short final group is merged into its
    predecessor.
    """
    observed = np.asarray(observed, dtype=float)
    expected = np.asarray(expected, dtype=float)
    if observed.shape != expected.shape or observed.ndim != 1:
        raise InvalidParameterError("observed and expected must be 1-D of equal length")
    obs, exp = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed, expected):
        o_acc += o
        e_acc += e
        if e_acc >= min_expected:
            obs.append(o_acc)
            exp.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if obs:
            obs[-1] += o_acc
            exp[-1] += e_acc
        else:
            obs.append(o_acc)
            exp.append(e_acc)
    return np.array(obs), np.array(exp)


def chi_square_test(counts, probs, min_expected: float = 5.0):
    """Pearson chi-square of ``counts`` against ``probs`` after pooling.

    Returns ``(statistic, p_value, dof)``.
    """
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        raise EmptyResultError("no observations")
    probs = np.asarray(probs, dtype=float)
    o, e = pool_bins(counts, total * probs / probs.sum(), min_expected)
    if o.size < 2:
        raise InvalidParameterError("fewer than two bins after pooling")
    stat, p = stats.chisquare(o, e)
    return float(stat), float(p), int(o.size - 1)
