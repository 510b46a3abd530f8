"""Welch's unequal-variance t-test in pure Python."""

from __future__ import annotations

import math
from statistics import fmean, variance
from typing import NamedTuple, Sequence

_EPS = 1e-15
_TINY = 1e-300
_MAX_ITER = 500


class WelchResult(NamedTuple):
    t: float
    df: float
    p: float


def _betacf(a: float, b: float, x: float) -> float:
    # modified Lentz evaluation of the incomplete-beta continued fraction
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > _TINY else _TINY)
    h = d
    for m in range(1, _MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > _TINY else _TINY)
        c = 1.0 + aa / c
        c = c if abs(c) > _TINY else _TINY
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log1p(-x)
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def t_two_tailed(t: float, df: float) -> float:
    """Two-tailed p-value of Student's t with ``df`` degrees of freedom."""
    if math.isinf(t):
        return 0.0
    return min(1.0, betainc(df / 2.0, 0.5, df / (df + t * t)))


def welch_t(a: Sequence[float], b: Sequence[float]) -> WelchResult:
    """Welch's t statistic, Welch-Satterthwaite df and two-tailed p.

    Two constant samples with equal means give t=0, p=1; constant samples
    with different means are rejected.
    """
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError(f"each sample needs at least two observations (got {na}, {nb})")
    ma, mb = fmean(a), fmean(b)
    qa, qb = variance(a, ma) / na, variance(b, mb) / nb
    se2 = qa + qb
    if se2 == 0:
        if ma == mb:
            return WelchResult(0.0, float(na + nb - 2), 1.0)
        raise ValueError("both samples are constant with different means")
    t = (ma - mb) / math.sqrt(se2)
    df = se2 * se2 / (qa * qa / (na - 1) + qb * qb / (nb - 1))
    return WelchResult(t, df, t_two_tailed(t, df))
