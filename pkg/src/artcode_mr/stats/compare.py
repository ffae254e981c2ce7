"""Group comparison tests: one-way ANOVA, pooled and Welch t-tests,
Kruskal-Wallis and a Monte Carlo Dunnett many-to-one procedure.

Every function takes plain sequences of floats and returns p-values in
[0, 1].  ``alternative="greater"`` asks whether the first group (or the
treatments, for Dunnett) lies above the other; the rank and variance-ratio
tests then halve their p-value on the side the means point to.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import GroupTooSmall, InvalidSpec
from .special import chi2_sf, f_sf, t_sf, t_two_sided

ALTERNATIVES = ("two-sided", "greater", "less")


@dataclass(frozen=True)
class Outcome:
    statistic: float
    pvalue: float
    df: tuple[float, ...] = ()


def _groups(*groups, min_size=2):
    out = [np.asarray(g, dtype=np.float64) for g in groups]
    for g in out:
        if g.ndim != 1 or len(g) < min_size:
            raise GroupTooSmall(f"every group needs at least {min_size} values")
        if not np.all(np.isfinite(g)):
            raise InvalidSpec("group values must be finite")
    return out


def _check_alternative(alternative):
    if alternative not in ALTERNATIVES:
        raise InvalidSpec(f"alternative must be one of {ALTERNATIVES}")


def _one_sided(p_two, direction, alternative):
    """Convert a two-sided p-value for a symmetric test given the sign of the effect."""
    if alternative == "two-sided":
        return p_two
    agrees = direction > 0 if alternative == "greater" else direction < 0
    return p_two / 2.0 if agrees else 1.0 - p_two / 2.0


def _clip(p):
    return min(max(p, 0.0), 1.0)


def anova_oneway(*groups, alternative="two-sided") -> Outcome:
    """F test for equal means; with two groups ``F`` equals the pooled ``t`` squared."""
    _check_alternative(alternative)
    gs = _groups(*groups)
    if len(gs) < 2:
        raise GroupTooSmall("ANOVA needs at least two groups")
    n = sum(len(g) for g in gs)
    grand = math.fsum(float(g.sum()) for g in gs) / n
    ssb = math.fsum(len(g) * (g.mean() - grand) ** 2 for g in gs)
    ssw = math.fsum(float(((g - g.mean()) ** 2).sum()) for g in gs)
    d1, d2 = len(gs) - 1, n - len(gs)
    if ssw == 0.0:
        # constant groups: identical means cannot be told apart, distinct ones are certain
        f, p = (0.0, 1.0) if ssb == 0.0 else (math.inf, 0.0)
    else:
        f = (ssb / d1) / (ssw / d2)
        p = f_sf(f, d1, d2)
    if len(gs) == 2:
        p = _one_sided(p, gs[0].mean() - gs[1].mean(), alternative)
    elif alternative != "two-sided":
        raise InvalidSpec("one-sided ANOVA is defined for two groups only")
    return Outcome(f, _clip(p), (d1, d2))


def pooled_ttest(a, b, alternative="two-sided") -> Outcome:
    _check_alternative(alternative)
    a, b = _groups(a, b)
    na, nb = len(a), len(b)
    df = na + nb - 2
    sp2 = (((a - a.mean()) ** 2).sum() + ((b - b.mean()) ** 2).sum()) / df
    diff = a.mean() - b.mean()
    return _t_result(diff, sp2 * (1.0 / na + 1.0 / nb), df, alternative)


def welch_ttest(a, b, alternative="two-sided") -> Outcome:
    """Unequal-variance t test with Welch-Satterthwaite degrees of freedom."""
    _check_alternative(alternative)
    a, b = _groups(a, b)
    va, vb = a.var(ddof=1) / len(a), b.var(ddof=1) / len(b)
    diff = a.mean() - b.mean()
    se2 = va + vb
    df = se2 * se2 / (va * va / (len(a) - 1) + vb * vb / (len(b) - 1)) if se2 > 0 else float(len(a) + len(b) - 2)
    return _t_result(diff, se2, df, alternative)


def _t_result(diff, se2, df, alternative):
    if se2 == 0.0:
        if diff == 0.0:
            return Outcome(0.0, 1.0, (float(df),))
        t = math.copysign(math.inf, diff)
    else:
        t = diff / math.sqrt(se2)
    if alternative == "two-sided":
        p = t_two_sided(t, df)
    elif alternative == "greater":
        p = t_sf(t, df)
    else:
        p = t_sf(-t, df)
    return Outcome(float(t), _clip(float(p)), (float(df),))


def rankdata(values) -> np.ndarray:
    """Midranks starting at 1."""
    x = np.asarray(values, dtype=np.float64)
    order = np.argsort(x, kind="mergesort")
    xs = x[order]
    ranks = np.empty(len(x))
    starts = np.flatnonzero(np.r_[True, xs[1:] != xs[:-1]])
    ends = np.r_[starts[1:], len(x)]
    for s, e in zip(starts, ends):
        ranks[order[s:e]] = (s + e + 1) / 2.0
    return ranks


def kruskal_wallis(*groups, alternative="two-sided") -> Outcome:
    """H test on midranks with the usual tie correction, chi-square tail."""
    _check_alternative(alternative)
    gs = _groups(*groups)
    if len(gs) < 2:
        raise GroupTooSmall("Kruskal-Wallis needs at least two groups")
    pooled = np.concatenate(gs)
    n = len(pooled)
    ranks = rankdata(pooled)
    _, ties = np.unique(pooled, return_counts=True)
    correction = 1.0 - float((ties**3 - ties).sum()) / (n**3 - n)
    if correction <= 0:
        return Outcome(0.0, 1.0, (len(gs) - 1,))
    bounds = np.cumsum([0] + [len(g) for g in gs])
    rank_sums = [float(ranks[bounds[i]:bounds[i + 1]].sum()) for i in range(len(gs))]
    h = 12.0 / (n * (n + 1)) * math.fsum(r * r / len(g) for r, g in zip(rank_sums, gs)) - 3.0 * (n + 1)
    h = max(h, 0.0) / correction
    p = chi2_sf(h, len(gs) - 1)
    if len(gs) == 2:
        mean_rank = [r / len(g) for r, g in zip(rank_sums, gs)]
        p = _one_sided(p, mean_rank[0] - mean_rank[1], alternative)
    elif alternative != "two-sided":
        raise InvalidSpec("one-sided Kruskal-Wallis is defined for two groups only")
    return Outcome(h, _clip(p), (len(gs) - 1,))


@dataclass(frozen=True)
class DunnettResult:
    statistics: tuple[float, ...]
    pvalues: tuple[float, ...]
    std_errors: tuple[float, ...]
    df: int
    mc_samples: int


def dunnett_test(control, treatments, mc_samples: int = 100_000, seed: int = 0,
                 alternative="two-sided", chunk: int = 20_000) -> DunnettResult:
    """Many-to-one comparisons against ``control`` with simulated adjusted p-values.

    The null distribution of ``max_i |T_i|`` is drawn directly: independent
    normal group means (so treatments share the control's noise) divided by
    a pooled chi-square scale with ``N - (k + 1)`` degrees of freedom.
    """
    _check_alternative(alternative)
    if not treatments:
        raise GroupTooSmall("Dunnett's test needs at least one treatment group")
    if mc_samples < 1:
        raise InvalidSpec("mc_samples must be positive")
    c, *ts = _groups(control, *treatments, min_size=1)
    sizes = np.array([len(t) for t in ts], dtype=np.float64)
    nc = len(c)
    df = nc + int(sizes.sum()) - (len(ts) + 1)
    if df < 1:
        raise GroupTooSmall("pooled variance needs at least one degree of freedom")
    ss = ((c - c.mean()) ** 2).sum() + sum(((t - t.mean()) ** 2).sum() for t in ts)
    s = math.sqrt(ss / df)
    scale = np.sqrt(1.0 / sizes + 1.0 / nc)
    diffs = np.array([t.mean() - c.mean() for t in ts])
    if s == 0.0:
        stats = np.where(diffs == 0, 0.0, np.copysign(np.inf, diffs))
    else:
        stats = diffs / (s * scale)
    observed = np.abs(stats) if alternative == "two-sided" else (stats if alternative == "greater" else -stats)

    rng = np.random.default_rng(int(seed))
    exceed = np.zeros(len(ts), dtype=np.int64)
    done = 0
    while done < mc_samples:
        m = min(chunk, mc_samples - done)
        z0 = rng.standard_normal(m) / math.sqrt(nc)
        zi = rng.standard_normal((m, len(ts))) / np.sqrt(sizes)
        s_star = np.sqrt(rng.chisquare(df, m) / df)
        t_star = (zi - z0[:, None]) / (s_star[:, None] * scale)
        if alternative == "two-sided":
            peak = np.abs(t_star).max(axis=1)
        elif alternative == "greater":
            peak = t_star.max(axis=1)
        else:
            peak = (-t_star).max(axis=1)
        exceed += (peak[:, None] >= observed[None, :]).sum(axis=0)
        done += m
    p = exceed / mc_samples
    if s == 0.0:
        p = np.where(diffs == 0, 1.0, p)
    se = np.sqrt(p * (1 - p) / mc_samples)
    return DunnettResult(tuple(float(v) for v in stats), tuple(float(v) for v in p),
                         tuple(float(v) for v in se), df, mc_samples)
