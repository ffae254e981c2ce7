"""Regenerate ``stat_fixtures.json`` from scipy's reference implementations.

Run from the repository root:  python3 tests/fixtures/make_stat_fixtures.py

The JSON is committed; the test suite only reads it, so scipy is needed
here and nowhere in the package.
"""

import json
from pathlib import Path

import numpy as np
from scipy import stats


def _cases(rng):
    # rho-like values: multiples of 0.05 on [0, 1], heavily tied
    for n_a, n_b in ((47, 47), (10, 10), (5, 8), (30, 12), (3, 3)):
        a = rng.integers(0, 21, n_a) * 0.05
        b = rng.integers(0, 13, n_b) * 0.05
        yield "rho_grid", a, b
    # continuous, unequal variances
    for n_a, n_b, sd_b in ((12, 9, 3.0), (6, 20, 0.3), (40, 40, 1.5), (4, 7, 10.0), (25, 3, 2.0)):
        a = rng.normal(0.0, 1.0, n_a)
        b = rng.normal(0.4, sd_b, n_b)
        yield "normal", a, b
    # skewed
    for n_a, n_b in ((15, 15), (8, 30), (50, 20), (2, 2), (9, 4)):
        a = rng.exponential(1.0, n_a)
        b = rng.exponential(2.0, n_b) + 0.1
        yield "exponential", a, b
    # small integers, many ties across groups
    for n_a, n_b in ((10, 10), (6, 6), (20, 5), (7, 13), (4, 4)):
        a = rng.integers(0, 3, n_a).astype(float)
        b = rng.integers(1, 4, n_b).astype(float)
        yield "ties", a, b
    # near-equal variance pairs, strong and weak shifts
    for shift in (0.0, 0.1, 0.5, 1.0, 3.0):
        a = rng.normal(0.0, 1.0, 20)
        b = rng.normal(shift, 1.05, 20)
        yield "shift", a, b


def main():
    rng = np.random.default_rng(20240601)
    out = []
    for kind, a, b in _cases(rng):
        if np.ptp(np.concatenate([a, b])) == 0:
            b = b + 0.05
        f = stats.f_oneway(a, b)
        w = stats.ttest_ind(a, b, equal_var=False)
        t = stats.ttest_ind(a, b, equal_var=True)
        h = stats.kruskal(a, b)
        out.append({
            "kind": kind, "a": a.tolist(), "b": b.tolist(),
            "anova": {"statistic": float(f.statistic), "pvalue": float(f.pvalue)},
            "welch": {"statistic": float(w.statistic), "pvalue": float(w.pvalue), "df": float(w.df)},
            "pooled_t": {"statistic": float(t.statistic), "pvalue": float(t.pvalue)},
            "kruskal": {"statistic": float(h.statistic), "pvalue": float(h.pvalue)},
        })
    path = Path(__file__).with_name("stat_fixtures.json")
    path.write_text(json.dumps(out, indent=1) + "\n")
    print(f"wrote {len(out)} fixtures to {path}")


if __name__ == "__main__":
    main()
