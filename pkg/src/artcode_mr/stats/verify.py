"""Group-level verification of the MR-augmented classifier.

Artcode rho-values form one group; ``K`` equally sized groups are sampled
from the non-Artcode rho-values, and each is compared against the Artcode
group with four tests.  Small p-values mean the two classes are told apart
as the relations predict; large ones point at a possible violation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import DatasetError, GroupTooSmall, InvalidSpec
from .compare import anova_oneway, dunnett_test, kruskal_wallis, welch_ttest

TEST_COLUMNS = ("ANOVA", "Welch", "ANOVA_ranks", "Dunnett")
SUMMARY_ROWS = ("median", "mean", "min", "max", "std")
VERDICT_RULES = ("median_p", "fraction_significant")
NO_VIOLATION = "no violation detected"
VIOLATION = "possible MR violation"


@dataclass(frozen=True)
class RhoGroup:
    name: str
    values: tuple[float, ...]
    rho_max: float = 1.0

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise GroupTooSmall(f"group {self.name!r} is empty")
        if not all(math.isfinite(v) and -1e-12 <= v <= self.rho_max + 1e-12 for v in vals):
            raise InvalidSpec(f"group {self.name!r} has values outside [0, {self.rho_max}]")

    def __len__(self):
        return len(self.values)

    @property
    def mean(self) -> float:
        return math.fsum(self.values) / len(self.values)


@dataclass(frozen=True)
class VerifyConfig:
    k_groups: int = 20
    alpha: float = 0.05
    seed: int = 0
    verdict_rule: str = "median_p"
    mc_samples: int = 100_000
    # tests that must reach significance for the default rule
    min_tests: int = 2
    # share of rows that must be significant for "fraction_significant"
    min_fraction: float = 0.5
    alternative: str = "two-sided"

    def __post_init__(self):
        if self.k_groups < 2:
            raise InvalidSpec("K must be at least 2")
        if not 0 < self.alpha < 1:
            raise InvalidSpec("alpha must lie in (0, 1)")
        if self.verdict_rule not in VERDICT_RULES:
            raise InvalidSpec(f"verdict_rule must be one of {VERDICT_RULES}")
        if self.mc_samples < 1:
            raise InvalidSpec("mc_samples must be positive")
        if not 1 <= self.min_tests <= len(TEST_COLUMNS):
            raise InvalidSpec("min_tests must be between 1 and 4")
        if self.alternative not in ("two-sided", "greater", "less"):
            raise InvalidSpec("alternative must be two-sided, greater or less")


def sample_groups(rho_non_artcode: RhoGroup, group_size: int, k: int, seed: int) -> list[RhoGroup]:
    """``k`` groups drawn without replacement within a group, independently across groups."""
    if group_size < 1 or group_size > len(rho_non_artcode):
        raise GroupTooSmall(f"cannot draw {group_size} of {len(rho_non_artcode)} values")
    rng = np.random.default_rng(int(seed))
    pool = np.asarray(rho_non_artcode.values)
    return [
        RhoGroup(f"{rho_non_artcode.name}_{i + 1}", tuple(pool[rng.permutation(len(pool))[:group_size]]),
                 rho_non_artcode.rho_max)
        for i in range(k)
    ]


@dataclass(frozen=True)
class GroupMeans:
    per_group: tuple[float, ...]
    pooled: float  # mean of the K group means
    grand: float | None  # including the Artcode group, when given


def group_means(groups, artcode: RhoGroup | float | None = None) -> GroupMeans:
    means = tuple(g.mean for g in groups)
    pooled = math.fsum(means) / len(means)
    grand = None
    if artcode is not None:
        a = artcode.mean if isinstance(artcode, RhoGroup) else float(artcode)
        grand = (math.fsum(means) + a) / (len(means) + 1)
    return GroupMeans(means, pooled, grand)


def describe(column) -> dict[str, float]:
    x = np.asarray(column, dtype=np.float64)
    return {
        "median": float(np.median(x)),
        "mean": float(x.mean()),
        "min": float(x.min()),
        "max": float(x.max()),
        "std": float(x.std(ddof=1)) if len(x) > 1 else 0.0,
    }


@dataclass(frozen=True)
class VerificationReport:
    pvalues: tuple[tuple[float, ...], ...]  # K rows in TEST_COLUMNS order
    dunnett_se: tuple[float, ...]
    artcode_mean: float
    means: GroupMeans
    config: VerifyConfig
    verdict: str = field(default="")

    @property
    def summary(self) -> dict[str, dict[str, float]]:
        cols = np.asarray(self.pvalues)
        return {name: describe(cols[:, j]) for j, name in enumerate(TEST_COLUMNS)}

    def significant_tests(self) -> list[str]:
        return [name for name, s in self.summary.items() if s["median"] < self.config.alpha]

    def to_json(self) -> dict:
        return {
            "columns": list(TEST_COLUMNS),
            "rows": [list(r) for r in self.pvalues],
            "summary": self.summary,
            "dunnett_se": list(self.dunnett_se),
            "artcode_mean": self.artcode_mean,
            "group_means": list(self.means.per_group),
            "non_artcode_mean": self.means.pooled,
            "grand_mean": self.means.grand,
            "config": {k: getattr(self.config, k) for k in self.config.__dataclass_fields__},
            "verdict": self.verdict,
        }

    def render_table(self) -> str:
        """Text table: one row per group, then the summary rows, six decimals."""
        width = 12
        lines = ["group".ljust(8) + "".join(c.rjust(width) for c in TEST_COLUMNS)]
        lines.append("-" * len(lines[0]))
        for i, row in enumerate(self.pvalues, 1):
            lines.append(str(i).ljust(8) + "".join(f"{p:{width}.6f}" for p in row))
        lines.append("-" * len(lines[0]))
        summary = self.summary
        for stat in SUMMARY_ROWS:
            lines.append(stat.ljust(8) + "".join(f"{summary[c][stat]:{width}.6f}" for c in TEST_COLUMNS))
        lines.append("")
        lines.append(f"artcode mean rho {self.artcode_mean:.6f}; non-artcode mean of group means {self.means.pooled:.6f}")
        lines.append(f"verdict: {self.verdict}")
        return "\n".join(lines) + "\n"


def decide(pvalues, cfg: VerifyConfig) -> str:
    cols = np.asarray(pvalues, dtype=np.float64)
    if cfg.verdict_rule == "median_p":
        hits = int((np.median(cols, axis=0) < cfg.alpha).sum())
    else:
        hits = int(((cols < cfg.alpha).mean(axis=0) >= cfg.min_fraction).sum())
    return NO_VIOLATION if hits >= cfg.min_tests else VIOLATION


def run_verification(rho_artcode: RhoGroup, rho_non_artcode: RhoGroup,
                     cfg: VerifyConfig = VerifyConfig()) -> VerificationReport:
    """One sampling pass of ``K`` groups shared by all four tests."""
    groups = sample_groups(rho_non_artcode, len(rho_artcode), cfg.k_groups, cfg.seed)
    a = np.asarray(rho_artcode.values)
    alt = cfg.alternative
    # Dunnett's treatments are the non-Artcode groups, so a one-sided question flips direction
    dunnett_alt = {"two-sided": "two-sided", "greater": "less", "less": "greater"}[alt]
    dunnett = dunnett_test(a, [g.values for g in groups], cfg.mc_samples, cfg.seed, alternative=dunnett_alt)
    rows = tuple(
        (
            anova_oneway(a, np.asarray(g.values), alternative=alt).pvalue,
            welch_ttest(a, np.asarray(g.values), alternative=alt).pvalue,
            kruskal_wallis(a, np.asarray(g.values), alternative=alt).pvalue,
            p_dunnett,
        )
        for g, p_dunnett in zip(groups, dunnett.pvalues)
    )
    return VerificationReport(rows, dunnett.std_errors, rho_artcode.mean, group_means(groups, rho_artcode),
                              cfg, decide(rows, cfg))


def write_report(report: VerificationReport, json_path, table_path=None) -> None:
    try:
        with open(json_path, "w") as fh:
            json.dump(report.to_json(), fh, indent=2)
            fh.write("\n")
        if table_path is not None:
            with open(table_path, "w") as fh:
                fh.write(report.render_table())
    except OSError as exc:
        raise DatasetError(f"cannot write report: {exc}") from exc
