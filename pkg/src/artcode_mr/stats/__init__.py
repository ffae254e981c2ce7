"""Statistical tests and the group-level verification study."""

from .compare import (anova_oneway, dunnett_test, kruskal_wallis, pooled_ttest, rankdata,
                      welch_ttest)
from .special import betainc, chi2_sf, f_sf, gammainc, gammaincc, t_sf, t_two_sided
from .verify import (NO_VIOLATION, TEST_COLUMNS, VIOLATION, RhoGroup, VerificationReport, VerifyConfig,
                     group_means, run_verification, sample_groups)

__all__ = [
    "NO_VIOLATION", "TEST_COLUMNS", "VIOLATION", "RhoGroup", "VerificationReport", "VerifyConfig",
    "anova_oneway", "betainc", "chi2_sf", "dunnett_test", "f_sf", "gammainc", "gammaincc", "group_means",
    "kruskal_wallis", "pooled_ttest", "rankdata", "run_verification", "sample_groups", "t_sf",
    "t_two_sided", "welch_ttest",
]
