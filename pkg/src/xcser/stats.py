"""Significance pipeline: normality gate, then paired one-sided t-test or
Wilcoxon signed-rank on repetition means.

The Shapiro-Wilk statistic and p-value follow Royston's AS R94
approximation (valid for the 3..50 sample sizes used here); the Wilcoxon
test enumerates the exact distribution up to n=12 and uses the
tie-corrected normal approximation with continuity correction above.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri, stdtr


class StatError(ValueError):
    """Sample fails a test's applicability contract (size, variance, ...)."""


# ---------------------------------------------------------------------------
# Shapiro-Wilk (Royston AS R94)
# ---------------------------------------------------------------------------

def shapiro_wilk(x) -> tuple[float, float]:
    """Normality test; returns (W, p). Valid for 3 <= n <= 50."""
    x = np.sort(np.asarray(x, dtype=np.float64))
    n = x.size
    if n < 3 or n > 50:
        raise StatError(f"shapiro_wilk requires 3 <= n <= 50, got n={n}")
    ss = float(((x - x.mean()) ** 2).sum())
    if ss <= 0.0:
        raise StatError("shapiro_wilk requires non-zero sample variance")

    m = ndtri((np.arange(1, n + 1) - 0.375) / (n + 0.25))
    msq = float((m * m).sum())
    c = m / math.sqrt(msq)
    u = 1.0 / math.sqrt(n)

    a = np.empty(n)
    if n == 3:
        a[0], a[1], a[2] = -math.sqrt(0.5), 0.0, math.sqrt(0.5)
    else:
        a_n = (c[-1] + 0.221157 * u - 0.147981 * u ** 2 - 2.071190 * u ** 3
               + 4.434685 * u ** 4 - 2.706056 * u ** 5)
        if n > 5:
            a_n1 = (c[-2] + 0.042981 * u - 0.293762 * u ** 2
                    - 1.752461 * u ** 3 + 5.682633 * u ** 4
                    - 3.582633 * u ** 5)
            phi = (msq - 2.0 * m[-1] ** 2 - 2.0 * m[-2] ** 2) / (
                1.0 - 2.0 * a_n ** 2 - 2.0 * a_n1 ** 2)
            a[2:-2] = m[2:-2] / math.sqrt(phi)
            a[-1], a[-2] = a_n, a_n1
            a[0], a[1] = -a_n, -a_n1
        else:
            phi = (msq - 2.0 * m[-1] ** 2) / (1.0 - 2.0 * a_n ** 2)
            a[1:-1] = m[1:-1] / math.sqrt(phi)
            a[-1] = a_n
            a[0] = -a_n
    w_stat = float((a @ x) ** 2 / ss)
    w_stat = min(w_stat, 1.0)

    if n == 3:
        p = 6.0 / math.pi * (math.asin(math.sqrt(w_stat))
                             - math.asin(math.sqrt(0.75)))
        return w_stat, float(min(max(p, 0.0), 1.0))
    if w_stat >= 1.0:
        return w_stat, 1.0
    if n <= 11:
        g = -2.273 + 0.459 * n
        wt = -math.log(g - math.log(1.0 - w_stat))
        mu = 0.5440 - 0.39978 * n + 0.025054 * n ** 2 - 0.0006714 * n ** 3
        sigma = math.exp(1.3822 - 0.77857 * n + 0.062767 * n ** 2
                         - 0.0020322 * n ** 3)
    else:
        ln_n = math.log(n)
        wt = math.log(1.0 - w_stat)
        mu = -1.5861 - 0.31082 * ln_n - 0.083751 * ln_n ** 2 + 0.0038915 * ln_n ** 3
        sigma = math.exp(-0.4803 - 0.082676 * ln_n + 0.0030302 * ln_n ** 2)
    z = (wt - mu) / sigma
    return w_stat, float(1.0 - ndtr(z))


# ---------------------------------------------------------------------------
# paired one-sided t-test
# ---------------------------------------------------------------------------

def paired_t_one_sided(x, y, direction: str = "greater") -> tuple[float, float]:
    """t statistic on d = x - y and the one-sided p in ``direction``
    ('greater': mean(d) > 0, 'less': mean(d) < 0)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise StatError("paired samples must have equal length")
    d = x - y
    n = d.size
    if n < 2:
        raise StatError("paired t-test requires n >= 2")
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        raise StatError("paired t-test is undefined for zero-variance differences")
    t = float(d.mean() / (sd / math.sqrt(n)))
    cdf = float(stdtr(n - 1, t))
    if direction == "greater":
        return t, 1.0 - cdf
    if direction == "less":
        return t, cdf
    raise StatError(f"direction must be 'greater' or 'less', got {direction!r}")


# ---------------------------------------------------------------------------
# Wilcoxon signed-rank
# ---------------------------------------------------------------------------

def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(values.size)
    i = 0
    sorted_vals = values[order]
    while i < values.size:
        j = i
        while j + 1 < values.size and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


_EXACT_LIMIT = 12


def wilcoxon_signed_rank(x, y) -> tuple[float, float]:
    """Two-sided signed-rank test; returns (W, p) with W = min(W+, W-).

    Zero differences are dropped, tied magnitudes are mid-ranked. Up to
    n=12 the exact conditional distribution of the rank sum is enumerated;
    beyond that the normal approximation with tie correction and continuity
    correction is used. The caller reads the effect direction from the
    sample means.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise StatError("paired samples must have equal length")
    d = x - y
    d = d[d != 0.0]
    n = d.size
    if n == 0:
        raise StatError("wilcoxon is undefined when all differences are zero")
    ranks = _midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w_stat = min(w_plus, w_minus)

    if n <= _EXACT_LIMIT:
        sums = _subset_sums(ranks)
        total = sums.size
        le = int((sums <= w_stat + 1e-12).sum())
        ge = int((sums >= w_stat - 1e-12).sum())
        p = min(1.0, 2.0 * min(le, ge) / total)
        return w_stat, p

    mean = n * (n + 1) / 4.0
    var = n * (n + 1) * (2 * n + 1) / 24.0
    _, counts = np.unique(ranks, return_counts=True)
    var -= ((counts.astype(np.float64) ** 3 - counts).sum()) / 48.0
    corr = 0.5 * math.copysign(1.0, w_stat - mean) if w_stat != mean else 0.0
    z = (w_stat - mean - corr) / math.sqrt(var)
    p = 2.0 * float(1.0 - ndtr(abs(z)))
    return w_stat, min(1.0, p)


def _subset_sums(ranks: np.ndarray) -> np.ndarray:
    """Rank sums of every sign assignment (the exact null distribution)."""
    n = ranks.size
    bits = ((np.arange(2 ** n)[:, None] >> np.arange(n)) & 1).astype(np.float64)
    return bits @ ranks


# ---------------------------------------------------------------------------
# the paper-style comparison gate
# ---------------------------------------------------------------------------

@dataclass
class ComparisonRow:
    metric: str
    n: int
    baseline_mean: float
    baseline_sd: float
    treatment_mean: float
    treatment_sd: float
    direction: str          # "up" | "down" | ""
    test: str               # "paired-t" | "wilcoxon" | ""
    statistic: float | None
    p_value: float | None
    stars: str              # "" | "*" | "**"
    shapiro_p_baseline: float | None
    shapiro_p_treatment: float | None


def stars_for(p: float | None) -> str:
    if p is None:
        return ""
    if p < 0.01:
        return "**"
    if p < 0.05:
        return "*"
    return ""


def compare(baseline, treatment, metric: str = "",
            normality_alpha: float = 0.05) -> ComparisonRow:
    """Gate on Shapiro-Wilk for both samples: both normal at
    ``normality_alpha`` selects the paired one-sided t-test (in the observed
    direction), anything else the Wilcoxon signed-rank test."""
    baseline = np.asarray(baseline, dtype=np.float64)
    treatment = np.asarray(treatment, dtype=np.float64)
    if baseline.shape != treatment.shape:
        raise StatError(
            f"mismatched repetition counts: {baseline.size} vs {treatment.size}")
    n = baseline.size
    b_mean, b_sd = float(baseline.mean()), float(baseline.std(ddof=1))
    t_mean, t_sd = float(treatment.mean()), float(treatment.std(ddof=1))
    diff = t_mean - b_mean
    direction = "up" if diff > 0 else ("down" if diff < 0 else "")

    def _shapiro_p(sample):
        try:
            return shapiro_wilk(sample)[1]
        except StatError:
            return None

    sp_b = _shapiro_p(baseline)
    sp_t = _shapiro_p(treatment)

    if np.array_equal(baseline, treatment) or not np.any(treatment - baseline):
        return ComparisonRow(metric, n, b_mean, b_sd, t_mean, t_sd, "", "",
                             None, None, "", sp_b, sp_t)

    both_normal = (sp_b is not None and sp_t is not None
                   and sp_b > normality_alpha and sp_t > normality_alpha)
    try:
        if both_normal:
            stat, p = paired_t_one_sided(
                treatment, baseline, "greater" if diff >= 0 else "less")
            test = "paired-t"
        else:
            stat, p = wilcoxon_signed_rank(treatment, baseline)
            test = "wilcoxon"
    except StatError:
        return ComparisonRow(metric, n, b_mean, b_sd, t_mean, t_sd, direction,
                             "", None, None, "", sp_b, sp_t)
    return ComparisonRow(metric, n, b_mean, b_sd, t_mean, t_sd, direction,
                         test, stat, p, stars_for(p), sp_b, sp_t)


# ---------------------------------------------------------------------------
# table rendering
# ---------------------------------------------------------------------------

COMPARE_CSV_COLUMNS = ("metric", "n", "baseline_mean", "baseline_sd",
                       "treatment_mean", "treatment_sd", "direction", "test",
                       "statistic", "p_value", "stars",
                       "shapiro_p_baseline", "shapiro_p_treatment")


def comparison_csv(rows: list[ComparisonRow]) -> str:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, float):
            return repr(v)
        return str(v)

    lines = [",".join(COMPARE_CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join(cell(getattr(r, col))
                              for col in COMPARE_CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def comparison_text(rows: list[ComparisonRow], baseline_label: str = "baseline",
                    treatment_label: str = "treatment") -> str:
    arrow = {"up": "^", "down": "v", "": " "}
    lines = [f"{'metric':<18} {baseline_label:>22} {treatment_label:>25} "
             f"{'test':>9} {'p':>10}"]
    for r in rows:
        base = f"{r.baseline_mean:.4g} +-{r.baseline_sd:.3g}"
        treat = f"{r.treatment_mean:.4g} +-{r.treatment_sd:.3g} " \
                f"{arrow[r.direction]}{r.stars}"
        p_txt = "" if r.p_value is None else f"{r.p_value:.4g}"
        lines.append(f"{r.metric:<18} {base:>22} {treat:>25} "
                     f"{r.test:>9} {p_txt:>10}")
    return "\n".join(lines) + "\n"
