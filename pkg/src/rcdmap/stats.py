"""Randomized complete block design ANOVA and Fisher LSD letter groupings.

Distribution functions go through the regularized incomplete beta function
(``scipy.special.betainc``); the t quantile is found by Newton's method on
that CDF.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import betainc


# distributions ------------------------------------------------------------

def t_cdf(x: float, df: float) -> float:
    """Student t CDF."""
    if df <= 0:
        raise ValueError("df must be positive")
    if x == 0:
        return 0.5
    tail = 0.5 * betainc(df / 2.0, 0.5, df / (df + x * x))
    return float(1.0 - tail if x > 0 else tail)


def t_pdf(x: float, df: float) -> float:
    lg = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(lg - (df + 1) / 2 * math.log1p(x * x / df))


def t_ppf(p: float, df: float, rtol: float = 1e-14, max_iter: int = 100) -> float:
    """Quantile of the t distribution by safeguarded Newton iteration."""
    if not 0.0 < p < 1.0:
        raise ValueError("p must lie in (0, 1)")
    if p == 0.5:
        return 0.0
    if p < 0.5:
        return -t_ppf(1.0 - p, df, rtol, max_iter)
    # bracket by doubling; Newton steps leaving the bracket fall back to bisection
    lo, hi = 0.0, 1.0
    while t_cdf(hi, df) < p:
        lo, hi = hi, hi * 2.0
    x = 0.5 * (lo + hi)
    for _ in range(max_iter):
        f = t_cdf(x, df) - p
        if f > 0:
            hi = x
        else:
            lo = x
        step = f / t_pdf(x, df)
        nxt = x - step
        if not lo < nxt < hi:
            nxt = 0.5 * (lo + hi)
        if abs(nxt - x) <= rtol * max(1.0, abs(nxt)):
            return nxt
        x = nxt
    return x


def f_cdf(x: float, d1: float, d2: float) -> float:
    if x <= 0:
        return 0.0
    return float(betainc(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2)))


def f_sf(x: float, d1: float, d2: float) -> float:
    """Upper tail ``1 - F_cdf``, evaluated directly to keep small p-values accurate."""
    if x <= 0:
        return 1.0
    return float(betainc(d2 / 2.0, d1 / 2.0, d2 / (d1 * x + d2)))


# RCBD ANOVA ---------------------------------------------------------------

@dataclass(frozen=True)
class AnovaTable:
    ss_treat: float
    ss_block: float
    ss_error: float
    ss_total: float
    df_treat: int
    df_block: int
    df_error: int
    df_total: int
    ms_treat: float
    ms_block: float
    ms_error: float
    f0: float
    p_value: float
    f_block: float
    p_block: float
    degenerate: bool = False

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.__dataclass_fields__}
        d["supplementary"] = ["f_block", "p_block"]
        return d


def rcbd_anova(values) -> AnovaTable:
    """Two-way additive decomposition of ``values[i, j]`` (treatment i, block j)."""
    y = np.asarray(values, dtype=np.float64)
    if y.ndim != 2 or y.shape[0] < 2 or y.shape[1] < 2:
        raise ValueError("need a complete matrix with >= 2 treatments and >= 2 blocks")
    if not np.all(np.isfinite(y)):
        raise ValueError("design must be complete (no missing cells)")
    a, b = y.shape
    grand = y.mean()
    tm = y.mean(axis=1)
    bm = y.mean(axis=0)
    ss_treat = float(b * np.sum((tm - grand) ** 2))
    ss_block = float(a * np.sum((bm - grand) ** 2))
    ss_total = float(np.sum((y - grand) ** 2))
    resid = y - tm[:, None] - bm[None, :] + grand
    ss_error = float(np.sum(resid ** 2))
    df_t, df_b = a - 1, b - 1
    df_e = df_t * df_b
    ms_t, ms_b, ms_e = ss_treat / df_t, ss_block / df_b, ss_error / df_e
    scale = max(ss_total, 1.0)
    if ms_e <= 1e-12 * scale:
        return AnovaTable(ss_treat, ss_block, ss_error, ss_total, df_t, df_b, df_e, a * b - 1,
                          ms_t, ms_b, ms_e, math.inf if ms_t > 0 else math.nan, 0.0,
                          math.inf if ms_b > 0 else math.nan, 0.0, degenerate=True)
    f0, fb = ms_t / ms_e, ms_b / ms_e
    return AnovaTable(ss_treat, ss_block, ss_error, ss_total, df_t, df_b, df_e, a * b - 1,
                      ms_t, ms_b, ms_e, f0, f_sf(f0, df_t, df_e), fb, f_sf(fb, df_b, df_e))


# Fisher LSD ---------------------------------------------------------------

@dataclass(frozen=True)
class LsdResult:
    names: list
    means: list
    lsd: float
    letters: dict          # name -> string of letters
    groups: list           # each group: list of names sharing one letter

    def different(self, a, b) -> bool:
        return not set(self.letters[a]) & set(self.letters[b])

    def display(self) -> str:
        width = max(len(str(n)) for n in self.names)
        lines = [f"LSD = {self.lsd:.4f}"]
        for name, mean in zip(self.names, self.means):
            lines.append(f"{str(name):<{width}}  {self.letters[name]:<{len(self.groups)}}  {mean:.4f}")
        return "\n".join(lines) + "\n"


def fisher_lsd(means, ms_error: float, df_error: float, reps: int, alpha_level: float = 0.05,
               names=None) -> LsdResult:
    """Letter display for pairwise LSD comparisons.

    Levels are sorted by mean (descending); each maximal run of consecutive
    levels whose range is within the LSD gets a letter.
    """
    if df_error < 1:
        raise ValueError("df_error must be >= 1")
    means = np.asarray(means, dtype=np.float64)
    if names is None:
        names = list(range(len(means)))
    lsd = t_ppf(1.0 - alpha_level / 2.0, df_error) * math.sqrt(2.0 * ms_error / reps)
    order = np.argsort(-means, kind="stable")
    sm = means[order]
    sn = [names[i] for i in order]
    k = len(sm)
    spans = []
    last_end = -1
    for i in range(k):
        j = i
        while j + 1 < k and sm[i] - sm[j + 1] <= lsd:
            j += 1
        if j > last_end:
            spans.append((i, j))
            last_end = j
    letters = {nm: "" for nm in sn}
    groups = []
    for gi, (i, j) in enumerate(spans):
        ch = _letter(gi)
        members = sn[i:j + 1]
        groups.append(members)
        for nm in members:
            letters[nm] += ch
    return LsdResult(sn, sm.tolist(), lsd, letters, groups)


def _letter(i: int) -> str:
    s = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        s = chr(ord("A") + r) + s
    return s


def blocked_from_long(rows) -> tuple[np.ndarray, list, list]:
    """Matrix from ``(treatment, block, value)`` rows, keeping first-seen order."""
    treats, blocks, cells = [], [], {}
    for t, b, v in rows:
        if t not in treats:
            treats.append(t)
        if b not in blocks:
            blocks.append(b)
        if (t, b) in cells:
            raise ValueError(f"duplicate cell ({t}, {b})")
        cells[(t, b)] = float(v)
    y = np.full((len(treats), len(blocks)), np.nan)
    for (t, b), v in cells.items():
        y[treats.index(t), blocks.index(b)] = v
    if np.isnan(y).any():
        raise ValueError("incomplete design: some (treatment, block) cells are missing")
    return y, treats, blocks
