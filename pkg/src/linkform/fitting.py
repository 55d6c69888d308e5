"""Degree-distribution fits used by the structural checks.

Discrete power-law tail fit after Clauset, Shalizi & Newman (2009): the
exponent uses the ``xmin - 1/2`` continuity-corrected MLE and ``xmin`` is the
candidate minimising the KS distance to the fitted tail. Goodness of fit is a
Pearson chi-square over categories merged until every expected count is >= 5.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import optimize, special, stats


@dataclass(frozen=True)
class PowerLawFit:
    alpha: float
    xmin: int
    n_tail: int
    ks: float


@dataclass(frozen=True)
class ChiSquare:
    statistic: float
    dof: int
    p_value: float


def _alpha_mle(x: np.ndarray, xmin: int) -> float:
    return 1.0 + len(x) / np.sum(np.log(x / (xmin - 0.5)))


def _powerlaw_cdf(alpha: float, xmin: int, xs: np.ndarray) -> np.ndarray:
    return 1.0 - special.zeta(alpha, xs + 1) / special.zeta(alpha, xmin)


def fit_power_law(degrees, xmin: int | None = None, min_tail: int = 50) -> PowerLawFit:
    """Fit the tail exponent; scans xmin over observed values when not given."""
    x = np.asarray(degrees, dtype=np.float64)
    x = x[x >= 1]
    if xmin is not None:
        candidates = [int(xmin)]
    else:
        uniq = np.unique(x).astype(int)
        candidates = [k for k in uniq if np.count_nonzero(x >= k) >= min_tail] or [int(uniq[0])]
    best = None
    for k in candidates:
        tail = np.sort(x[x >= k])
        alpha = _alpha_mle(tail, k)
        vals, counts = np.unique(tail, return_counts=True)
        emp = np.cumsum(counts) / len(tail)
        ks = float(np.max(np.abs(emp - _powerlaw_cdf(alpha, k, vals))))
        if best is None or ks < best.ks:
            best = PowerLawFit(float(alpha), int(k), len(tail), ks)
    return best


def _chi_square(observed: np.ndarray, expected: np.ndarray, n_params: int) -> ChiSquare:
    """Pearson chi-square, merging categories from the right until expected >= 5."""
    obs, exp = [], []
    o_acc = e_acc = 0.0
    for o, e in zip(observed[::-1], expected[::-1]):
        o_acc += o
        e_acc += e
        if e_acc >= 5.0:
            obs.append(o_acc)
            exp.append(e_acc)
            o_acc = e_acc = 0.0
    if e_acc > 0 or o_acc > 0:
        if exp:
            obs[-1] += o_acc
            exp[-1] += e_acc
        else:
            obs.append(o_acc)
            exp.append(e_acc)
    obs = np.array(obs)
    exp = np.array(exp)
    stat = float(np.sum((obs - exp) ** 2 / exp))
    dof = max(len(obs) - 1 - n_params, 1)
    return ChiSquare(stat, dof, float(stats.chi2.sf(stat, dof)))


def _support(degrees, kmin):
    x = np.asarray(degrees, dtype=np.int64)
    x = x[x >= kmin]
    kmax = int(x.max())
    ks = np.arange(kmin, kmax + 1)
    observed = np.bincount(x - kmin, minlength=len(ks)).astype(float)
    return x, ks, observed


def chi_square_binomial(degrees, n_trials: int, kmin: int = 0) -> ChiSquare:
    """Chi-square of degrees >= kmin against a binomial truncated below kmin.

    The success probability is fitted so the truncated mean matches the data.
    """
    x, ks, observed = _support(degrees, kmin)
    target = x.mean()

    def tmean(p):
        lo = stats.binom.sf(kmin - 1, n_trials, p)
        full = stats.binom.mean(n_trials, p)
        below = sum(k * stats.binom.pmf(k, n_trials, p) for k in range(kmin))
        return (full - below) / lo - target

    if kmin == 0:
        p = target / n_trials
    else:
        p = optimize.brentq(tmean, 1e-9, 1.0 - 1e-9)
    norm = stats.binom.sf(kmin - 1, n_trials, p)
    pmf = stats.binom.pmf(ks, n_trials, p) / norm
    pmf[-1] += stats.binom.sf(ks[-1], n_trials, p) / norm
    return _chi_square(observed, pmf * len(x), n_params=1)


def chi_square_power_law(degrees, kmin: int | None = None) -> tuple[ChiSquare, PowerLawFit]:
    """Chi-square of degrees >= kmin against a discrete power law fitted from kmin."""
    x = np.asarray(degrees, dtype=np.int64)
    if kmin is None:
        kmin = int(x[x >= 1].min())
    fit = fit_power_law(x, xmin=kmin)
    x, ks, observed = _support(x, kmin)
    z = special.zeta(fit.alpha, kmin)
    pmf = ks.astype(float) ** (-fit.alpha) / z
    pmf[-1] += special.zeta(fit.alpha, ks[-1] + 1) / z
    return _chi_square(observed, pmf * len(x), n_params=1), fit


def favors_binomial(degrees, n_trials: int, kmin: int | None = None) -> bool:
    """True when a binomial explains the degrees better than a power law.

    Compares chi-square per degree of freedom, since the two fits merge
    categories differently.
    """
    x = np.asarray(degrees, dtype=np.int64)
    if kmin is None:
        kmin = int(x[x >= 1].min())
    pl, _ = chi_square_power_law(x, kmin)
    bn = chi_square_binomial(x, n_trials, kmin)
    return bn.statistic / bn.dof < pl.statistic / pl.dof
