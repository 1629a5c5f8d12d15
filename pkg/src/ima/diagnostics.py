"""Residual diagnostics: autocorrelations, portmanteau test, QQ data,
and the per-step prediction variance gained by honoring the gaps.

Everything here operates on the standardized one-step residuals of a fit,
which should look like uncorrelated noise with constant variance when the
model is adequate.
"""

import math
from collections import namedtuple
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np
from scipy.special import gammaincc

from .bootstrap import standardized_residuals
from .core import c_sequence, regular_grid, TimeSeries
from .errors import DegenerateData, InsufficientData, InvalidInput, InvalidParameter
from .estimate import fit_mle

_NORMAL = NormalDist()


def acf(x, max_lag):
    """Sample autocorrelations at lags 0..max_lag.

    rho_k = sum (x_t - xbar)(x_{t+k} - xbar) / sum (x_t - xbar)^2; the
    zero-lag entry is identically one.
    """
    x = np.asarray(x, dtype=float)
    if not (isinstance(max_lag, (int, np.integer)) and max_lag >= 1):
        raise InvalidInput(f"max_lag must be an integer >= 1, got {max_lag!r}")
    if x.ndim != 1 or x.shape[0] <= max_lag:
        raise InsufficientData(
            f"need more than {max_lag} observations, got {x.shape}"
        )
    xc = x - x.mean()
    denom = float(xc @ xc)
    if denom == 0.0:
        raise DegenerateData("constant sequence has no autocorrelation")
    out = np.empty(max_lag + 1)
    out[0] = 1.0
    for k in range(1, max_lag + 1):
        out[k] = float(xc[:-k] @ xc[k:]) / denom
    return out


def chi_square_sf(x, df):
    """Survival function of the chi-square law, P(X > x)."""
    if df <= 0:
        raise InvalidParameter(f"df must be positive, got {df!r}")
    if x < 0.0:
        return 1.0
    return float(gammaincc(df / 2.0, x / 2.0))


LjungBoxResult = namedtuple("LjungBoxResult", ["lags", "stats", "pvalues"])


def ljung_box(x, lags):
    """Portmanteau statistics Q(h) and p-values for h = 1..lags.

    Q(h) = N (N + 2) sum_{k=1}^{h} rho_k^2 / (N - k), referred to a
    chi-square law with h degrees of freedom.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if not (isinstance(lags, (int, np.integer)) and lags >= 1):
        raise InvalidInput(f"lags must be an integer >= 1, got {lags!r}")
    if n <= lags:
        raise InsufficientData(f"need more than {lags} observations, got {n}")
    rho = acf(x, lags)
    hs = np.arange(1, lags + 1)
    terms = rho[1:] ** 2 / (n - hs)
    stats = n * (n + 2.0) * np.cumsum(terms)
    pvals = np.array([chi_square_sf(q, h) for q, h in zip(stats, hs)])
    return LjungBoxResult(lags=hs, stats=stats, pvalues=pvals)


QqData = namedtuple("QqData", ["theoretical", "empirical", "lower", "upper"])


def qq_normal(x, band_level=0.95):
    """Normal QQ pairs with pointwise confidence bands.

    Pairs (Phi^{-1}(p_i), x_(i)) with p_i = (i - 0.5) / N; the band around
    the theoretical quantile q_i has half-width z * se_i where

        se_i = sqrt(p_i (1 - p_i) / N) / phi(q_i)

    is the large-sample standard error of the i-th order statistic.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.shape[0] < 3:
        raise InsufficientData(f"need at least 3 observations, got {x.shape}")
    if not 0.0 < band_level < 1.0:
        raise InvalidParameter(f"band level must be in (0, 1), got {band_level!r}")
    n = x.shape[0]
    p = (np.arange(1, n + 1) - 0.5) / n
    q = np.array([_NORMAL.inv_cdf(pi) for pi in p])
    z = _NORMAL.inv_cdf(0.5 + band_level / 2.0)
    dens = np.exp(-0.5 * q**2) / math.sqrt(2.0 * math.pi)
    half = z * np.sqrt(p * (1.0 - p) / n) / dens
    return QqData(
        theoretical=q,
        empirical=np.sort(x),
        lower=q - half,
        upper=q + half,
    )


MseComparison = namedtuple("MseComparison", ["mse_ima", "mse_ma", "means"])


def mse_comparison(series, fit):
    """Per-step prediction variance, gap-aware versus gap-blind.

    mse_ima is sigma2_hat * c_n(theta_hat) on the true gaps.  mse_ma
    refits the same values pretending the spacing were one throughout and
    reports that model's per-step variance, which converges to a constant.
    On an already-regular grid the two fits see identical data, so the
    sequences coincide.  Returns the two sequences and their means.
    """
    mse_ima = fit.sigma2_hat * c_sequence(fit.theta_hat, series.grid)
    flat = TimeSeries(grid=regular_grid(series.n), values=series.values)
    fit_ma = fit_mle(
        flat,
        mu=None if fit.mu_estimated else fit.mu,
        compute_se=False,
    )
    mse_ma = fit_ma.sigma2_hat * c_sequence(fit_ma.theta_hat, flat.grid)
    return MseComparison(
        mse_ima=mse_ima,
        mse_ma=mse_ma,
        means=(float(mse_ima.mean()), float(mse_ma.mean())),
    )


@dataclass(frozen=True)
class DiagnosticsReport:
    """Bundle of residual diagnostics for one fit."""

    acf_lags: np.ndarray
    acf_values: np.ndarray
    acf_band: float
    lb_lags: np.ndarray
    lb_stats: np.ndarray
    lb_pvalues: np.ndarray
    qq: QqData
    mse_ima: np.ndarray
    mse_ma: np.ndarray
    mse_ima_mean: float
    mse_ma_mean: float
    n_obs: int

    def to_dict(self):
        return {
            "n_obs": int(self.n_obs),
            "acf_band": float(self.acf_band),
            "acf": {
                "lags": [int(k) for k in self.acf_lags],
                "values": [float(v) for v in self.acf_values],
            },
            "ljung_box": {
                "lags": [int(h) for h in self.lb_lags],
                "stats": [float(q) for q in self.lb_stats],
                "pvalues": [float(p) for p in self.lb_pvalues],
            },
            "mse": {
                "ima_mean": float(self.mse_ima_mean),
                "ma_mean": float(self.mse_ma_mean),
            },
        }


def diagnostics_report(series, fit, lags=10, band_level=0.95):
    """Run the full diagnostic battery on a fit's standardized residuals."""
    res = standardized_residuals(fit, series)
    lags = int(min(lags, series.n - 1))
    if lags < 1:
        raise InsufficientData("series too short for any diagnostic lag")
    rho = acf(res, lags)
    lb = ljung_box(res, lags)
    comparison = mse_comparison(series, fit)
    return DiagnosticsReport(
        acf_lags=np.arange(lags + 1),
        acf_values=rho,
        acf_band=1.96 / math.sqrt(series.n),
        lb_lags=lb.lags,
        lb_stats=lb.stats,
        lb_pvalues=lb.pvalues,
        qq=qq_normal(res, band_level),
        mse_ima=comparison.mse_ima,
        mse_ma=comparison.mse_ma,
        mse_ima_mean=comparison.means[0],
        mse_ma_mean=comparison.means[1],
        n_obs=series.n,
    )
