"""Residual bootstrap on the original observation grid.

Standardized one-step residuals at the fitted parameters are centered,
resampled with replacement, and pushed back through the fitted recursion
on the very same time grid, so every surrogate series sees exactly the
spacing structure of the data.  Refitting each surrogate gives the
sampling spread of the estimator without leaning on asymptotics.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import TimeSeries, _theta_pow, c_sequence
from .errors import BootstrapUnstable, ImaError, InsufficientData, InvalidParameter
from .estimate import fit_mle
from .rng import as_generator, stream


@dataclass(frozen=True)
class BootstrapResult:
    """Replicate estimates and their summary statistics.

    theta_b and sigma2_b are replicate means, se_theta_b and se_sigma2_b
    the replicate standard deviations (the bootstrap standard errors), and
    the interval dicts map a confidence level to a percentile interval.
    """

    fit: object
    replicate_thetas: np.ndarray
    replicate_sigma2s: np.ndarray
    theta_b: float
    se_theta_b: float
    sigma2_b: float
    se_sigma2_b: float
    theta_intervals: dict
    sigma2_intervals: dict
    n_replicates: int
    n_failed: int

    def to_dict(self):
        return {
            "fit": self.fit.to_dict(),
            "theta_b": float(self.theta_b),
            "se_theta_b": float(self.se_theta_b),
            "sigma2_b": float(self.sigma2_b),
            "se_sigma2_b": float(self.se_sigma2_b),
            "theta_intervals": {
                str(k): [float(v[0]), float(v[1])]
                for k, v in self.theta_intervals.items()
            },
            "sigma2_intervals": {
                str(k): [float(v[0]), float(v[1])]
                for k, v in self.sigma2_intervals.items()
            },
            "n_replicates": int(self.n_replicates),
            "n_failed": int(self.n_failed),
        }


def standardized_residuals(fit, series):
    """One-step residuals at the fitted theta, scaled by sqrt(c_n).

    e_n = (X_{t_n} - xhat_{t_n}) / sqrt(c_n(theta_hat)), for every n
    including the first, whose predictor is the fitted mean.  On a correct
    model these are approximately uncorrelated with common variance
    sigma2_hat.
    """
    xc = series.values - fit.mu
    e, c = _kernels.innovation_recursion(xc, series.grid.gaps, fit.theta_hat)
    return e / np.sqrt(c)


def bootstrap_resample(fit, series, seed=0):
    """One surrogate series regenerated on the original grid.

    Residuals are centered by the mean of entries 2..N (divisor N - 1) and
    resampled i.i.d. with replacement; the surrogate is rebuilt through

        X*_{t_1} = sqrt(c_1) e*_1,
        X*_{t_n} = sqrt(c_n) e*_n
                 + theta_hat^(gap_n) / c_{n-1} * sqrt(c_{n-1}) e*_{n-1},

    plus the fitted mean, with all quantities at theta_hat.
    """
    if series.n < 3:
        raise InsufficientData(f"need at least 3 observations, got {series.n}")
    rng = as_generator(seed)
    res = standardized_residuals(fit, series)
    centered = res - res[1:].sum() / (series.n - 1)
    draw = centered[rng.integers(0, series.n, series.n)]
    c = c_sequence(fit.theta_hat, series.grid)
    sqrt_c = np.sqrt(c)
    x = np.empty(series.n)
    x[0] = sqrt_c[0] * draw[0]
    w = _theta_pow(fit.theta_hat, series.grid.gaps) / c[:-1]
    x[1:] = sqrt_c[1:] * draw[1:] + w * sqrt_c[:-1] * draw[:-1]
    return TimeSeries(grid=series.grid, values=x + fit.mu)


def bootstrap_estimate(
    series,
    b=500,
    seed=0,
    mu=None,
    levels=(0.95,),
    keep_replicates=True,
    max_failure_share=0.10,
):
    """Fit, resample b times, refit, and summarize the replicates.

    Replicate refits that raise a model error are recorded and skipped;
    more than ``max_failure_share`` of them failing raises
    BootstrapUnstable.  ``mu`` is passed through to the initial fit
    (None means sample mean); replicates rebuilt around the fitted mean
    are refitted under the same convention.
    """
    if b < 2:
        raise InvalidParameter(f"need at least 2 replicates, got {b!r}")
    fit = fit_mle(series, mu=mu)
    bracket = (fit.theta_hat - 0.3, fit.theta_hat + 0.3)
    thetas = np.full(b, math.nan)
    sigma2s = np.full(b, math.nan)
    failed = 0
    for i in range(b):
        surrogate = bootstrap_resample(fit, series, stream(seed, i))
        try:
            refit = fit_mle(
                surrogate,
                mu=None if fit.mu_estimated else fit.mu,
                compute_se=False,
                theta_bracket=bracket,
            )
        except ImaError:
            failed += 1
            continue
        thetas[i] = refit.theta_hat
        sigma2s[i] = refit.sigma2_hat
    if failed > max_failure_share * b:
        raise BootstrapUnstable(
            f"{failed} of {b} bootstrap replicates failed to refit"
        )
    ok = ~np.isnan(thetas)
    th = thetas[ok]
    s2 = sigma2s[ok]
    if th.size < 2:
        raise BootstrapUnstable("fewer than 2 usable bootstrap replicates")
    intervals_t = {}
    intervals_s = {}
    for level in levels:
        if not 0.0 < level < 1.0:
            raise InvalidParameter(f"confidence level must be in (0, 1), got {level!r}")
        tail = 100.0 * (1.0 - level) / 2.0
        lo_t, hi_t = np.percentile(th, [tail, 100.0 - tail])
        lo_s, hi_s = np.percentile(s2, [tail, 100.0 - tail])
        intervals_t[level] = (float(lo_t), float(hi_t))
        intervals_s[level] = (float(lo_s), float(hi_s))
    return BootstrapResult(
        fit=fit,
        replicate_thetas=th if keep_replicates else np.empty(0),
        replicate_sigma2s=s2 if keep_replicates else np.empty(0),
        theta_b=float(th.mean()),
        se_theta_b=float(th.std(ddof=1)),
        sigma2_b=float(s2.mean()),
        se_sigma2_b=float(s2.std(ddof=1)),
        theta_intervals=intervals_t,
        sigma2_intervals=intervals_s,
        n_replicates=int(th.size),
        n_failed=failed,
    )
