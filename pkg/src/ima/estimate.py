"""Maximum likelihood estimation via the reduced one-parameter profile.

The exact Gaussian log-likelihood on an irregular grid is

    loglik = -N/2 log(2 pi sigma2) - 1/2 sum log c_n
             - 1/2 sum e_n^2 / (sigma2 * c_n),

all sums over n = 1..N with e_n the one-step innovations at theta.
Profiling out sigma2 gives sigma2_hat(theta) = mean of e_n^2 / c_n and the
reduced objective

    q(theta) = log sigma2_hat(theta) + mean of log c_n,

minimized over theta in [0, 1 - 1e-8] by a bounded Brent search.  Standard
errors come from the curvature of the log-likelihood in (theta, sigma2).
"""

import math
from collections import namedtuple
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .core import THETA_MAX, ImaParams, TimeSeries
from .errors import (
    DegenerateData,
    InsufficientData,
    InvalidInput,
    InvalidParameter,
    NumericalFailure,
    SeUnavailable,
)

_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))
_SQRT_EPS = math.sqrt(2.220446049250313e-16)
_BOUNDARY_TOL = 1e-6


@dataclass(frozen=True)
class FitResult:
    """Outcome of a maximum likelihood fit.

    se_theta and se_sigma2 are NaN when the curvature did not support a
    standard error; they are never fabricated.  boundary_hit flags an
    estimate within 1e-6 of either end of the theta domain, where the
    quadratic approximation behind the standard errors is suspect.
    """

    theta_hat: float
    sigma2_hat: float
    se_theta: float
    se_sigma2: float
    loglik: float
    q_value: float
    iterations: int
    converged: bool
    boundary_hit: bool
    mu: float
    mu_estimated: bool
    n_obs: int

    def params(self):
        return ImaParams(theta=self.theta_hat, sigma2=self.sigma2_hat, mu=self.mu)

    def to_dict(self):
        def _f(v):
            return None if (isinstance(v, float) and math.isnan(v)) else float(v)

        return {
            "theta_hat": float(self.theta_hat),
            "sigma2_hat": float(self.sigma2_hat),
            "se_theta": _f(self.se_theta),
            "se_sigma2": _f(self.se_sigma2),
            "loglik": float(self.loglik),
            "q_value": float(self.q_value),
            "iterations": int(self.iterations),
            "converged": bool(self.converged),
            "boundary_hit": bool(self.boundary_hit),
            "mu": float(self.mu),
            "mu_estimated": bool(self.mu_estimated),
            "n_obs": int(self.n_obs),
        }


MinimizeResult = namedtuple("MinimizeResult", ["argmin", "value", "iterations"])


def minimize_bounded(f, lo, hi, tol=1e-8, max_iter=200):
    """Brent-style scalar minimization on [lo, hi].

    Alternates golden-section steps with parabolic interpolation through the
    three best points, never evaluating outside the bracket.  ``iterations``
    counts function evaluations.  Non-finite objective values raise
    NumericalFailure; there is nothing sensible to do with them here.
    """
    if not (lo < hi and math.isfinite(lo) and math.isfinite(hi)):
        raise InvalidParameter(f"need finite lo < hi, got {lo!r}, {hi!r}")

    def call(x):
        y = f(x)
        if not math.isfinite(y):
            raise NumericalFailure(f"objective returned {y!r} at {x!r}")
        return y

    a, b = lo, hi
    x = w = v = a + _GOLDEN * (b - a)
    fx = fw = fv = call(x)
    evals = 1
    step = prev_step = 0.0
    while evals < max_iter:
        m = 0.5 * (a + b)
        tol1 = _SQRT_EPS * abs(x) + tol / 3.0
        tol2 = 2.0 * tol1
        if abs(x - m) <= tol2 - 0.5 * (b - a):
            break
        use_golden = True
        if abs(prev_step) > tol1:
            # parabola through (v, fv), (x, fx), (w, fw)
            r = (x - w) * (fx - fv)
            q = (x - v) * (fx - fw)
            p = (x - v) * q - (x - w) * r
            q = 2.0 * (q - r)
            if q > 0.0:
                p = -p
            q = abs(q)
            r = prev_step
            prev_step = step
            if abs(p) < abs(0.5 * q * r) and p > q * (a - x) and p < q * (b - x):
                step = p / q
                u = x + step
                if (u - a) < tol2 or (b - u) < tol2:
                    step = tol1 if m >= x else -tol1
                use_golden = False
        if use_golden:
            prev_step = (a - x) if x >= m else (b - x)
            step = _GOLDEN * prev_step
        u = x + (step if abs(step) >= tol1 else (tol1 if step > 0.0 else -tol1))
        fu = call(u)
        evals += 1
        if fu <= fx:
            if u >= x:
                a = x
            else:
                b = x
            v, fv = w, fw
            w, fw = x, fx
            x, fx = u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu <= fw or w == x:
                v, fv = w, fw
                w, fw = u, fu
            elif fu <= fv or v == x or v == w:
                v, fv = u, fu
    return MinimizeResult(argmin=x, value=fx, iterations=evals)


def _centered(series, mu):
    if not isinstance(series, TimeSeries):
        raise InvalidInput("need a TimeSeries")
    if mu is None:
        mu_val = float(np.mean(series.values))
        estimated = True
    else:
        mu_val = float(mu)
        estimated = False
    return series.values - mu_val, mu_val, estimated


def reduced_likelihood(theta, series, mu=0.0):
    """Reduced objective and profiled variance at a given theta.

    Returns (q, sigma2_hat) where sigma2_hat = mean of e_n^2 / c_n and
    q = log sigma2_hat + mean of log c_n.  The full log-likelihood at
    (theta, sigma2_hat) is -N/2 (log 2 pi + 1 + q).
    """
    if not (0.0 <= theta <= THETA_MAX):
        raise InvalidParameter(f"theta must be in [0, {THETA_MAX}], got {theta!r}")
    xc, _, _ = _centered(series, mu)
    n = series.n
    ss, logc = _kernels.likelihood_terms(xc, series.grid.gaps, float(theta))
    sigma2 = ss / n
    if not sigma2 > 0.0:
        raise DegenerateData("all innovations are zero; no variance to estimate")
    if not math.isfinite(sigma2):
        raise NumericalFailure(f"profiled variance is {sigma2!r} at theta={theta!r}")
    return math.log(sigma2) + logc / n, sigma2


def log_likelihood(params, series):
    """Exact Gaussian log-likelihood; its exponential is the joint density."""
    xc = series.values - params.mu
    n = series.n
    ss, logc = _kernels.likelihood_terms(xc, series.grid.gaps, params.theta)
    return (
        -0.5 * n * math.log(2.0 * math.pi * params.sigma2)
        - 0.5 * logc
        - 0.5 * ss / params.sigma2
    )


def fit_mle(
    series,
    mu=None,
    tol=1e-8,
    max_iter=200,
    compute_se=True,
    theta_bracket=None,
):
    """Maximum likelihood fit of (theta, sigma2).

    ``mu=None`` (the default) subtracts the sample mean before fitting;
    pass an explicit value, typically 0.0, to fix the mean.  A warm-start
    ``theta_bracket`` restricts the first search; a minimum landing on an
    interior edge of the restriction triggers a full-domain retry, so the
    restriction can only speed things up, not change the answer.
    """
    if series.n < 3:
        raise InsufficientData(f"need at least 3 observations, got {series.n}")
    xc, mu_val, mu_estimated = _centered(series, mu)
    gaps = series.grid.gaps
    n = series.n

    def objective(theta):
        ss, logc = _kernels.likelihood_terms(xc, gaps, theta)
        sigma2 = ss / n
        if sigma2 <= 0.0:
            raise DegenerateData("all innovations are zero; no variance to estimate")
        return math.log(sigma2) + logc / n

    lo, hi = 0.0, THETA_MAX
    iterations = 0
    if theta_bracket is not None:
        blo = max(lo, float(theta_bracket[0]))
        bhi = min(hi, float(theta_bracket[1]))
        if blo < bhi:
            res = minimize_bounded(objective, blo, bhi, tol=tol, max_iter=max_iter)
            iterations = res.iterations
            edge = 16.0 * tol
            inner_lo = blo > lo and res.argmin - blo < edge
            inner_hi = bhi < hi and bhi - res.argmin < edge
            if not (inner_lo or inner_hi):
                return _finish(
                    series, res, mu_val, mu_estimated, iterations, max_iter, compute_se
                )
    res = minimize_bounded(objective, lo, hi, tol=tol, max_iter=max_iter)
    iterations += res.iterations
    return _finish(series, res, mu_val, mu_estimated, iterations, max_iter, compute_se)


def _finish(series, res, mu_val, mu_estimated, iterations, max_iter, compute_se):
    theta_hat = float(res.argmin)
    q_value, sigma2_hat = reduced_likelihood(theta_hat, series, mu=mu_val)
    params = ImaParams(theta=theta_hat, sigma2=sigma2_hat, mu=mu_val)
    boundary = theta_hat <= _BOUNDARY_TOL or theta_hat >= THETA_MAX - _BOUNDARY_TOL
    fit = FitResult(
        theta_hat=theta_hat,
        sigma2_hat=sigma2_hat,
        se_theta=math.nan,
        se_sigma2=math.nan,
        loglik=log_likelihood(params, series),
        q_value=q_value,
        iterations=iterations,
        converged=res.iterations < max_iter,
        boundary_hit=boundary,
        mu=mu_val,
        mu_estimated=mu_estimated,
        n_obs=series.n,
    )
    if compute_se:
        try:
            se_theta, se_sigma2 = observed_information_se(fit, series)
        except SeUnavailable:
            pass
        else:
            fit = replace(fit, se_theta=se_theta, se_sigma2=se_sigma2)
    return fit


def observed_information_se(fit, series):
    """Standard errors from the observed information at the optimum.

    Central second differences of the negative log-likelihood in
    (theta, sigma2) with steps max(1e-5, 1e-4 |theta_hat|) and
    1e-4 * sigma2_hat; the theta stencil is shifted inward when the
    optimum sits within a step of the domain edge.  Raises SeUnavailable
    when the resulting matrix is not positive definite.
    """
    th, s2, mu = fit.theta_hat, fit.sigma2_hat, fit.mu
    h_t = max(1e-5, 1e-4 * abs(th))
    h_s = 1e-4 * s2
    tc = min(max(th, h_t), THETA_MAX - h_t)

    def nll(theta, sigma2):
        params = ImaParams(theta=theta, sigma2=sigma2, mu=mu)
        val = log_likelihood(params, series)
        if not math.isfinite(val):
            raise SeUnavailable("log-likelihood not finite near the optimum")
        return -val

    f00 = nll(tc, s2)
    d_tt = (nll(tc + h_t, s2) - 2.0 * f00 + nll(tc - h_t, s2)) / h_t**2
    d_ss = (nll(tc, s2 + h_s) - 2.0 * f00 + nll(tc, s2 - h_s)) / h_s**2
    d_ts = (
        nll(tc + h_t, s2 + h_s)
        - nll(tc + h_t, s2 - h_s)
        - nll(tc - h_t, s2 + h_s)
        + nll(tc - h_t, s2 - h_s)
    ) / (4.0 * h_t * h_s)
    det = d_tt * d_ss - d_ts**2
    if not (d_tt > 0.0 and det > 0.0):
        raise SeUnavailable(
            f"observed information not positive definite "
            f"(d_tt={d_tt:.3g}, det={det:.3g})"
        )
    return math.sqrt(d_ss / det), math.sqrt(d_tt / det)


def asymptotic_se_regular(theta, n):
    """Large-sample standard error sqrt((1 - theta^2) / n) on a unit grid."""
    if not (0.0 <= theta < 1.0):
        raise InvalidParameter(f"theta must be in [0, 1), got {theta!r}")
    if n < 1:
        raise InvalidInput(f"need a positive sample size, got {n!r}")
    return math.sqrt((1.0 - theta**2) / n)
