"""One-step prediction through four routes that must agree.

The workhorse is the innovations recursion specialized to the tridiagonal
covariance: only the previous innovation matters, weighted by
theta^(gap) / c.  The same predictors fall out of the general innovations
algorithm run on the covariances, of a state-space filter whose disturbance
enters both equations, of the explicit expansion of the innovation in past
observations, and of brute-force linear projection.  Keeping the slow
routes around turns any regression in the fast one into a loud test
failure instead of a quiet bias.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solveh_banded

from . import _kernels
from .core import TimeSeries, _theta_pow, c_sequence
from .errors import InvalidInput, NotPositiveDefinite


@dataclass(frozen=True)
class PredictionOutput:
    """Aligned per-observation prediction arrays.

    predictors[n] is the best linear one-step prediction of the n-th value
    from everything before it (the first entry is the process mean), mse[n]
    its error variance sigma2 * c_n, innovations the prediction errors, and
    standardized the errors scaled to unit variance.
    """

    predictors: np.ndarray
    mse: np.ndarray
    innovations: np.ndarray
    standardized: np.ndarray


def _check_series(series):
    if not isinstance(series, TimeSeries):
        raise InvalidInput("need a TimeSeries")


def innovations_predict(params, series):
    """One-step predictors via the gap-aware innovations recursion.

    xhat_{t_1} = mu and, writing e_n for the n-th innovation,

        xhat_{t_{n+1}} = mu + theta^(gap_{n+1}) / c_n * e_n,

    with prediction error variance sigma2 * c_n at every step.
    """
    _check_series(series)
    xc = series.values - params.mu
    e, c = _kernels.innovation_recursion(xc, series.grid.gaps, params.theta)
    mse = params.sigma2 * c
    return PredictionOutput(
        predictors=series.values - e,
        mse=mse,
        innovations=e,
        standardized=e / np.sqrt(mse),
    )


def innovations_algorithm_general(gamma0, gamma1):
    """General innovations algorithm for a tridiagonal covariance.

    Given the common variance gamma0 and adjacent covariances gamma1[n]
    between observations n and n+1, returns (coeffs, mse) where

        mse_1 = gamma0,
        coeffs_n = gamma1[n] / mse_n,
        mse_{n+1} = gamma0 - coeffs_n^2 * mse_n.

    The n-th predictor is coeffs_{n-1} times the previous innovation, and
    mse_n equals sigma2 * c_n when the covariances come from the model.
    Inputs must satisfy gamma0 > 0 and (gamma1 / gamma0)^2 <= 1/4, the
    positive-definiteness condition for arbitrary grids.
    """
    gamma1 = np.asarray(gamma1, dtype=float)
    if not gamma0 > 0.0:
        raise NotPositiveDefinite(f"gamma0 must be positive, got {gamma0!r}")
    if np.any((gamma1 / gamma0) ** 2 > 0.25):
        raise NotPositiveDefinite(
            "an adjacent covariance exceeds half the variance; "
            "the covariance matrix is not guaranteed positive definite"
        )
    n = gamma1.shape[0] + 1
    coeffs = np.empty(n - 1)
    mse = np.empty(n)
    mse[0] = gamma0
    for i in range(n - 1):
        coeffs[i] = gamma1[i] / mse[i]
        mse[i + 1] = gamma0 - coeffs[i] ** 2 * mse[i]
        if mse[i + 1] <= 0.0:
            raise NotPositiveDefinite(f"prediction variance collapsed at step {i + 1}")
    return coeffs, mse


def direct_predict_oracle(params, series, max_n=5000):
    """One-step predictors by explicit linear projection, step by step.

    For each n solves the tridiagonal system Gamma_n phi = gamma_n with
    gamma_n = (0, ..., 0, sigma2 * theta^(gap_{n+1}))' and projects the
    history onto phi; the prediction variance is gamma0 - gamma_n' phi.
    Quadratic cost, meant as a cross-check, hence the size cap.
    """
    _check_series(series)
    n = series.n
    if n > max_n:
        raise InvalidInput(f"series of length {n} exceeds the oracle cap {max_n}")
    gamma0 = params.sigma2 * (1.0 + params.theta**2)
    xc = series.values - params.mu
    predictors = np.empty(n)
    mse = np.empty(n)
    predictors[0] = params.mu
    mse[0] = gamma0
    if n > 1:
        off = params.sigma2 * _theta_pow(params.theta, series.grid.gaps)
        for k in range(1, n):
            rhs = np.zeros(k)
            rhs[-1] = off[k - 1]
            if k == 1:
                phi = rhs / gamma0
            else:
                # banded upper form of the leading k-by-k covariance block
                ab = np.zeros((2, k))
                ab[1, :] = gamma0
                ab[0, 1:] = off[: k - 1]
                try:
                    phi = solveh_banded(ab, rhs)
                except np.linalg.LinAlgError as exc:
                    raise NotPositiveDefinite(str(exc)) from exc
            predictors[k] = params.mu + phi @ xc[:k]
            mse[k] = gamma0 - rhs @ phi
            if mse[k] <= 0.0:
                raise NotPositiveDefinite(f"prediction variance collapsed at step {k}")
    e = series.values - predictors
    return PredictionOutput(
        predictors=predictors,
        mse=mse,
        innovations=e,
        standardized=e / np.sqrt(mse),
    )


def state_space_filter(params, series):
    """One-step predictors via the state recursion with shared disturbance.

    The observation splits as X = mu + alpha + eps where the state obeys

        alpha_{t_{n+1}} = theta^(gap_{n+1}) / c_n * (X_{t_n} - mu - alpha_{t_n}),

    starting from alpha_{t_1} = 0, and mu + alpha_{t_n} is exactly the
    one-step predictor: the recursion is the innovations recursion in
    state-space clothing, so the outputs match to machine precision.
    """
    _check_series(series)
    theta = params.theta
    xc = series.values - params.mu
    gaps = series.grid.gaps
    n = series.n
    head = 1.0 + theta * theta
    alpha = np.empty(n)
    c = np.empty(n)
    alpha[0] = 0.0
    c[0] = head
    if theta == 0.0:
        alpha[1:] = 0.0
        c[1:] = 1.0
    else:
        log_theta = math.log(theta)
        for i in range(1, n):
            td = math.exp(gaps[i - 1] * log_theta)
            alpha[i] = td / c[i - 1] * (xc[i - 1] - alpha[i - 1])
            c[i] = head - td * td / c[i - 1]
    mse = params.sigma2 * c
    e = xc - alpha
    return PredictionOutput(
        predictors=params.mu + alpha,
        mse=mse,
        innovations=e,
        standardized=e / np.sqrt(mse),
    )


def residual_expansion(params, series):
    """Innovations written explicitly in past observations.

    e_{t_1} = X_{t_1} - mu and, for n > 1,

        e_{t_n} = (X_{t_n} - mu)
                + sum_{j=1}^{n-1} (-1)^j
                  prod_{k=n-j+1}^{n} theta^(gap_k) / prod_{l=n-j}^{n-1} c_l
                  * (X_{t_{n-j}} - mu),

    evaluated with log-space products so long runs of small powers
    underflow to zero instead of corrupting the sum.  Quadratic cost;
    exists as an independent route to the same innovations.
    """
    _check_series(series)
    theta = params.theta
    xc = series.values - params.mu
    n = series.n
    if theta == 0.0:
        return xc.copy()
    gaps = series.grid.gaps
    logc = np.log(c_sequence(theta, series.grid))
    log_theta = math.log(theta)
    e = np.empty(n)
    for i in range(n):
        acc = xc[i]
        log_coef = 0.0
        sign = 1.0
        for j in range(1, i + 1):
            log_coef += gaps[i - j] * log_theta - logc[i - j]
            sign = -sign
            if log_coef < -745.0:  # exp underflows to zero from here on
                break
            acc += sign * math.exp(log_coef) * xc[i - j]
        e[i] = acc
    return e
