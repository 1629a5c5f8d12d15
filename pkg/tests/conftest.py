"""Shared fixtures and independent oracles.

The oracles here deliberately avoid the package's own kernels: covariance
matrices are built entry by entry from the definition, densities come from
a dense Cholesky factorization, and the classical MA(1) likelihood is a
straight transcription of the textbook innovations recursion.  Agreement
with these is what the fast-path tests mean by "correct".
"""

import math

import numpy as np
import pytest

import ima


def make_grid(times):
    return ima.gap_sequence(np.asarray(times, dtype=float))


def dense_gamma(theta, sigma2, times):
    """Covariance matrix from the definition: entrywise, no recursions."""
    times = np.asarray(times, dtype=float)
    n = times.size
    g = np.zeros((n, n))
    for i in range(n):
        g[i, i] = sigma2 * (1.0 + theta * theta)
        if i + 1 < n:
            gap = times[i + 1] - times[i]
            g[i, i + 1] = g[i + 1, i] = sigma2 * theta**gap
    return g


def dense_loglik(theta, sigma2, mu, times, values):
    """Gaussian log density via dense Cholesky on the definition's matrix."""
    g = dense_gamma(theta, sigma2, np.asarray(times, dtype=float))
    x = np.asarray(values, dtype=float) - mu
    ell = np.linalg.cholesky(g)
    z = np.linalg.solve(ell, x)
    logdet = 2.0 * np.log(np.diag(ell)).sum()
    return -0.5 * (x.size * math.log(2.0 * math.pi) + logdet + z @ z)


def ma1_loglik_regular(theta, sigma2, mu, values):
    """Classical MA(1) innovations-form likelihood, unit gaps only.

    Textbook recursion: r_1 = 1 + theta^2, r_n = 1 + theta^2 - theta^2/r_{n-1},
    xhat_n = (theta / r_{n-1}) * (x_{n-1} - xhat_{n-1}).
    """
    x = np.asarray(values, dtype=float) - mu
    n = x.size
    r = 1.0 + theta * theta
    xhat = 0.0
    quad = 0.0
    logdet = 0.0
    for i in range(n):
        e = x[i] - xhat
        quad += e * e / r
        logdet += math.log(r)
        r_next = 1.0 + theta * theta - theta * theta / r
        xhat = (theta / r) * e
        r = r_next
    return -0.5 * (n * math.log(2.0 * math.pi * sigma2) + logdet + quad / sigma2)


def random_instance(rng, n_max=10, theta=None):
    """One admissible (params, series) pair with gaps in [1, 10]."""
    n = int(rng.integers(2, n_max + 1))
    gaps = 1.0 + 9.0 * rng.random(n - 1)
    times = np.concatenate([[0.0], np.cumsum(gaps)])
    grid = ima.gap_sequence(times)
    if theta is None:
        theta = float(rng.choice([0.0, 0.1, 0.5, 0.9, 0.99]))
    sigma2 = float(0.3 + 2.7 * rng.random())
    mu = float(rng.normal(0.0, 2.0))
    params = ima.ImaParams(theta=theta, sigma2=sigma2, mu=mu)
    series = ima.simulate(params, grid, seed=int(rng.integers(1 << 31)))
    return params, series


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
