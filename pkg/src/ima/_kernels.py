"""Sequential recursions, JIT-compiled when numba is available.

These loops are the hot path of estimation: a single likelihood evaluation
walks the whole series, and a Monte Carlo table multiplies that by tens of
thousands of optimizer calls.  Powers of theta are computed as
exp(gap * log(theta)) with an explicit theta == 0 branch; the squared power
reuses the same exponential so that every kernel produces bit-identical
variance factors.
"""

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


@njit(cache=True, nogil=True)
def c_recursion(theta, gaps):
    """Variance factors c_1..c_N for gaps (t_2-t_1, ..., t_N-t_{N-1}).

    c_1 = 1 + theta^2,  c_n = 1 + theta^2 - theta^(2*gap_n) / c_{n-1}.
    """
    n = gaps.shape[0] + 1
    c = np.empty(n)
    head = 1.0 + theta * theta
    c[0] = head
    if theta == 0.0:
        for i in range(1, n):
            c[i] = 1.0
        return c
    log_theta = np.log(theta)
    for i in range(1, n):
        td = np.exp(gaps[i - 1] * log_theta)
        c[i] = head - td * td / c[i - 1]
    return c


@njit(cache=True, nogil=True)
def innovation_recursion(xc, gaps, theta):
    """One-step innovations and variance factors for mean-centered data.

    Returns (e, c) where e_n = x_n - xhat_n with xhat_1 = 0 and
    xhat_n = theta^(gap_n) / c_{n-1} * e_{n-1}.
    """
    n = xc.shape[0]
    e = np.empty(n)
    c = np.empty(n)
    head = 1.0 + theta * theta
    c[0] = head
    e[0] = xc[0]
    if theta == 0.0:
        for i in range(1, n):
            c[i] = 1.0
            e[i] = xc[i]
        return e, c
    log_theta = np.log(theta)
    for i in range(1, n):
        td = np.exp(gaps[i - 1] * log_theta)
        e[i] = xc[i] - td / c[i - 1] * e[i - 1]
        c[i] = head - td * td / c[i - 1]
    return e, c


@njit(cache=True, nogil=True)
def likelihood_terms(xc, gaps, theta):
    """Fused pass returning (sum e_n^2 / c_n, sum log c_n).

    Same recursion as innovation_recursion without materializing arrays;
    this is the optimizer's objective kernel.
    """
    n = xc.shape[0]
    head = 1.0 + theta * theta
    c_prev = head
    e_prev = xc[0]
    ss = e_prev * e_prev / c_prev
    logc = np.log(c_prev)
    if theta == 0.0:
        for i in range(1, n):
            ss += xc[i] * xc[i]
        return ss, logc
    log_theta = np.log(theta)
    for i in range(1, n):
        td = np.exp(gaps[i - 1] * log_theta)
        e = xc[i] - td / c_prev * e_prev
        cn = head - td * td / c_prev
        ss += e * e / cn
        logc += np.log(cn)
        e_prev = e
        c_prev = cn
    return ss, logc
