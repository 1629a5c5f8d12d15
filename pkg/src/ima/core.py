"""Model primitives for first-order moving averages on irregular grids.

The process observed at strictly increasing times t_1 < ... < t_N has

    Var(X_{t_n})                = sigma2 * (1 + theta^2)
    Cov(X_{t_n}, X_{t_{n+1}})   = sigma2 * theta^(t_{n+1} - t_n)

and zero covariance beyond adjacent observations, so the N-point covariance
matrix is tridiagonal.  With every gap at least one unit long and
0 <= theta < 1, the matrix is positive definite.  Grids whose smallest gap
falls below one are rescaled at construction time and the factor recorded.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import (
    InvalidGap,
    InvalidInput,
    InvalidParameter,
    InvalidTimes,
)
from .rng import as_generator

THETA_MAX = 1.0 - 1e-8


def _theta_pow(theta, exponents):
    """theta**exponents elementwise via exp, with theta == 0 explicit."""
    exponents = np.asarray(exponents, dtype=float)
    if theta == 0.0:
        return np.zeros_like(exponents)
    return np.exp(exponents * math.log(theta))


def _frozen(arr):
    out = np.ascontiguousarray(arr, dtype=float)
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing observation times with all gaps >= 1.

    ``gaps`` is the authoritative spacing sequence (length N - 1) and
    ``scale`` the factor the original times were divided by, 1.0 when no
    rescaling was needed.  Instances are immutable; build them with
    :func:`gap_sequence`, :func:`regular_grid`, or a gap sampler.
    """

    times: np.ndarray
    gaps: np.ndarray
    scale: float = 1.0

    @property
    def n(self):
        return self.times.shape[0]

    def min_gap(self):
        return float(self.gaps.min()) if self.gaps.size else math.nan

    def max_gap(self):
        return float(self.gaps.max()) if self.gaps.size else math.nan

    def is_regular(self):
        return bool(np.all(self.gaps == 1.0))

    def to_dict(self):
        return {
            "n": int(self.n),
            "scale": float(self.scale),
            "min_gap": None if self.n < 2 else self.min_gap(),
            "max_gap": None if self.n < 2 else self.max_gap(),
            "regular": bool(self.n < 2 or self.is_regular()),
        }


def gap_sequence(times):
    """Build a TimeGrid from raw observation times.

    Times must be finite and strictly increasing.  When the smallest gap is
    below one, every time is divided by that gap so the smallest rescaled
    gap is exactly one, and the divisor is recorded as ``scale``.
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise InvalidTimes("need a one-dimensional array of at least one time")
    if not np.all(np.isfinite(t)):
        raise InvalidTimes("times must be finite")
    g = np.diff(t)
    if np.any(g <= 0.0):
        k = int(np.argmax(g <= 0.0))
        raise InvalidTimes(
            f"times must be strictly increasing; offending entry at position {k + 1} "
            f"(t={t[k + 1]!r} after t={t[k]!r})"
        )
    scale = 1.0
    if g.size and float(g.min()) < 1.0:
        scale = float(g.min())
        t = t / scale
        g = g / scale
    return TimeGrid(times=_frozen(t), gaps=_frozen(g), scale=scale)


def regular_grid(n):
    """Unit-spaced grid 0, 1, ..., n-1."""
    if n < 1:
        raise InvalidInput("need at least one observation time")
    return TimeGrid(
        times=_frozen(np.arange(n, dtype=float)),
        gaps=_frozen(np.ones(n - 1)),
        scale=1.0,
    )


@dataclass(frozen=True)
class TimeSeries:
    """Values observed on a TimeGrid."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim != 1 or vals.shape[0] != self.grid.n:
            raise InvalidInput(
                f"need one value per time, got {vals.shape} for n={self.grid.n}"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidInput("values must be finite")
        object.__setattr__(self, "values", _frozen(vals))

    @property
    def n(self):
        return self.grid.n


@dataclass(frozen=True)
class ImaParams:
    """Process parameters: moving-average weight, innovation variance, mean.

    theta lives in [0, 1 - 1e-8]; the open upper edge keeps the invertible
    region closed under optimization.  sigma2 must be strictly positive.
    """

    theta: float
    sigma2: float
    mu: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.theta <= THETA_MAX):
            raise InvalidParameter(
                f"theta must be in [0, {THETA_MAX}], got {self.theta!r}"
            )
        if not (self.sigma2 > 0.0 and math.isfinite(self.sigma2)):
            raise InvalidParameter(f"sigma2 must be positive, got {self.sigma2!r}")
        if not math.isfinite(self.mu):
            raise InvalidParameter("mu must be finite")


@dataclass(frozen=True)
class InnovationDist:
    """Unit-variance innovation law used by the simulator.

    Supported kinds: gaussian, student_t (tail index nu > 2, scaled by
    sqrt((nu - 2) / nu)), and ged (shape nu > 0, the generalized error
    density nu * exp(-|x / lam|^nu / 2) / (lam * 2^(1 + 1/nu) * Gamma(1/nu))
    with lam chosen so the variance is one).
    """

    kind: str
    shape: float = math.nan

    @classmethod
    def gaussian(cls):
        return cls(kind="gaussian")

    @classmethod
    def student_t(cls, nu):
        if not nu > 2.0:
            raise InvalidParameter(f"student_t needs nu > 2, got {nu!r}")
        return cls(kind="student_t", shape=float(nu))

    @classmethod
    def ged(cls, nu):
        if not nu > 0.0:
            raise InvalidParameter(f"ged needs nu > 0, got {nu!r}")
        return cls(kind="ged", shape=float(nu))

    @classmethod
    def parse(cls, text):
        """Parse 'gaussian', 'student_t(7)', or 'ged(1.28)'."""
        s = text.strip().lower()
        if s == "gaussian":
            return cls.gaussian()
        for name, factory in (("student_t", cls.student_t), ("ged", cls.ged)):
            if s.startswith(name + "(") and s.endswith(")"):
                try:
                    val = float(s[len(name) + 1 : -1])
                except ValueError:
                    raise InvalidParameter(f"bad innovation spec {text!r}") from None
                return factory(val)
        raise InvalidParameter(f"unknown innovation distribution {text!r}")

    def label(self):
        if self.kind == "gaussian":
            return "gaussian"
        return f"{self.kind}({self.shape:g})"

    def sample(self, rng, n):
        """Draw n standardized innovations (mean 0, variance 1)."""
        rng = as_generator(rng)
        if self.kind == "gaussian":
            return rng.standard_normal(n)
        if self.kind == "student_t":
            nu = self.shape
            return rng.standard_t(nu, n) * math.sqrt((nu - 2.0) / nu)
        if self.kind == "ged":
            nu = self.shape
            lam = math.sqrt(
                2.0 ** (-2.0 / nu) * math.gamma(1.0 / nu) / math.gamma(3.0 / nu)
            )
            # |X|^nu / (2 lam^nu) ~ Gamma(1/nu, 1), sign symmetric
            g = rng.standard_gamma(1.0 / nu, n)
            sign = rng.integers(0, 2, n) * 2.0 - 1.0
            return sign * lam * (2.0 * g) ** (1.0 / nu)
        raise InvalidParameter(f"unknown innovation kind {self.kind!r}")


def c_sequence(theta, grid):
    """Variance factors c_1..c_N of the one-step prediction recursion.

    c_1 = 1 + theta^2 and c_n = 1 + theta^2 - theta^(2 gap_n) / c_{n-1}.
    For unit-or-larger gaps the sequence stays inside [1, 2).  The products
    sigma2 * c_n are simultaneously the one-step prediction error variances,
    the Cholesky pivots of the covariance matrix, and its leading principal
    minor ratios.
    """
    if not (0.0 <= theta <= THETA_MAX):
        raise InvalidParameter(f"theta must be in [0, {THETA_MAX}], got {theta!r}")
    if not isinstance(grid, TimeGrid):
        raise InvalidInput("grid must be a TimeGrid")
    return _kernels.c_recursion(float(theta), grid.gaps)


def autocovariance(params, lag_gap=None):
    """Autocovariance at lag zero (default) or across a gap of lag_gap >= 1."""
    if lag_gap is None:
        return params.sigma2 * (1.0 + params.theta**2)
    if not (lag_gap >= 1.0 and math.isfinite(lag_gap)):
        raise InvalidGap(f"lag gap must be >= 1, got {lag_gap!r}")
    if params.theta == 0.0:
        return 0.0
    return params.sigma2 * math.exp(lag_gap * math.log(params.theta))


def covariance_matrix(params, grid):
    """Dense tridiagonal covariance of the process on the grid."""
    n = grid.n
    gamma0 = params.sigma2 * (1.0 + params.theta**2)
    cov = np.zeros((n, n))
    np.fill_diagonal(cov, gamma0)
    if n > 1:
        off = params.sigma2 * _theta_pow(params.theta, grid.gaps)
        idx = np.arange(n - 1)
        cov[idx, idx + 1] = off
        cov[idx + 1, idx] = off
    return cov


def simulate(params, grid, dist=None, seed=0):
    """Exact draw of the process on the grid.

    Writes the observation as the sum of its own innovation and the
    weighted previous one,

        X_{t_1} = mu + eps_{t_1},
        X_{t_n} = mu + eps_{t_n} + theta^(gap_n) / c_{n-1} * eps_{t_{n-1}},

    with Var(eps_{t_n}) = sigma2 * c_n, which reproduces the tridiagonal
    covariance exactly at every sample size.  ``dist`` defaults to gaussian;
    ``seed`` may be an integer or a Generator.
    """
    if dist is None:
        dist = InnovationDist.gaussian()
    rng = as_generator(seed)
    n = grid.n
    c = c_sequence(params.theta, grid)
    zeta = dist.sample(rng, n)
    eps = np.sqrt(params.sigma2 * c) * zeta
    x = np.empty(n)
    x[0] = params.mu + eps[0]
    if n > 1:
        w = _theta_pow(params.theta, grid.gaps) / c[:-1]
        x[1:] = params.mu + eps[1:] + w * eps[:-1]
    return TimeSeries(grid=grid, values=x)


def sample_gaps_shifted_exp(n, lam=1.0, seed=0):
    """Grid with gaps 1 + Exponential(rate lam), so the mean gap is 1 + 1/lam."""
    if n < 1:
        raise InvalidInput("need at least one observation time")
    if not lam > 0.0:
        raise InvalidParameter(f"rate must be positive, got {lam!r}")
    rng = as_generator(seed)
    if n == 1:
        return regular_grid(1)
    g = 1.0 + rng.exponential(1.0 / lam, n - 1)
    times = np.concatenate(([0.0], np.cumsum(g)))
    return TimeGrid(times=_frozen(times), gaps=_frozen(g), scale=1.0)


def sample_gaps_exp_mixture(n, means=(130.0, 6.5), weights=(0.15, 0.85), seed=0):
    """Grid with exponential-mixture gaps, rescaled so the smallest is one.

    Each raw gap is Exponential(mean means[0]) with probability weights[0],
    else Exponential(mean means[1]).  Raw draws routinely fall below one,
    so the whole grid goes through the same rescaling as gap_sequence and
    the divisor is recorded on the grid.
    """
    if n < 1:
        raise InvalidInput("need at least one observation time")
    if len(means) != 2 or len(weights) != 2:
        raise InvalidParameter("means and weights must each have two entries")
    if not all(m > 0.0 for m in means):
        raise InvalidParameter(f"mixture means must be positive, got {means!r}")
    if not all(w >= 0.0 for w in weights):
        raise InvalidParameter(f"mixture weights must be nonnegative, got {weights!r}")
    if abs(sum(weights) - 1.0) > 1e-12:
        raise InvalidParameter(f"mixture weights must sum to one, got {weights!r}")
    rng = as_generator(seed)
    if n == 1:
        return regular_grid(1)
    pick = rng.random(n - 1) < weights[0]
    raw = rng.exponential(1.0, n - 1) * np.where(pick, means[0], means[1])
    times = np.concatenate(([0.0], np.cumsum(raw)))
    return gap_sequence(times)
