"""Monte Carlo study harness.

Simulates the process under a known parameter, fits every replicate (by
maximum likelihood alone or with a nested bootstrap), and reduces the
replicate estimates to the usual study measures: mean estimate, mean
reported standard error, empirical standard deviation, bias, root mean
squared error, coefficient of variation, and the Monte Carlo error of the
mean estimate.

Every replicate draws from its own counter-based stream keyed by the
replicate index, and aggregation walks replicates in index order, so a run
is bit-for-bit reproducible regardless of the thread count.  Fits impose a
zero mean, matching the mean-free generator.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .bootstrap import bootstrap_estimate
from .core import (
    ImaParams,
    InnovationDist,
    regular_grid,
    sample_gaps_exp_mixture,
    sample_gaps_shifted_exp,
    simulate,
)
from .errors import ImaError, InvalidParameter, McUnstable
from .estimate import fit_mle
from .rng import child_seed, stream

# stream-key domains, so grids, series, and nested bootstraps never collide
_REPLICATE = 0
_SHARED_GRID = 1
_BOOTSTRAP = 2


@dataclass(frozen=True)
class GapModel:
    """Spacing generator for simulated grids.

    kind is one of regular, shifted_exp (gaps 1 + Exponential(rate)), or
    exp_mixture (two-component exponential gaps rescaled to unit minimum).
    """

    kind: str
    rate: float = 1.0
    means: tuple = (130.0, 6.5)
    weights: tuple = (0.15, 0.85)

    @classmethod
    def regular(cls):
        return cls(kind="regular")

    @classmethod
    def shifted_exp(cls, rate=1.0):
        if not rate > 0.0:
            raise InvalidParameter(f"rate must be positive, got {rate!r}")
        return cls(kind="shifted_exp", rate=float(rate))

    @classmethod
    def exp_mixture(cls, means=(130.0, 6.5), weights=(0.15, 0.85)):
        return cls(
            kind="exp_mixture",
            means=(float(means[0]), float(means[1])),
            weights=(float(weights[0]), float(weights[1])),
        )

    @classmethod
    def parse(cls, text):
        """Parse 'regular', 'shifted_exp(1.0)', or 'exp_mixture(130,6.5,0.15,0.85)'."""
        s = text.strip().lower()
        if s == "regular":
            return cls.regular()
        if s.startswith("shifted_exp(") and s.endswith(")"):
            try:
                return cls.shifted_exp(float(s[len("shifted_exp(") : -1]))
            except ValueError:
                raise InvalidParameter(f"bad gap model spec {text!r}") from None
        if s.startswith("exp_mixture(") and s.endswith(")"):
            body = s[len("exp_mixture(") : -1]
            try:
                vals = [float(v) for v in body.split(",")]
            except ValueError:
                raise InvalidParameter(f"bad gap model spec {text!r}") from None
            if len(vals) != 4:
                raise InvalidParameter(
                    f"exp_mixture needs mean1,mean2,weight1,weight2, got {text!r}"
                )
            return cls.exp_mixture(means=vals[:2], weights=vals[2:])
        raise InvalidParameter(f"unknown gap model {text!r}")

    def label(self):
        if self.kind == "regular":
            return "regular"
        if self.kind == "shifted_exp":
            return f"shifted_exp({self.rate:g})"
        return (
            f"exp_mixture({self.means[0]:g},{self.means[1]:g},"
            f"{self.weights[0]:g},{self.weights[1]:g})"
        )

    def sample(self, n, rng):
        if self.kind == "regular":
            return regular_grid(n)
        if self.kind == "shifted_exp":
            return sample_gaps_shifted_exp(n, lam=self.rate, seed=rng)
        if self.kind == "exp_mixture":
            return sample_gaps_exp_mixture(
                n, means=self.means, weights=self.weights, seed=rng
            )
        raise InvalidParameter(f"unknown gap model {self.kind!r}")


@dataclass(frozen=True)
class McConfig:
    """One scenario of a simulation study."""

    theta0: float
    sigma2: float = 1.0
    n_obs: int = 100
    replications: int = 200
    bootstrap_b: int = 0
    gap_model: GapModel = GapModel.shifted_exp()
    innovation: InnovationDist = InnovationDist.gaussian()
    master_seed: int = 0
    thread_count: int = 1
    shared_grid: bool = False
    max_failure_share: float = 0.05

    def __post_init__(self):
        if self.replications < 2:
            raise InvalidParameter(
                f"need at least 2 replications, got {self.replications!r}"
            )
        if self.n_obs < 3:
            raise InvalidParameter(f"need n_obs >= 3, got {self.n_obs!r}")
        if self.thread_count < 1:
            raise InvalidParameter(
                f"thread count must be >= 1, got {self.thread_count!r}"
            )
        if self.bootstrap_b < 0:
            raise InvalidParameter(f"bootstrap_b must be >= 0, got {self.bootstrap_b!r}")


@dataclass(frozen=True)
class McReport:
    """Study measures for one scenario.

    mean_se averages the per-replicate reported standard errors while
    empirical_se is the standard deviation of the estimates themselves;
    agreement between the two is the point of the exercise.  rmse combines
    mean_se with bias, cv is mean_se over the absolute mean estimate, and
    mce = empirical_se / sqrt(replications) bounds the Monte Carlo noise
    in mean_estimate.
    """

    theta0: float
    n_obs: int
    replications: int
    mean_estimate: float
    mean_se: float
    empirical_se: float
    bias: float
    rmse: float
    cv: float
    mce: float
    n_failed: int
    n_se_missing: int
    estimates: np.ndarray = None
    ses: np.ndarray = None

    def to_dict(self):
        def _f(v):
            return None if (isinstance(v, float) and math.isnan(v)) else float(v)

        return {
            "theta0": float(self.theta0),
            "n_obs": int(self.n_obs),
            "replications": int(self.replications),
            "mean_estimate": float(self.mean_estimate),
            "mean_se": _f(self.mean_se),
            "empirical_se": float(self.empirical_se),
            "bias": float(self.bias),
            "rmse": _f(self.rmse),
            "cv": _f(self.cv),
            "mce": float(self.mce),
            "n_failed": int(self.n_failed),
            "n_se_missing": int(self.n_se_missing),
        }


def performance_measures(estimates, ses, theta0, n_obs=0, n_failed=0):
    """Reduce replicate estimates and standard errors to study measures.

    Estimates enter the mean and empirical spread; standard errors may
    contain NaN (unavailable for a replicate) and are averaged over the
    available ones, with the shortfall reported rather than imputed.
    """
    estimates = np.asarray(estimates, dtype=float)
    ses = np.asarray(ses, dtype=float)
    if estimates.ndim != 1 or estimates.shape != ses.shape:
        raise InvalidParameter("estimates and ses must be equal-length vectors")
    m = estimates.shape[0]
    if m < 2:
        raise InvalidParameter(f"need at least 2 replicates, got {m}")
    mean_est = float(estimates.mean())
    se_ok = ses[~np.isnan(ses)]
    mean_se = float(se_ok.mean()) if se_ok.size else math.nan
    emp_se = float(estimates.std(ddof=1))
    bias = mean_est - theta0
    rmse = math.sqrt(mean_se**2 + bias**2) if not math.isnan(mean_se) else math.nan
    if mean_est == 0.0 or math.isnan(mean_se):
        cv = math.nan
    else:
        cv = mean_se / abs(mean_est)
    return McReport(
        theta0=float(theta0),
        n_obs=int(n_obs),
        replications=m,
        mean_estimate=mean_est,
        mean_se=mean_se,
        empirical_se=emp_se,
        bias=float(bias),
        rmse=rmse,
        cv=cv,
        mce=emp_se / math.sqrt(m),
        n_failed=int(n_failed),
        n_se_missing=int(m - se_ok.size),
        estimates=estimates,
        ses=ses,
    )


def _simulate_replicate(config, shared, m):
    rng = stream(config.master_seed, _REPLICATE, m)
    grid = shared if shared is not None else config.gap_model.sample(config.n_obs, rng)
    params = ImaParams(theta=config.theta0, sigma2=config.sigma2, mu=0.0)
    return simulate(params, grid, dist=config.innovation, seed=rng)


def _run_replicates(config, worker):
    """Run worker(m) for every replicate, in threads when asked.

    Results land in a list indexed by replicate, so the reduction order
    never depends on scheduling.
    """
    m = config.replications
    results = [None] * m
    if config.thread_count == 1:
        for i in range(m):
            results[i] = worker(i)
    else:
        with ThreadPoolExecutor(max_workers=config.thread_count) as pool:
            for i, out in enumerate(pool.map(worker, range(m))):
                results[i] = out
    return results


def _collect(config, results):
    estimates = []
    ses = []
    failed = 0
    for out in results:
        if out is None:
            failed += 1
        else:
            estimates.append(out[0])
            ses.append(out[1])
    if failed > config.max_failure_share * config.replications:
        raise McUnstable(
            f"{failed} of {config.replications} replicates failed"
        )
    return performance_measures(
        np.array(estimates), np.array(ses), config.theta0,
        n_obs=config.n_obs, n_failed=failed,
    )


def _shared_grid(config):
    if not config.shared_grid:
        return None
    return config.gap_model.sample(
        config.n_obs, stream(config.master_seed, _SHARED_GRID)
    )


def run_mc_mle(config):
    """Replicate the simulate-and-fit loop and summarize the estimates.

    A fit that lands on the theta boundary still contributes its estimate,
    but its curvature-based standard error is treated as missing: the
    log-likelihood is not twice differentiable at theta = 0 under
    fractional gaps, so the quadratic approximation there reports noise,
    not precision.
    """
    shared = _shared_grid(config)

    def worker(m):
        try:
            series = _simulate_replicate(config, shared, m)
            fit = fit_mle(series, mu=0.0)
            se = math.nan if fit.boundary_hit else fit.se_theta
            return fit.theta_hat, se
        except ImaError:
            return None

    return _collect(config, _run_replicates(config, worker))


def run_mc_bootstrap(config):
    """Replicate the simulate-bootstrap loop and summarize its estimates.

    Each replicate contributes its bootstrap mean and bootstrap standard
    error, so mean_se averages the bootstrap standard errors across
    replicates.
    """
    if config.bootstrap_b < 2:
        raise InvalidParameter(
            f"bootstrap_b must be >= 2 for a bootstrap study, got {config.bootstrap_b!r}"
        )
    shared = _shared_grid(config)

    def worker(m):
        try:
            series = _simulate_replicate(config, shared, m)
            boot = bootstrap_estimate(
                series,
                b=config.bootstrap_b,
                seed=child_seed(config.master_seed, _BOOTSTRAP, m),
                mu=0.0,
                keep_replicates=False,
            )
            return boot.theta_b, boot.se_theta_b
        except ImaError:
            return None

    return _collect(config, _run_replicates(config, worker))


def run_scenario(config):
    """Dispatch on bootstrap_b: 0 runs the plain MLE study."""
    if config.bootstrap_b > 0:
        return run_mc_bootstrap(config)
    return run_mc_mle(config)


_CONFIG_KEYS = {
    "theta0",
    "n_obs",
    "sigma2",
    "replications",
    "bootstrap",
    "gap_model",
    "innovation",
    "seed",
    "shared_grid",
}


def parse_study_config(text):
    """Parse a key=value study file into a list of scenario configs.

    theta0 and n_obs may be comma-separated lists; the study runs their
    cross product in file order (n_obs outer, theta0 inner).  Lines
    starting with # and blank lines are skipped.  Unknown or malformed
    keys raise InvalidParameter naming the key.
    """
    values = {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise InvalidParameter(f"line {ln}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip().lower()
        val = val.strip()
        if key not in _CONFIG_KEYS:
            raise InvalidParameter(f"line {ln}: unknown config key {key!r}")
        if key in values:
            raise InvalidParameter(f"line {ln}: duplicate config key {key!r}")
        values[key] = val

    def _floats(key, default):
        if key not in values:
            return default
        try:
            return [float(v) for v in values[key].split(",")]
        except ValueError:
            raise InvalidParameter(
                f"config key {key!r}: expected numbers, got {values[key]!r}"
            ) from None

    def _int(key, default):
        if key not in values:
            return default
        try:
            return int(values[key])
        except ValueError:
            raise InvalidParameter(
                f"config key {key!r}: expected an integer, got {values[key]!r}"
            ) from None

    thetas = _floats("theta0", None)
    if thetas is None:
        raise InvalidParameter("config is missing required key 'theta0'")
    n_obs_list = [int(v) for v in _floats("n_obs", [100.0])]
    sigma2 = _floats("sigma2", [1.0])
    if len(sigma2) != 1:
        raise InvalidParameter("config key 'sigma2' must be a single number")
    gap_model = GapModel.parse(values.get("gap_model", "shifted_exp(1.0)"))
    innovation = InnovationDist.parse(values.get("innovation", "gaussian"))
    shared = values.get("shared_grid", "false").lower()
    if shared not in ("true", "false"):
        raise InvalidParameter(
            f"config key 'shared_grid' must be true or false, got {shared!r}"
        )
    configs = []
    for n in n_obs_list:
        for theta in thetas:
            configs.append(
                McConfig(
                    theta0=theta,
                    sigma2=sigma2[0],
                    n_obs=n,
                    replications=_int("replications", 200),
                    bootstrap_b=_int("bootstrap", 0),
                    gap_model=gap_model,
                    innovation=innovation,
                    master_seed=_int("seed", 0),
                    shared_grid=shared == "true",
                )
            )
    return configs


def run_study(configs, thread_count=1):
    """Run each scenario in order with a common thread count."""
    reports = []
    for config in configs:
        reports.append(run_scenario(replace(config, thread_count=thread_count)))
    return reports
