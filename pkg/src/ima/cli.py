"""Command line interface.

Subcommands: simulate, fit, predict, bootstrap, diagnose, mc.  Exit codes:
0 success, 2 usage or input parse error, 3 file I/O error, 4 numerical or
statistical failure.  The default thread count for mc comes from the
IMA_THREADS environment variable when set.
"""

import argparse
import importlib.resources
import os
import sys

from . import __version__
from .bootstrap import bootstrap_estimate
from .core import (
    ImaParams,
    InnovationDist,
    gap_sequence,
    regular_grid,
    sample_gaps_exp_mixture,
    sample_gaps_shifted_exp,
    simulate,
)
from .diagnostics import diagnostics_report
from .errors import (
    CsvParseError,
    ImaError,
    InvalidGap,
    InvalidInput,
    InvalidParameter,
    InvalidTimes,
)
from .estimate import fit_mle
from .io import (
    bootstrap_to_dict,
    fit_to_dict,
    mc_reports_to_csv_text,
    prediction_to_dict,
    read_series_csv,
    read_times_csv,
    write_diagnostics_outputs,
    write_json,
    write_mc_outputs,
    write_prediction_csv,
    write_series_csv,
)
from .mc import parse_study_config, run_study
from .predict import innovations_predict

_USAGE_ERRORS = (CsvParseError, InvalidParameter, InvalidTimes, InvalidGap, InvalidInput)


def _default_threads():
    raw = os.environ.get("IMA_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ima",
        description="Moving-average modeling for irregularly spaced time series.",
    )
    parser.add_argument("--version", action="version", version=f"ima {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="draw a series and write it as CSV")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--mu", type=float, default=0.0)
    grid = p.add_mutually_exclusive_group(required=True)
    grid.add_argument("--regular", type=int, metavar="N")
    grid.add_argument(
        "--shifted-exp", nargs=2, type=float, metavar=("N", "RATE")
    )
    grid.add_argument(
        "--exp-mixture",
        nargs=5,
        type=float,
        metavar=("N", "MEAN1", "MEAN2", "W1", "W2"),
    )
    grid.add_argument("--times", metavar="CSV")
    p.add_argument("--dist", default="gaussian", help="gaussian, student_t(NU), ged(NU)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, metavar="CSV")

    p = sub.add_parser("fit", help="maximum likelihood fit of a series")
    p.add_argument("input", metavar="CSV")
    p.add_argument("--zero-mean", action="store_true", help="fix the mean at 0")
    p.add_argument("--json", metavar="FILE", help="also write the fit as JSON")

    p = sub.add_parser("predict", help="one-step predictions for a series")
    p.add_argument("input", metavar="CSV")
    p.add_argument("--theta", type=float, help="use these parameters instead of fitting")
    p.add_argument("--sigma2", type=float)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--zero-mean", action="store_true")
    p.add_argument("--out", required=True, metavar="CSV")
    p.add_argument("--json", metavar="FILE")

    p = sub.add_parser("bootstrap", help="residual bootstrap of a fit")
    p.add_argument("input", metavar="CSV")
    p.add_argument("-B", "--replicates", type=int, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--zero-mean", action="store_true")
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--json", metavar="FILE")

    p = sub.add_parser("diagnose", help="residual diagnostics for a fit")
    p.add_argument("input", metavar="CSV")
    p.add_argument("--lags", type=int, default=10)
    p.add_argument("--zero-mean", action="store_true")
    p.add_argument("--out", required=True, metavar="DIR")

    p = sub.add_parser("mc", help="run a simulation study from a config file")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("config", nargs="?", metavar="CFG")
    src.add_argument("--bundled", metavar="NAME", help="a packaged study config")
    p.add_argument("--out", required=True, metavar="DIR")
    p.add_argument("--threads", type=int, default=None)

    return parser


def _resolve_bundled(name):
    base = name if name.endswith(".cfg") else name + ".cfg"
    ref = importlib.resources.files("ima").joinpath("configs", base)
    if not ref.is_file():
        listing = sorted(
            r.name[: -len(".cfg")]
            for r in importlib.resources.files("ima").joinpath("configs").iterdir()
            if r.name.endswith(".cfg")
        )
        raise InvalidParameter(
            f"no bundled config {name!r}; available: {', '.join(listing)}"
        )
    return ref.read_text(encoding="utf-8")


def _simulate_grid(args):
    if args.regular is not None:
        return regular_grid(args.regular)
    if args.shifted_exp is not None:
        n, rate = args.shifted_exp
        return sample_gaps_shifted_exp(int(n), lam=rate, seed=args.seed + 1)
    if args.exp_mixture is not None:
        n, m1, m2, w1, w2 = args.exp_mixture
        return sample_gaps_exp_mixture(
            int(n), means=(m1, m2), weights=(w1, w2), seed=args.seed + 1
        )
    times = read_times_csv(args.times)
    return gap_sequence(times)


def cmd_simulate(args):
    grid = _simulate_grid(args)
    params = ImaParams(theta=args.theta, sigma2=args.sigma2, mu=args.mu)
    dist = InnovationDist.parse(args.dist)
    series = simulate(params, grid, dist=dist, seed=args.seed)
    write_series_csv(args.out, series)
    if grid.scale != 1.0:
        print(
            f"note: times rescaled by 1/{grid.scale!r} so the smallest gap is 1",
            file=sys.stderr,
        )
    print(f"wrote {series.n} observations to {args.out}")
    return 0


def _print_fit(fit):
    def s(v):
        return "unavailable" if v != v else f"{v:.6g}"

    print(f"theta_hat={fit.theta_hat:.6g}  se_theta={s(fit.se_theta)}")
    print(f"sigma2_hat={fit.sigma2_hat:.6g}  se_sigma2={s(fit.se_sigma2)}")
    print(
        f"loglik={fit.loglik:.6g}  n={fit.n_obs}  converged={fit.converged}"
        + ("  boundary" if fit.boundary_hit else "")
    )


def cmd_fit(args):
    series = read_series_csv(args.input)
    fit = fit_mle(series, mu=0.0 if args.zero_mean else None)
    _print_fit(fit)
    if args.json:
        write_json(args.json, fit_to_dict(fit, series))
    return 0


def cmd_predict(args):
    series = read_series_csv(args.input)
    if args.theta is not None:
        if args.sigma2 is None:
            raise InvalidParameter("--theta requires --sigma2")
        params = ImaParams(theta=args.theta, sigma2=args.sigma2, mu=args.mu)
    else:
        fit = fit_mle(series, mu=0.0 if args.zero_mean else None, compute_se=False)
        params = fit.params()
    pred = innovations_predict(params, series)
    write_prediction_csv(args.out, series, pred)
    if args.json:
        write_json(args.json, prediction_to_dict(series, pred))
    print(f"wrote predictions for {series.n} observations to {args.out}")
    return 0


def cmd_bootstrap(args):
    series = read_series_csv(args.input)
    result = bootstrap_estimate(
        series,
        b=args.replicates,
        seed=args.seed,
        mu=0.0 if args.zero_mean else None,
        levels=(args.level,),
    )
    _print_fit(result.fit)
    print(
        f"bootstrap: theta_b={result.theta_b:.6g}  se_theta_b={result.se_theta_b:.6g}"
        f"  sigma2_b={result.sigma2_b:.6g}  se_sigma2_b={result.se_sigma2_b:.6g}"
    )
    lo, hi = result.theta_intervals[args.level]
    print(f"theta {args.level:.0%} interval: [{lo:.6g}, {hi:.6g}]")
    if args.json:
        write_json(args.json, bootstrap_to_dict(result, series))
    return 0


def cmd_diagnose(args):
    series = read_series_csv(args.input)
    fit = fit_mle(series, mu=0.0 if args.zero_mean else None)
    report = diagnostics_report(series, fit, lags=args.lags)
    write_diagnostics_outputs(args.out, report)
    reject = report.lb_pvalues[-1] < 0.05
    print(
        f"ljung-box at lag {report.lb_lags[-1]}: "
        f"stat={report.lb_stats[-1]:.4g} p={report.lb_pvalues[-1]:.4g}"
        + ("  (residual correlation detected)" if reject else "")
    )
    print(f"wrote diagnostics to {args.out}")
    return 0


def cmd_mc(args):
    if args.bundled:
        text = _resolve_bundled(args.bundled)
    else:
        with open(args.config, "r", encoding="utf-8") as fh:
            text = fh.read()
    configs = parse_study_config(text)
    threads = args.threads if args.threads is not None else _default_threads()
    if threads < 1:
        raise InvalidParameter(f"--threads must be >= 1, got {threads}")
    reports = run_study(configs, thread_count=threads)
    csv_path = write_mc_outputs(
        args.out,
        reports,
        meta={
            "threads": threads,
            "scenarios": len(reports),
            "gap_model": configs[0].gap_model.label(),
            "innovation": configs[0].innovation.label(),
            "replications": configs[0].replications,
            "bootstrap_b": configs[0].bootstrap_b,
            "seed": configs[0].master_seed,
        },
    )
    sys.stdout.write(mc_reports_to_csv_text(reports))
    print(f"wrote {csv_path}")
    return 0


_COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "predict": cmd_predict,
    "bootstrap": cmd_bootstrap,
    "diagnose": cmd_diagnose,
    "mc": cmd_mc,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except _USAGE_ERRORS as exc:
        print(f"ima {args.command}: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ima {args.command}: {exc}", file=sys.stderr)
        return 3
    except ImaError as exc:
        print(f"ima {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
