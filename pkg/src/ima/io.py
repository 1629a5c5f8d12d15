"""CSV and JSON serialization.

Time series travel as two-column CSV with header ``time,value``, UTF-8,
dot decimal separator.  Floats are written with repr so files round-trip
exactly; study tables use a fixed format since they are meant for eyes.
"""

import csv
import io as _io
import json
import math
import os

import numpy as np

from .core import TimeSeries, gap_sequence
from .errors import CsvParseError


def _fmt(v):
    return repr(float(v))


def read_series_csv(path):
    """Read a time series from a ``time,value`` CSV.

    Raises CsvParseError naming the line for a bad header, malformed
    numbers, or times out of order.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return _parse_series(fh)


def _parse_series(fh):
    reader = csv.reader(fh)
    try:
        header = next(reader)
    except StopIteration:
        raise CsvParseError("empty file; expected a time,value header", line=1) from None
    if [h.strip().lower() for h in header] != ["time", "value"]:
        raise CsvParseError(
            f"expected header time,value, got {','.join(header)!r}", line=1
        )
    times = []
    values = []
    for ln, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise CsvParseError(f"line {ln}: expected 2 columns, got {len(row)}", line=ln)
        try:
            t = float(row[0])
            v = float(row[1])
        except ValueError:
            raise CsvParseError(
                f"line {ln}: could not parse {row!r} as numbers", line=ln
            ) from None
        if times and not t > times[-1]:
            raise CsvParseError(
                f"line {ln}: time {row[0]} does not increase past {times[-1]!r}",
                line=ln,
            )
        times.append(t)
        values.append(v)
    if not times:
        raise CsvParseError("no data rows", line=2)
    return TimeSeries(grid=gap_sequence(np.array(times)), values=np.array(values))


def write_series_csv(path, series):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "value"])
        for t, v in zip(series.grid.times, series.values):
            writer.writerow([_fmt(t), _fmt(v)])


def read_times_csv(path):
    """Read observation times from a one-column ``time`` CSV.

    A ``time,value`` file is accepted too; the values are ignored.
    """
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvParseError("empty file; expected a time header", line=1) from None
        cols = [h.strip().lower() for h in header]
        if cols not in (["time"], ["time", "value"]):
            raise CsvParseError(
                f"expected header time or time,value, got {','.join(header)!r}", line=1
            )
        times = []
        for ln, row in enumerate(reader, start=2):
            if not row or not row[0].strip():
                continue
            try:
                times.append(float(row[0]))
            except ValueError:
                raise CsvParseError(
                    f"line {ln}: could not parse {row[0]!r} as a number", line=ln
                ) from None
    if not times:
        raise CsvParseError("no data rows", line=2)
    return np.array(times)


def write_prediction_csv(path, series, pred):
    """Aligned per-observation prediction table.

    Columns: time, x, xhat, mse, innovation, std_innovation.
    """
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["time", "x", "xhat", "mse", "innovation", "std_innovation"])
        rows = zip(
            series.grid.times,
            series.values,
            pred.predictors,
            pred.mse,
            pred.innovations,
            pred.standardized,
        )
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def prediction_to_dict(series, pred):
    return {
        "grid": series.grid.to_dict(),
        "time": [float(t) for t in series.grid.times],
        "x": [float(v) for v in series.values],
        "xhat": [float(v) for v in pred.predictors],
        "mse": [float(v) for v in pred.mse],
        "innovation": [float(v) for v in pred.innovations],
        "std_innovation": [float(v) for v in pred.standardized],
    }


def fit_to_dict(fit, series=None):
    out = fit.to_dict()
    if series is not None:
        out["grid"] = series.grid.to_dict()
    return out


def bootstrap_to_dict(result, series=None):
    out = result.to_dict()
    if series is not None:
        out["grid"] = series.grid.to_dict()
    return out


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


MC_CSV_HEADER = [
    "n",
    "theta0",
    "mean_estimate",
    "mean_se",
    "empirical_se",
    "bias",
    "rmse",
    "cv",
]


def _cell(v):
    return "" if math.isnan(v) else f"{v:.6f}"


def mc_reports_to_csv_text(reports):
    """Study table, one row per scenario, fixed six-decimal format.

    Unavailable measures (NaN) become empty cells rather than "nan".
    """
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MC_CSV_HEADER)
    for r in reports:
        writer.writerow(
            [
                str(int(r.n_obs)),
                f"{r.theta0:.6f}",
                _cell(r.mean_estimate),
                _cell(r.mean_se),
                _cell(r.empirical_se),
                _cell(r.bias),
                _cell(r.rmse),
                _cell(r.cv),
            ]
        )
    return buf.getvalue()


def write_mc_outputs(out_dir, reports, meta=None):
    """Write scenarios.csv and report.json under out_dir."""
    os.makedirs(out_dir, exist_ok=True)
    csv_path = os.path.join(out_dir, "scenarios.csv")
    with open(csv_path, "w", encoding="utf-8", newline="") as fh:
        fh.write(mc_reports_to_csv_text(reports))
    payload = {"scenarios": [r.to_dict() for r in reports]}
    if meta:
        payload["meta"] = meta
    write_json(os.path.join(out_dir, "report.json"), payload)
    return csv_path


def write_diagnostics_outputs(out_dir, report):
    """Write acf.csv, lb.csv, qq.csv, mse.csv, and report.json."""
    os.makedirs(out_dir, exist_ok=True)

    with open(os.path.join(out_dir, "acf.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag", "acf", "band"])
        for lag, val in zip(report.acf_lags, report.acf_values):
            writer.writerow([int(lag), _fmt(val), _fmt(report.acf_band)])

    with open(os.path.join(out_dir, "lb.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["lag", "stat", "pvalue"])
        for lag, q, p in zip(report.lb_lags, report.lb_stats, report.lb_pvalues):
            writer.writerow([int(lag), _fmt(q), _fmt(p)])

    with open(os.path.join(out_dir, "qq.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theoretical", "empirical", "lower", "upper"])
        qq = report.qq
        for row in zip(qq.theoretical, qq.empirical, qq.lower, qq.upper):
            writer.writerow([_fmt(v) for v in row])

    with open(os.path.join(out_dir, "mse.csv"), "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "mse_ima", "mse_ma"])
        for i, (a, b) in enumerate(zip(report.mse_ima, report.mse_ma), start=1):
            writer.writerow([i, _fmt(a), _fmt(b)])

    write_json(os.path.join(out_dir, "report.json"), report.to_dict())
