"""CSV serialisation of run logs, metrics and sweeps."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .analysis import MetricsRecord, SweepResult
from .sim import RunLog

RUN_HEADER = ["t", "q1", "q2", "q3", "qd1", "qd2", "qd3", "x", "y", "z", "xd", "yd", "zd", "tau1", "tau2", "tau3"]
SMC_EXTRA = ["s1", "s2", "s3"]
ATJ_EXTRA = ["xdc", "ydc", "zdc", "kp", "kd"]
METRICS_HEADER = ["controller", "rmse_x", "rmse_y", "rmse_z", "energy", "overshoot", "diverged"]
SWEEP_HEADER = ["controller", "sweep_kind", "sweep_value", "rmse_x", "rmse_y", "rmse_z", "energy", "diverged"]


def fmt(x) -> str:
    """17 significant digits: enough for an exact float64 round trip."""
    return "%.17g" % float(x)


def write_csv(path: Path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def run_table(log: RunLog) -> tuple[list[str], np.ndarray]:
    cols = [log.t[:, None], log.q, log.qd, log.x, log.xd, log.tau]
    header = list(RUN_HEADER)
    if log.s is not None:
        cols.append(log.s)
        header += SMC_EXTRA
    if log.xdc is not None:
        kp = np.asarray(log.kp, dtype=float)
        kd = np.asarray(log.kd, dtype=float)
        if kp.ndim > 1:
            # per-axis gains: log the mean diagonal entry
            kp, kd = kp.mean(axis=1), kd.mean(axis=1)
        cols += [log.xdc, kp[:, None], kd[:, None]]
        header += ATJ_EXTRA
    return header, np.hstack(cols)


def write_run_csv(path, log: RunLog) -> Path:
    header, table = run_table(log)
    return write_csv(path, header, ([fmt(v) for v in row] for row in table))


def write_metrics_csv(path, records: list[tuple[str, MetricsRecord]]) -> Path:
    rows = [
        [name, *(fmt(v) for v in m.rmse), fmt(m.energy), fmt(m.overshoot), str(int(m.diverged))]
        for name, m in records
    ]
    return write_csv(path, METRICS_HEADER, rows)


def sweep_rows(result: SweepResult) -> list[list[str]]:
    cells = sorted(result.cells, key=lambda c: (c.controller, float(c.sweep_value)))
    return [
        [
            c.controller,
            c.sweep_kind,
            fmt(c.sweep_value),
            *(fmt(v) for v in c.metrics.rmse),
            fmt(c.metrics.energy),
            str(int(c.metrics.diverged)),
        ]
        for c in cells
    ]


def write_sweep_csv(path, result: SweepResult) -> Path:
    return write_csv(path, SWEEP_HEADER, sweep_rows(result))


def read_csv(path) -> tuple[list[str], list[list[str]]]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
