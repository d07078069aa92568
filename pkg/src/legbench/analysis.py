"""Tracking metrics and the deviation / mass-uncertainty sweeps."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np
from scipy.spatial import cKDTree

from .sim import DEVIATIONS, AtjSpec, RunLog, Scenario, SimConfig, SmcSpec, TjSpec, run_closed_loop
from .trajectory import SwingPathSpec, swing_path_eval

DEFAULT_PCTS = (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)


class EmptyWindow(ValueError):
    pass


@dataclass(frozen=True)
class MetricsRecord:
    rmse: np.ndarray
    energy: float
    overshoot: float
    diverged: bool = False


def rmse(log: RunLog, t_i: float | None = None, t_f: float | None = None) -> np.ndarray:
    """Per-axis RMS of ``x_d - x`` over ``[t_i, t_f]`` (trapezoidal rule).

    The window defaults to the whole log. Its ends are snapped to the log
    grid.
    """
    t = log.t
    if len(t) == 0:
        raise EmptyWindow("log is empty")
    t_i = t[0] if t_i is None else t_i
    t_f = t[-1] if t_f is None else t_f
    tol = 1e-9 * max(1.0, abs(t[-1]))
    if not t_f > t_i or t_i < t[0] - tol or t_f > t[-1] + tol:
        raise EmptyWindow(f"window [{t_i}, {t_f}] not inside log span [{t[0]}, {t[-1]}]")
    mask = (t >= t_i - tol) & (t <= t_f + tol)
    if mask.sum() < 2:
        raise EmptyWindow(f"window [{t_i}, {t_f}] holds fewer than two samples")
    e = log.error[mask]
    tw = t[mask]
    return np.sqrt(np.trapezoid(e * e, tw, axis=0) / (tw[-1] - tw[0]))


def control_energy(log: RunLog) -> float:
    """Integral of ``|tau . qd|`` over the run [J]."""
    if len(log.t) == 0:
        raise EmptyWindow("log is empty")
    if len(log.t) == 1:
        return 0.0
    power = np.abs(np.einsum("ij,ij->i", log.tau, log.qd))
    return float(np.trapezoid(power, log.t))


def overshoot(log: RunLog, path: SwingPathSpec) -> float:
    """Largest distance from a logged foot position to the desired geometric path.

    The path is sampled at ten times the log resolution.
    """
    if len(log.t) == 0:
        raise EmptyWindow("log is empty")
    n = max(2, 10 * (len(log.t) - 1) + 1)
    ts = np.linspace(0.0, path.profile.t_f, n)
    curve = np.array([swing_path_eval(path, float(t)).pos for t in ts])
    dist, _ = cKDTree(curve).query(log.x)
    return float(dist.max())


def evaluate(log: RunLog, path: SwingPathSpec, t_i: float = 0.0, t_f: float | None = None) -> MetricsRecord:
    if log.diverged:
        return MetricsRecord(rmse=np.full(3, np.nan), energy=np.nan, overshoot=np.nan, diverged=True)
    return MetricsRecord(
        rmse=rmse(log, t_i, t_f),
        energy=control_energy(log),
        overshoot=overshoot(log, path),
    )


@dataclass(frozen=True)
class SweepCell:
    controller: str
    sweep_kind: str
    sweep_value: float | tuple
    metrics: MetricsRecord
    scenario: Scenario


@dataclass(frozen=True)
class SweepResult:
    kind: str
    cells: list[SweepCell]

    def row(self, controller: str) -> list[SweepCell]:
        return [c for c in self.cells if c.controller == controller]

    def rmse_table(self, controller: str) -> np.ndarray:
        return np.array([c.metrics.rmse for c in self.row(controller)])


def default_controllers(base: Scenario):
    """One spec per controller kind, reusing the base scenario's if it matches."""
    specs = {"SMC": SmcSpec(), "TJ": TjSpec(), "ATJ": AtjSpec()}
    specs[base.controller.name] = base.controller
    return [specs["SMC"], specs["TJ"], specs["ATJ"]]


def _run_cell(args):
    scenario, cfg = args
    return evaluate(run_closed_loop(scenario, cfg), scenario.path)


def _workers(max_workers: int | None) -> int:
    if max_workers is not None:
        return max(1, max_workers)
    env = os.environ.get("LEGBENCH_THREADS")
    if env:
        return max(1, int(env))
    return 1


def run_cells(scenarios: list[Scenario], cfg: SimConfig, max_workers: int | None = None) -> list[MetricsRecord]:
    """Evaluate scenarios, optionally in worker processes; output keeps input order."""
    jobs = [(s, cfg) for s in scenarios]
    n = min(_workers(max_workers), len(jobs))
    if n <= 1:
        return [_run_cell(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_run_cell, jobs))


def deviation_sweep(
    base: Scenario,
    cfg: SimConfig = SimConfig(),
    deviations=DEVIATIONS,
    controllers=None,
    max_workers: int | None = None,
) -> SweepResult:
    """Every controller against every initial deviation (rows 0..5 by default)."""
    controllers = controllers or default_controllers(base)
    scenarios, keys = [], []
    for ctrl in controllers:
        for i, dev in enumerate(deviations):
            scenarios.append(replace(base, controller=ctrl, deviation=dev))
            keys.append((ctrl.name, i))
    metrics = run_cells(scenarios, cfg, max_workers)
    cells = [
        SweepCell(name, "deviation", i, m, s) for (name, i), m, s in zip(keys, metrics, scenarios)
    ]
    return SweepResult("deviation", cells)


def uncertainty_sweep(
    base: Scenario,
    cfg: SimConfig = SimConfig(),
    pcts=DEFAULT_PCTS,
    controllers=None,
    max_workers: int | None = None,
) -> SweepResult:
    """Every controller against every controller-model mass perturbation."""
    controllers = controllers or default_controllers(base)
    scenarios, keys = [], []
    for ctrl in controllers:
        for pct in pcts:
            scenarios.append(replace(base, controller=ctrl, uncertainty_pct=float(pct)))
            keys.append((ctrl.name, float(pct)))
    metrics = run_cells(scenarios, cfg, max_workers)
    cells = [
        SweepCell(name, "uncertainty", pct, m, s) for (name, pct), m, s in zip(keys, metrics, scenarios)
    ]
    return SweepResult("uncertainty", cells)
