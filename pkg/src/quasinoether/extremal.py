"""Numerical Pontryagin extremals and first-integral drift.

Extremals are integrated with fixed-step classical RK4 on the coupled
state/costate system, with the control eliminated through the closed-form
stationarity solution.  Ensembles are integrated as one vectorised batch.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import expr as ex
from .model import Problem, adjoint_rhs, solve_control, stationarity
from .noether import FirstIntegral

BLOWUP = 1e9


class BlowUpError(RuntimeError):
    def __init__(self, time: float):
        self.time = time
        super().__init__(f"integration left the finite region (|value| > {BLOWUP:g}) at t = {time:g}")


class EmptyEnsemble(ValueError):
    pass


def _compile(exprs: Sequence, args: Sequence[ex.Symbol]):
    """Vectorised callable ``f(*args) -> tuple`` for a list of expressions."""
    arglist = ", ".join(a.name for a in args)
    body = ", ".join(ex.to_python(e) for e in exprs)
    src = f"def _f({arglist}):\n    return ({body},)\n"
    namespace = {"_exp": np.exp}
    exec(compile(src, "<quasinoether-compiled>", "exec"), namespace)
    return namespace["_f"]


@dataclass
class Trajectory:
    problem: Problem
    grid: np.ndarray
    states: np.ndarray
    costates: np.ndarray
    controls: np.ndarray
    psi0: float

    def env(self) -> dict:
        out = {ex.T: self.grid, ex.PSI0: np.full_like(self.grid, self.psi0)}
        for i in range(self.problem.n):
            out[ex.x(i + 1)] = self.states[:, i]
            out[ex.psi(i + 1)] = self.costates[:, i]
        for j in range(self.problem.m):
            out[ex.u(j + 1)] = self.controls[:, j]
        return out

    def evaluate(self, exprs: Sequence) -> np.ndarray:
        """Evaluate expressions in (t, x, u, psi0, psi) at every sample."""
        p = self.problem
        args = (ex.T, *p.states, *p.controls, ex.PSI0, *p.costates)
        fn = _compile(exprs, args)
        env = self.env()
        with np.errstate(all="ignore"):
            vals = fn(*(env[a] for a in args))
        return np.array([np.broadcast_to(np.asarray(v, dtype=float), self.grid.shape) for v in vals])

    def stationarity_residual(self) -> float:
        res = self.evaluate(stationarity(self.problem))
        return float(np.max(np.abs(res))) if res.size else 0.0

    def to_csv(self, path, reports: Sequence["DriftReport"] = ()) -> None:
        write_csv(self, path, reports)


@dataclass
class DriftReport:
    integral: FirstIntegral
    reference: float
    max_abs_drift: float
    relative_drift: float
    trials: int = 1
    blowups: int = 0
    worst_trial: int = 0
    blowup_times: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "integral": str(self.integral.value),
            "reference": self.reference,
            "max_abs_drift": self.max_abs_drift,
            "relative_drift": self.relative_drift,
            "trials": self.trials,
            "blowups": self.blowups,
            "worst_trial": self.worst_trial,
        }


def _grid(p: Problem, step: float):
    if not step > 0:
        raise ValueError("step must be positive")
    a, b = p.horizon
    nsteps = max(1, int(round((b - a) / step)))
    return np.linspace(a, b, nsteps + 1)


def _integrate_batch(p: Problem, x0: np.ndarray, psi_a: np.ndarray, psi0: float, step: float):
    """RK4 over a batch; arrays are (trials, n).  Returns grid and sample arrays."""
    if not psi0 < 0:
        raise ValueError("closed-form controls need psi0 < 0")
    ustar = solve_control(p)
    sub = dict(zip(p.controls, ustar))
    fdyn = [ex.substitute(e, sub) for e in p.dynamics]
    fadj = [ex.substitute(e, sub) for e in adjoint_rhs(p)]
    args = (ex.T, *p.states, ex.PSI0, *p.costates)
    rhs = _compile(fdyn + fadj, args)
    ctrl = _compile(list(ustar), args)

    grid = _grid(p, step)
    n = p.n
    k = x0.shape[0]
    y = np.concatenate([x0, psi_a], axis=1).T.astype(float)  # (2n, k)
    psi0_arr = np.full(k, float(psi0))
    out = np.empty((len(grid), 2 * n, k))
    out[0] = y

    def f(t, y):
        vals = rhs(t, *y[:n], psi0_arr, *y[n:])
        return np.array([np.broadcast_to(v, (k,)) for v in vals], dtype=float)

    with np.errstate(all="ignore"):
        for i in range(len(grid) - 1):
            t = grid[i]
            h = grid[i + 1] - t
            k1 = f(t, y)
            k2 = f(t + h / 2, y + h / 2 * k1)
            k3 = f(t + h / 2, y + h / 2 * k2)
            k4 = f(t + h, y + h * k3)
            y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            out[i + 1] = y
        controls = np.empty((len(grid), p.m, k))
        for i, t in enumerate(grid):
            vals = ctrl(t, *out[i, :n], psi0_arr, *out[i, n:])
            controls[i] = np.array([np.broadcast_to(v, (k,)) for v in vals])

    bad = ~np.isfinite(out) | (np.abs(out) > BLOWUP)
    bad_any = bad.any(axis=1)  # (samples, k)
    first_bad = [int(np.argmax(bad_any[:, j])) if bad_any[:, j].any() else -1 for j in range(k)]
    states = np.transpose(out[:, :n, :], (2, 0, 1))
    costates = np.transpose(out[:, n:, :], (2, 0, 1))
    controls = np.transpose(controls, (2, 0, 1))
    return grid, states, costates, controls, first_bad


def integrate_extremal(p: Problem, x0, psi_a, psi0: float = -0.5, step: float = 1e-3) -> Trajectory:
    """Integrate one extremal from (x0, psi(a)) over the problem horizon."""
    x0 = np.asarray(x0, dtype=float).reshape(1, p.n)
    psi_a = np.asarray(psi_a, dtype=float).reshape(1, p.n)
    if psi0 == 0 and not psi_a.any():
        raise ValueError("(psi0, psi(a)) must not both vanish")
    grid, states, costates, controls, first_bad = _integrate_batch(p, x0, psi_a, psi0, step)
    if first_bad[0] >= 0:
        raise BlowUpError(float(grid[first_bad[0]]))
    return Trajectory(p, grid, states[0], costates[0], controls[0], float(psi0))


def drift(traj: Trajectory, c: FirstIntegral) -> DriftReport:
    """Maximum deviation of C along the trajectory from its value at t = a."""
    for v in c.value.free_symbols():
        if not traj.problem.admits(v) and v != ex.PSI0:
            raise ex.EvaluationError(f"integral references {v}, which the problem does not define")
    values = traj.evaluate([c.value])[0]
    ref = float(values[0])
    if not np.isfinite(ref):
        raise ex.EvaluationError("first integral is not finite at t = a")
    dev = float(np.max(np.abs(values - ref)))
    return DriftReport(c, ref, dev, dev / max(1.0, abs(ref)))


def sample_initial_conditions(n: int, trials: int, seed: int):
    rng = np.random.default_rng(seed)
    x0 = rng.uniform(-1.0, 1.0, size=(trials, n))
    psi_a = rng.uniform(-1.0, 1.0, size=(trials, n))
    return x0, psi_a


def ensemble_trajectories(p: Problem, trials: int, seed: int, step: float = 1e-3, psi0: float = -0.5):
    """Seeded ensemble; returns (trajectories, blow-up times keyed by trial)."""
    if trials < 1:
        raise EmptyEnsemble("ensemble needs at least one trial")
    x0, psi_a = sample_initial_conditions(p.n, trials, seed)
    grid, states, costates, controls, first_bad = _integrate_batch(p, x0, psi_a, psi0, step)
    trajs = {}
    blowups = {}
    for j in range(trials):
        if first_bad[j] >= 0:
            blowups[j] = float(grid[first_bad[j]])
            continue
        trajs[j] = Trajectory(p, grid, states[j], costates[j], controls[j], float(psi0))
    return trajs, blowups


def ensemble_drift(p: Problem, c: FirstIntegral, trials: int = 20, seed: int = 42, step: float = 1e-3,
                   psi0: float = -0.5) -> DriftReport:
    """Worst drift over seeded random extremals (x0, psi(a) uniform in [-1, 1])."""
    trajs, blowups = ensemble_trajectories(p, trials, seed, step, psi0)
    if not trajs:
        raise BlowUpError(min(blowups.values()))
    worst = None
    for j, traj in trajs.items():
        rep = drift(traj, c)
        rep.worst_trial = j
        if worst is None or rep.relative_drift > worst.relative_drift:
            worst = rep
    worst.trials = trials
    worst.blowups = len(blowups)
    worst.blowup_times = [blowups[j] for j in sorted(blowups)]
    return worst


def write_csv(traj: Trajectory, path, reports: Sequence[DriftReport] = ()) -> None:
    """Header t, x1..xn, psi1..psin, u1..um; drift reports as ``#`` lines."""
    p = traj.problem
    header = ["t"] + [f"x{i}" for i in range(1, p.n + 1)] + [f"psi{i}" for i in range(1, p.n + 1)]
    header += [f"u{j}" for j in range(1, p.m + 1)]
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for i, t in enumerate(traj.grid):
            row = [t, *traj.states[i], *traj.costates[i], *traj.controls[i]]
            w.writerow([repr(float(v)) for v in row])
        fh.write(f"# psi0={traj.psi0!r}\n")
        for rep in reports:
            fh.write(
                f"# integral={rep.integral.value} reference={rep.reference!r} "
                f"max_abs_drift={rep.max_abs_drift!r} relative_drift={rep.relative_drift!r}\n"
            )
