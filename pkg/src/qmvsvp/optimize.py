"""Gamma sweeps, grid + golden-section minimisation, and minima-quality ratios."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import analytic
from .encoding import QuditLayout

DEFAULT_GRID_SIZE = 512
REFINE_TOL = 1e-6
GAMMA_MAX = math.pi

_INV_PHI = (math.sqrt(5) - 1) / 2
_INV_PHI_SQ = (3 - math.sqrt(5)) / 2


@dataclass
class SweepCurve:
    gammas: np.ndarray
    mu: np.ndarray
    mu_a: dict = field(default_factory=dict)
    lattice_id: str | None = None

    def __post_init__(self):
        g = np.asarray(self.gammas)
        if len(g) < 2 or not np.all(np.diff(g) > 0):
            raise ValueError("gamma grid must be strictly increasing with at least two points")
        if any(len(v) != len(g) for v in [self.mu, *self.mu_a.values()]):
            raise ValueError("curve arrays must match the grid length")

    def write_csv(self, path, extra: dict | None = None) -> Path:
        path = Path(path)
        orders = sorted(self.mu_a)
        extra = extra or {}
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gamma", "mu", *[f"mu_A_{A}" for A in orders], *extra])
            for t, g in enumerate(self.gammas):
                w.writerow([repr(float(g)), repr(float(self.mu[t])),
                            *[repr(float(self.mu_a[A][t])) for A in orders],
                            *[repr(float(col[t])) for col in extra.values()]])
        return path


def gamma_grid(grid_size: int = DEFAULT_GRID_SIZE) -> np.ndarray:
    if grid_size < 2:
        raise ValueError("grid_size must be >= 2")
    return np.linspace(0.0, GAMMA_MAX, grid_size)


def sweep_gamma(G, layout: QuditLayout, grid_size: int = DEFAULT_GRID_SIZE, approx_orders=(),
                lattice_id: str | None = None) -> SweepCurve:
    gammas = gamma_grid(grid_size)
    mu = analytic.mean_value_curve(G, layout, gammas)
    mu_a = {int(A): analytic.approx_curve(G, layout, gammas, int(A)) for A in approx_orders}
    return SweepCurve(gammas, mu, mu_a, lattice_id)


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = REFINE_TOL):
    """Local minimum of ``f`` on ``[a, b]``; returns ``(x, f(x))`` with bracket width <= tol."""
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)
    n = int(math.ceil(math.log(tol / h) / math.log(_INV_PHI)))
    c, d = a + _INV_PHI_SQ * h, a + _INV_PHI * h
    yc, yd = f(c), f(d)
    for _ in range(n - 1):
        if yc <= yd:
            b, d, yd = d, c, yc
            h *= _INV_PHI
            c = a + _INV_PHI_SQ * h
            yc = f(c)
        else:
            a, c, yc = c, d, yd
            h *= _INV_PHI
            d = a + _INV_PHI * h
            yd = f(d)
    return (c, yc) if yc <= yd else (d, yd)


def minimize_curve(gammas, values, evaluator: Callable[[float], float] | None = None,
                   refine: bool = True, tol: float = REFINE_TOL):
    """Grid argmin (first occurrence on ties), optionally polished by golden section.

    The refined point replaces the grid point only if it is strictly lower, so
    the returned value never exceeds any tabulated value.
    """
    gammas = np.asarray(gammas, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(values) == 0:
        raise ValueError("empty curve")
    t = int(np.argmin(values))
    best = (float(gammas[t]), float(values[t]))
    if not refine or evaluator is None or len(gammas) < 2:
        return best
    lo = gammas[max(t - 1, 0)]
    hi = gammas[min(t + 1, len(gammas) - 1)]
    x, fx = golden_section(evaluator, lo, hi, tol)
    if fx < best[1]:
        return float(x), float(fx)
    return best


@dataclass
class OrderMinimum:
    order: int
    gamma_a: float
    mu_approx_at_gamma_a: float
    mu_at_gamma_a: float
    ratio: float


@dataclass
class MinimaReport:
    gamma_opt: float
    mu_at_opt: float
    mu_at_zero: float
    baseline_ratio: float
    orders: dict = field(default_factory=dict)
    lattice_id: str | None = None
    k: int | None = None
    refined: bool = True

    @property
    def ratios(self) -> dict:
        return {A: r.ratio for A, r in self.orders.items()}

    def rows(self):
        for A in sorted(self.orders):
            r = self.orders[A]
            yield {
                "lattice_id": self.lattice_id, "gamma_opt": self.gamma_opt, "mu_opt": self.mu_at_opt,
                "A": A, "gamma_A": r.gamma_a, "mu_at_gamma_A": r.mu_at_gamma_a,
                "ratio": r.ratio, "baseline_ratio": self.baseline_ratio,
            }


MINIMA_COLUMNS = ["lattice_id", "gamma_opt", "mu_opt", "A", "gamma_A", "mu_at_gamma_A",
                  "ratio", "baseline_ratio"]


def write_minima_csv(reports, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=MINIMA_COLUMNS)
        w.writeheader()
        for rep in reports:
            for row in rep.rows():
                w.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in row.items()})
    return path


def ratio_report(G, layout: QuditLayout, grid_size: int = DEFAULT_GRID_SIZE, approx_orders=(1, 2, 3),
                 refine: bool = True, curve: SweepCurve | None = None,
                 lattice_id: str | None = None) -> MinimaReport:
    """Locate the minima of the exact and approximate curves and compare them.

    gamma_opt is the best of the refined exact minimum and every gamma_A, so all
    ratios are >= 1 even when an approximator finds a basin the grid missed.
    """
    orders = [int(A) for A in approx_orders]
    if curve is None or any(A not in curve.mu_a for A in orders):
        curve = sweep_gamma(G, layout, grid_size, orders, lattice_id)

    def exact(g):
        return analytic.mean_value(G, layout, g).mu

    gamma_opt, mu_opt = minimize_curve(curve.gammas, curve.mu, exact, refine)
    found = {}
    for A in orders:
        gamma_a, mu_a = minimize_curve(curve.gammas, curve.mu_a[A],
                                       lambda g, A=A: analytic.mean_value_approx(G, layout, g, A), refine)
        found[A] = (gamma_a, mu_a, exact(gamma_a))
        if found[A][2] < mu_opt:
            gamma_opt, mu_opt = gamma_a, found[A][2]
    mu_zero = float(curve.mu[0])
    report = MinimaReport(gamma_opt, mu_opt, mu_zero, mu_zero / mu_opt,
                          lattice_id=lattice_id or curve.lattice_id, k=layout.k, refined=refine)
    for A, (gamma_a, mu_a, mu_full) in found.items():
        report.orders[A] = OrderMinimum(A, gamma_a, mu_a, mu_full, mu_full / mu_opt)
    return report
