"""Ensemble statistics: correlation of approximators, mu(g)/mu(0) spreads, minima ratios."""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .encoding import QuditLayout
from .lattice import DEFAULT_ENTRY_BOUND, generate_random_lattice, gram_from_basis
from .optimize import DEFAULT_GRID_SIZE, ratio_report, sweep_gamma, write_minima_csv

HISTOGRAM_KS = (5, 6, 7)
QUANTILES = (0.0, 0.01, 0.25, 0.5, 0.75, 1.0)


class UndefinedCorrelation(ValueError):
    pass


@dataclass
class EnsembleConfig:
    num_lattices: int = 45
    dim: int = 2
    ks: tuple = (1, 2, 3, 4, 5, 6, 7)
    # ints, or "half" (ceil(m/2)) and "full" (m), resolved per k and clipped to m
    approx_orders: tuple = (1, 2, 3, "half", "full")
    grid_size: int = DEFAULT_GRID_SIZE
    base_seed: int = 2022
    entry_bound: int = DEFAULT_ENTRY_BOUND
    # figure reproduction uses sampled-grid minimisers; see optimize.ratio_report for refinement
    refine: bool = False
    bin_widths: dict = field(default_factory=lambda: {1: 0.04, 2: 0.0015, 3: 0.0015})
    histogram_ks: tuple = HISTOGRAM_KS

    def __post_init__(self):
        self.ks = tuple(int(k) for k in self.ks)
        self.histogram_ks = tuple(int(k) for k in self.histogram_ks)
        self.approx_orders = tuple(a if a in ("half", "full") else int(a) for a in self.approx_orders)
        self.bin_widths = {int(a): float(w) for a, w in self.bin_widths.items()}
        if min(self.num_lattices, self.dim, self.grid_size - 1, self.entry_bound) < 1:
            raise ValueError("num_lattices, dim, entry_bound must be >= 1 and grid_size >= 2")
        if not self.ks or min(self.ks) < 0:
            raise ValueError("ks must be non-negative")
        if any(isinstance(a, int) and a < 1 for a in self.approx_orders):
            raise ValueError("approximation orders must be >= 1")

    def orders_for(self, k: int) -> list[int]:
        m = k + 1
        out = set()
        for a in self.approx_orders:
            if a == "half":
                out.add(math.ceil(m / 2))
            elif a == "full":
                out.add(m)
            elif a <= m:
                out.add(a)
        return sorted(out)

    def lattice_seeds(self) -> list[int]:
        children = np.random.SeedSequence(self.base_seed).spawn(self.num_lattices)
        return [int(c.generate_state(1, dtype=np.uint64)[0]) for c in children]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ks"] = list(self.ks)
        d["histogram_ks"] = list(self.histogram_ks)
        d["approx_orders"] = list(self.approx_orders)
        d["bin_widths"] = {str(a): w for a, w in self.bin_widths.items()}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "EnsembleConfig":
        return cls(**d)


def pearson(xs, ys) -> float:
    """Pearson correlation with population moments over the sample points."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("series must be 1-D and of equal length")
    if len(x) < 2:
        raise ValueError("need at least two points")
    dx, dy = x - x.mean(), y - y.mean()
    sx, sy = math.sqrt(np.mean(dx * dx)), math.sqrt(np.mean(dy * dy))
    scale = 1e-13
    if sx <= scale * max(np.abs(x).max(), 1e-300) or sy <= scale * max(np.abs(y).max(), 1e-300):
        raise UndefinedCorrelation("correlation undefined for a constant series")
    return float(np.clip(np.mean(dx * dy) / (sx * sy), -1.0, 1.0))


def correlation_table(curves, orders_by_k: dict) -> dict:
    """Mean r_A per k.

    ``curves`` maps ``(lattice, k)`` to a :class:`SweepCurve`.  Lattices whose
    approximator curve is constant (e.g. an orthogonal basis at A=1) have no
    defined correlation and are left out of that mean; the count is kept.
    """
    per = {}
    for (lat, k), curve in sorted(curves.items()):
        for A in orders_by_k[k]:
            try:
                r = pearson(curve.mu_a[A], curve.mu)
            except UndefinedCorrelation:
                r = math.nan
            per.setdefault(k, {}).setdefault(A, []).append(r)
    table = {}
    for k, by_a in per.items():
        table[k] = {}
        for A, rs in by_a.items():
            rs = np.array(rs)
            ok = rs[~np.isnan(rs)]
            table[k][A] = {
                "mean_r": float(ok.mean()) if len(ok) else math.nan,
                "stddev_r": float(ok.std()) if len(ok) else math.nan,
                "n_used": int(len(ok)),
                "n_undefined": int(len(rs) - len(ok)),
                "values": rs,
            }
    return table


def violin_data(curves) -> dict:
    """Per-k pooled samples of mu(g)/mu(0) and their summary quantiles."""
    pooled = {}
    for (lat, k), curve in sorted(curves.items()):
        pooled.setdefault(k, []).append(curve.mu / curve.mu[0])
    out = {}
    for k, parts in pooled.items():
        samples = np.concatenate(parts)
        q = np.quantile(samples, QUANTILES, method="linear")
        out[k] = {
            "samples": samples,
            "quantiles": dict(zip(("min", "p01", "p25", "p50", "p75", "max"), map(float, q))),
            "iqr": float(q[3] - q[2]),
        }
    return out


def _bin_width(widths: dict, A: int) -> float:
    if A in widths:
        return widths[A]
    return min(widths.values()) if widths else 0.0015


def ratio_histograms(reports, orders, widths: dict | None = None, ks=None) -> dict:
    """Histogram of mu(gamma_A)/mu(gamma_opt) per A; bins start at 1.0."""
    reports = list(reports)
    if not reports:
        raise ValueError("no reports")
    widths = widths or {1: 0.04, 2: 0.0015, 3: 0.0015}
    out = {}
    for A in orders:
        vals = np.array([r.orders[A].ratio for r in reports
                         if A in r.orders and (ks is None or r.k in ks)])
        if len(vals) == 0:
            continue
        w = _bin_width(widths, A)
        idx = np.maximum(np.floor((vals - 1.0) / w + 1e-9).astype(int), 0)
        counts = np.bincount(idx)
        edges = 1.0 + w * np.arange(len(counts) + 1)
        baselines = np.array([r.baseline_ratio for r in reports
                              if A in r.orders and (ks is None or r.k in ks)])
        out[A] = {"edges": edges, "counts": counts, "width": w, "values": vals, "baselines": baselines}
    return out


@dataclass
class EnsembleStats:
    config: EnsembleConfig
    lattices: list
    curves: dict
    reports: dict
    correlations: dict
    violins: dict
    histograms: dict


def _work_item(args):
    lat, seed, k, config = args
    basis = generate_random_lattice(config.dim, config.entry_bound, seed)
    G = gram_from_basis(basis)
    layout = QuditLayout(config.dim, k)
    orders = config.orders_for(k)
    lattice_id = f"L{lat:03d}"
    curve = sweep_gamma(G, layout, config.grid_size, orders, lattice_id)
    report = ratio_report(G, layout, config.grid_size, orders, config.refine, curve, lattice_id)
    return lat, k, curve, report


def ensemble_run(config: EnsembleConfig, jobs: int = 1) -> EnsembleStats:
    seeds = config.lattice_seeds()
    lattices = [generate_random_lattice(config.dim, config.entry_bound, s) for s in seeds]
    items = [(lat, seeds[lat], k, config) for k in config.ks for lat in range(config.num_lattices)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_work_item, items, chunksize=4))
    else:
        results = [_work_item(it) for it in items]
    curves = {(lat, k): c for lat, k, c, _ in results}
    reports = {(lat, k): r for lat, k, _, r in results}
    orders_by_k = {k: config.orders_for(k) for k in config.ks}
    hist_orders = sorted({A for k in config.histogram_ks if k in orders_by_k for A in orders_by_k[k]
                          if A in config.bin_widths})
    hist_reports = [reports[key] for key in sorted(reports) if key[1] in config.histogram_ks]
    return EnsembleStats(
        config=config,
        lattices=lattices,
        curves=curves,
        reports=reports,
        correlations=correlation_table(curves, orders_by_k),
        violins=violin_data(curves),
        histograms=ratio_histograms(hist_reports, hist_orders, config.bin_widths) if hist_reports else {},
    )


def _fmt(v) -> str:
    return repr(float(v))


def write_bundle(stats: EnsembleStats, outdir) -> dict:
    """Write violin/correlation/histogram/minima CSVs and a replayable manifest."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = {}
    for k in sorted(stats.violins):
        path = outdir / f"violin_{k}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["gamma", "mu", "mu0", "ratio", "lattice_id"])
            for (lat, kk), curve in sorted(stats.curves.items()):
                if kk != k:
                    continue
                for g, mu in zip(curve.gammas, curve.mu):
                    w.writerow([_fmt(g), _fmt(mu), _fmt(curve.mu[0]), _fmt(mu / curve.mu[0]), curve.lattice_id])
        written[f"violin_{k}"] = path.name

    path = outdir / "correlation.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["k", "A", "mean_r", "stddev_r"])
        for k in sorted(stats.correlations):
            for A in sorted(stats.correlations[k]):
                row = stats.correlations[k][A]
                w.writerow([k, A, _fmt(row["mean_r"]), _fmt(row["stddev_r"])])
    written["correlation"] = path.name

    for A in sorted(stats.histograms):
        h = stats.histograms[A]
        path = outdir / f"histogram_A{A}.csv"
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["bin_lo", "bin_hi", "count"])
            for lo, hi, c in zip(h["edges"][:-1], h["edges"][1:], h["counts"]):
                w.writerow([_fmt(lo), _fmt(hi), int(c)])
        written[f"histogram_A{A}"] = path.name

    write_minima_csv([stats.reports[key] for key in sorted(stats.reports, key=lambda t: (t[1], t[0]))],
                     outdir / "minima.csv")
    written["minima"] = "minima.csv"

    manifest = {
        "software": {"package": "qmvsvp", "version": __version__},
        "config": stats.config.to_dict(),
        "lattice_seeds": stats.config.lattice_seeds(),
        "resolved_orders": {str(k): stats.config.orders_for(k) for k in stats.config.ks},
        "half_order_rule": "ceil((k+1)/2)",
        "minimizer": "grid+golden-section" if stats.config.refine else "grid",
        "beta": "pi/4",
        "gamma_range": [0.0, math.pi],
        "pearson_undefined": {str(k): {str(A): v["n_undefined"] for A, v in by.items()}
                              for k, by in stats.correlations.items()},
        "files": written,
    }
    (outdir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest


def load_manifest_config(path) -> EnsembleConfig:
    return EnsembleConfig.from_dict(json.loads(Path(path).read_text())["config"])
