"""Figure rendering for ensemble bundles (violins, correlations, minima histograms)."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_LABELS = {"half": "A=ceil(m/2)", "full": "A=m"}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return Path(path)


def plot_violins(stats, path):
    ks = sorted(stats.violins)
    fig, ax = plt.subplots(figsize=(7, 4))
    ax.violinplot([stats.violins[k]["samples"] for k in ks], positions=ks, showextrema=True,
                  showmedians=True)
    ax.axhline(1.0, color="red", ls="--", lw=1, label="uniform sampler")
    ax.set_xlabel("k")
    ax.set_ylabel(r"$\mu(\gamma)/\mu(0)$")
    ax.legend(loc="lower right", frameon=False)
    return _save(fig, path)


def plot_correlations(stats, path):
    cfg = stats.config
    fig, ax = plt.subplots(figsize=(7, 4))
    markers = iter("osD^v<>")
    for token in cfg.approx_orders:
        xs, ys = [], []
        for k in sorted(stats.correlations):
            m = k + 1
            A = {"half": -(-m // 2), "full": m}.get(token, token)
            row = stats.correlations[k].get(A)
            if row is not None and np.isfinite(row["mean_r"]):
                xs.append(k)
                ys.append(row["mean_r"])
        if xs:
            ax.plot(xs, ys, marker=next(markers, "o"), ls="--", label=_LABELS.get(token, f"A={token}"))
    ax.set_xlabel("k")
    ax.set_ylabel(r"mean $r_A$")
    ax.legend(frameon=False)
    return _save(fig, path)


def plot_histograms(stats, path):
    orders = sorted(stats.histograms)
    if not orders:
        return None
    fig, axes = plt.subplots(1, len(orders), figsize=(4 * len(orders), 3.5), squeeze=False)
    for ax, A in zip(axes[0], orders):
        h = stats.histograms[A]
        ax.bar(h["edges"][:-1], h["counts"], width=h["width"], align="edge", edgecolor="k", lw=0.4)
        if A == 1 and len(h["baselines"]):
            ax.axvline(float(np.median(h["baselines"])), color="k", ls="--", lw=1)
        ax.set_title(f"A={A}")
        ax.set_xlabel(r"$\mu(\gamma_A)/\mu(\gamma_{opt})$")
    axes[0][0].set_ylabel("count")
    return _save(fig, path)


def render_figures(stats, outdir) -> dict:
    outdir = Path(outdir)
    out = {
        "violin": plot_violins(stats, outdir / "violin.png"),
        "correlation": plot_correlations(stats, outdir / "correlation.png"),
        "histograms": plot_histograms(stats, outdir / "histograms.png"),
    }
    return {k: v.name for k, v in out.items() if v is not None}
