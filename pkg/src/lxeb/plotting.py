"""Figures for experiment reports, written next to report.json."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 3.6),
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "savefig.dpi": 150,
}


def _save(fig, path):
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    return Path(path)


def plot_porter_thomas(hist: dict, path, title=None):
    edges = np.asarray(hist["edges"])
    counts = np.asarray(hist["counts"], dtype=float)
    widths = np.diff(edges)
    density = counts / (hist["total"] * widths)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.bar(edges[:-1], density, width=widths, align="edge", alpha=0.6, label="circuits")
        xs = np.linspace(edges[0], edges[-1], 200)
        ax.plot(xs, np.exp(-xs), "k-", lw=1.2, label=r"$e^{-x}$")
        ax.set_yscale("log")
        ax.set_xlabel(r"$d\,p(x)$")
        ax.set_ylabel("density")
        if title:
            ax.set_title(title)
        ax.legend()
        return _save(fig, path)


def plot_values(values, path, xlabel, reference=None, reference_label=None, bins=40):
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        ax.hist(values, bins=bins, alpha=0.7)
        if reference is not None:
            ax.axvline(reference, color="k", ls="--", lw=1, label=reference_label)
            ax.legend()
        ax.set_xlabel(xlabel)
        ax.set_ylabel("trials")
        return _save(fig, path)


def plot_zscores(checks, path):
    names = [c["name"] for c in checks if "z" in c]
    zs = [c["z"] for c in checks if "z" in c]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5.0, 0.22 * len(names) + 1.2))
        ax.barh(range(len(zs)), zs)
        ax.axvline(-5, color="r", lw=0.8)
        ax.axvline(5, color="r", lw=0.8)
        ax.set_yticks(range(len(names)))
        ax.set_yticklabels(names, fontsize=6)
        ax.set_xlabel("standard errors from exact value")
        return _save(fig, path)


def render_figures(report, output_dir) -> list[Path]:
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    cfg = report.config
    if report.records:
        pt = report.histograms.get("porter_thomas")
        if pt:
            written.append(plot_porter_thomas(pt, out / "porter_thomas.png",
                                              f"n={cfg['ensemble']['n']}, depth={cfg['ensemble']['depth']}"))
        cps = [r.collision_prob for r in report.records]
        ref = report.oracles.get("collision_mean", {}).get("value")
        written.append(plot_values(cps, out / "collision_prob.png", "collision probability", ref, "Haar mean"))
        if cfg["experiment"] == "maxp":
            n = cfg["ensemble"]["n"]
            scaled = [r.max_prob * 2**n / n for r in report.records]
            written.append(plot_values(scaled, out / "max_prob.png", r"$d\,\max_x p(x) / n$", 4.0, "threshold 4"))
        if cfg["experiment"] == "lxeb":
            n = cfg["ensemble"]["n"]
            stats = [r.lxeb_stat * 2**n for r in report.records]
            written.append(plot_values(stats, out / "lxeb_stat.png", r"$d \cdot$ LXEB statistic", cfg["b"], "b"))
    elif report.checks:
        written.append(plot_zscores(report.checks, out / "moment_zscores.png"))
    return written
