"""Matplotlib renderings of the report payloads, saved next to the CSV output."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def _finish(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def return_probability_figure(rows: list[dict], path: Path) -> Path:
    """Semilog plot of p_{2n} against 2n, with CI whiskers for MC rows."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for method, marker in (("exact", "o"), ("mc", "s"), ("chain", "^")):
        pts = [r for r in rows if r["method"] == method and r["two_n"] > 0]
        if not pts:
            continue
        x = [r["two_n"] for r in pts]
        y = [r["p"] for r in pts]
        if method == "mc":
            yerr = np.array(
                [[r["p"] - r["ci_low"] for r in pts], [r["ci_high"] - r["p"] for r in pts]]
            )
            ax.errorbar(x, y, yerr=yerr, fmt=marker, label=method, capsize=3)
        else:
            ax.plot(x, y, marker + "-", label=method)
    ax.set_yscale("log")
    ax.set_xlabel("walk length 2n")
    ax.set_ylabel("return probability")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def chain_profile_figure(rows: list[dict], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    x = [r["two_n"] for r in rows]
    ax.semilogy(x, [max(r["chain_return"], 1e-300) for r in rows], "o-", label="chain return")
    ax.semilogy(x, [max(r["stay_return"], 1e-300) for r in rows], "s--", label="stay & return")
    ax.set_xlabel("steps 2n")
    ax.set_ylabel("probability")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def tail_bound_figure(curve: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    eps = np.array(curve["epsilons"])
    upper = np.array(curve["upper"])
    lower = np.array(curve["lower"])
    ax.loglog(eps, upper, "o-", label="upper bound")
    positive = lower > 0
    if positive.any():
        ax.loglog(eps[positive], lower[positive], "s--", label="lower bound")
    ax.set_xlabel("distance to edge")
    ax.set_ylabel("tail of the counting function")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)


def lifshitz_fit_figure(epsilons, uppers, fit: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    pts = [(e, u) for e, u in zip(epsilons, uppers) if 0.0 < u < 1.0]
    x = np.log(1.0 / np.array([e for e, _ in pts]))
    y = np.log(-np.log(np.array([u for _, u in pts])))
    ax.plot(x, y, "o", label="data")
    xs = np.linspace(x.min(), x.max(), 50)
    ax.plot(xs, fit["slope"] * xs + fit["intercept"], "-", label=f"slope {fit['slope']:.3f}")
    ax.axline((xs[0], fit["slope"] * xs[0] + fit["intercept"]), slope=fit["target"],
              ls=":", color="grey", label=f"target slope {fit['target']:.1f}")
    ax.set_xlabel("log(1/eps)")
    ax.set_ylabel("log(-log upper bound)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def spectrum_figure(eigenvalues, normalization: int, label: str, path: Path) -> Path:
    """Normalised eigenvalue counting staircase."""
    fig, ax = plt.subplots(figsize=(6, 4))
    eigs = np.sort(np.asarray(eigenvalues))
    ax.step(eigs, np.arange(1, len(eigs) + 1) / normalization, where="post")
    ax.set_xlabel("eigenvalue")
    ax.set_ylabel("counting function")
    ax.set_title(label)
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def class_size_figure(sizes: list[int], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    log_sizes = np.log2(np.array(sizes))
    bins = np.arange(-0.5, log_sizes.max() + 1.5)
    ax.hist(log_sizes, bins=bins, edgecolor="black", alpha=0.8)
    ax.set_xlabel("log2 class size")
    ax.set_ylabel("paths")
    ax.grid(True, axis="y", alpha=0.3)
    return _finish(fig, path)


def flex_quantile_figure(summary: dict, path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 4))
    q = summary["quantiles"]
    ax.errorbar(
        [summary["n_steps"]],
        [q["q50"]],
        yerr=[[q["q50"] - q["q10"]], [q["q90"] - q["q50"]]],
        fmt="o",
        capsize=5,
        label="q10/q50/q90",
    )
    ax.plot([summary["n_steps"]], [summary["mean_flex_even"]], "x", label="mean")
    ax.set_xlabel("walk length")
    ax.set_ylabel("flexible even sites in range")
    ax.legend()
    ax.grid(True, alpha=0.3)
    return _finish(fig, path)


def dirichlet_figure(rows: list[dict], path: Path) -> Path:
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = [r["label"] for r in rows]
    values = [r["value"] for r in rows]
    bounds = [r["bound"] for r in rows]
    x = np.arange(len(rows))
    ax.bar(x - 0.2, values, width=0.4, label="computed")
    ax.bar(x + 0.2, bounds, width=0.4, label="bound")
    ax.set_xticks(x)
    ax.set_xticklabels(labels, rotation=30, ha="right")
    ax.legend()
    ax.grid(True, axis="y", alpha=0.3)
    return _finish(fig, path)
