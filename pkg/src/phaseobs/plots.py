"""Matplotlib figure rendering for the CLI report paths.

Every renderer takes already-computed data and writes a PNG next to (or in
place of) the delimited output; nothing here feeds back into the numerics.
"""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "density_figure",
    "qmargin_figure",
    "convergence_figure",
    "sample_figure",
    "matrix_figure",
    "verify_figure",
]


def _save(fig, path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def density_figure(thetas, values, path, label: str = "g") -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.plot(thetas, values, lw=1.2)
    ax.set_xlim(0.0, 2.0 * math.pi)
    ax.set_xlabel(r"$\theta$ (rad)")
    ax.set_ylabel(label)
    ax.grid(alpha=0.3)
    _save(fig, path)


def qmargin_figure(thetas, values, path) -> None:
    density_figure(thetas, values, path, label="angle margin")


def convergence_figure(s_values, errors, path) -> None:
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    ax.loglog(s_values, errors, "o-", lw=1.0)
    ref = errors[0] * (np.asarray(s_values, dtype=float) / s_values[0]) ** -1.0
    ax.loglog(s_values, ref, "--", color="gray", lw=0.8, label="O(1/s)")
    ax.set_xlabel("grid order s")
    ax.set_ylabel("entry error")
    ax.legend()
    ax.grid(alpha=0.3, which="both")
    _save(fig, path)


def sample_figure(samples, path, bins: int = 72) -> None:
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    ax.hist(samples, bins=bins, range=(0.0, 2.0 * math.pi), density=True, alpha=0.75)
    ax.set_xlabel(r"$\theta$ (rad)")
    ax.set_ylabel("empirical density")
    ax.grid(alpha=0.3)
    _save(fig, path)


def matrix_figure(entries, path, title: str = "") -> None:
    fig, ax = plt.subplots(figsize=(5.5, 4.5))
    im = ax.imshow(np.abs(entries), origin="upper", cmap="viridis")
    fig.colorbar(im, ax=ax, label="|entry|")
    if title:
        ax.set_title(title)
    ax.set_xlabel("m")
    ax.set_ylabel("n")
    _save(fig, path)


def verify_figure(results, path) -> None:
    """Horizontal pass/fail bar chart with elapsed times."""
    names = [r.suite for r in results]
    elapsed = [max(r.elapsed_ms, 1) for r in results]
    colors = ["#2a9d42" if r.passed else "#c62828" for r in results]
    fig, ax = plt.subplots(figsize=(7.0, 0.35 * len(names) + 1.2))
    y = np.arange(len(names))
    ax.barh(y, elapsed, color=colors)
    ax.set_yticks(y, names, fontsize=8)
    ax.invert_yaxis()
    ax.set_xscale("log")
    ax.set_xlabel("elapsed (ms); green = pass, red = fail")
    _save(fig, path)
