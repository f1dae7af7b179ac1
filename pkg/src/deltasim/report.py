"""Figure rendering for run results and network cost curves.

Everything draws through the Agg backend and writes PNG files; nothing here
opens a window.  Figures are a convenience layer over the CSV outputs, so
no simulation logic lives in this module.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .harness import ResultRow
from .netsim import MediumProfile, transaction_energy, transaction_time
from .patterns import PatternRun

_PATTERN_COLORS = {"P0": "#1f77b4", "P1": "#ff7f0e", "P2": "#2ca02c"}


def save_score_bars(rows: list[ResultRow], path: str) -> None:
    """Mean prequential score per scenario, colored by pattern."""
    ok = [r for r in rows if r.status == "ok" and r.mean_score is not None]
    if not ok:
        raise ValueError("no successful rows to plot")
    fig, ax = plt.subplots(figsize=(max(6.0, 0.55 * len(ok)), 4.2))
    xs = np.arange(len(ok))
    scores = [r.mean_score for r in ok]
    colors = [_PATTERN_COLORS.get(r.pattern, "#777777") for r in ok]
    ax.bar(xs, scores, color=colors)
    ax.set_xticks(xs)
    ax.set_xticklabels([r.name for r in ok], rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("mean score")
    ax.set_ylim(0.0, 1.0)
    ax.set_title("scenario scores")
    handles = [
        plt.Rectangle((0, 0), 1, 1, color=color)
        for pattern, color in _PATTERN_COLORS.items()
        if any(r.pattern == pattern for r in ok)
    ]
    labels = [p for p in _PATTERN_COLORS if any(r.pattern == p for r in ok)]
    ax.legend(handles, labels, fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_offset_bars(rows: list[ResultRow], path: str) -> None:
    """Score by model-staleness window for P0 scenarios."""
    ok = [
        r for r in rows
        if r.status == "ok" and r.pattern == "P0" and r.offset_w1 is not None
    ]
    if not ok:
        raise ValueError("no P0 rows with offset windows to plot")
    fig, ax = plt.subplots(figsize=(max(5.0, 1.6 * len(ok)), 4.0))
    width = 0.25
    xs = np.arange(len(ok))
    for i, (label, attr) in enumerate(
        (("0-49", "offset_w1"), ("50-99", "offset_w2"), ("100-149", "offset_w3"))
    ):
        values = [getattr(r, attr) or 0.0 for r in ok]
        ax.bar(xs + (i - 1) * width, values, width, label=label)
    ax.set_xticks(xs)
    ax.set_xticklabels([r.name for r in ok], rotation=30, ha="right", fontsize=8)
    ax.set_ylabel("mean score")
    ax.set_ylim(0.0, 1.0)
    ax.set_title("score by model offset window")
    ax.legend(title="offset", fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_score_timeline(run: PatternRun, path: str) -> None:
    """Trailing-window score of each site across its steps."""
    fig, ax = plt.subplots(figsize=(7.0, 4.0))
    log = run.log
    for site in range(run.n_sites):
        steps = [i for i in range(len(log)) if log.site[i] == site]
        ax.plot(
            [log.iteration[i] for i in steps],
            [log.score_avg[i] for i in steps],
            label=f"site {site}", linewidth=0.9,
        )
    ax.set_xlabel("iteration")
    ax.set_ylabel("trailing score")
    ax.set_ylim(0.0, 1.05)
    ax.set_title(f"{run.pattern} trailing score")
    if run.n_sites > 1:
        ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_latency_curves(
    profiles: dict[str, MediumProfile], path: str,
    payloads: np.ndarray | None = None,
) -> None:
    """Transaction time against payload size, one curve per medium."""
    if payloads is None:
        payloads = np.logspace(np.log10(64), np.log10(65536), 40)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in sorted(profiles):
        profile = profiles[name]
        times = [transaction_time(profile, int(p)) for p in payloads]
        ax.plot(payloads, times, label=name)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("payload (bytes)")
    ax.set_ylabel("transaction time (ms)")
    ax.set_title("transaction time by medium")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def save_energy_curves(
    profiles: dict[str, MediumProfile], path: str,
    payloads: np.ndarray | None = None,
) -> None:
    """Transaction energy against payload size, one curve per medium."""
    if payloads is None:
        payloads = np.logspace(np.log10(64), np.log10(65536), 40)
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for name in sorted(profiles):
        profile = profiles[name]
        energies = [transaction_energy(profile, int(p)) for p in payloads]
        ax.plot(payloads, energies, label=name)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("payload (bytes)")
    ax.set_ylabel("transaction energy (mJ)")
    ax.set_title("transaction energy by medium")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
