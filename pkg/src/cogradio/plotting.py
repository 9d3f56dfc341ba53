"""Figures written next to the CSV outputs of a run or comparison."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from . import metrics  # noqa: E402

SCHEME_LABELS = {
    "initial": "Initial assignment",
    "potential": "Potential game",
    "learn_u1": "Learning U1",
    "learn_u2": "Learning U2",
    "random": "Random",
}


def _save(fig, path: Path) -> None:
    fig.tight_layout()
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def plot_topology(net, path) -> None:
    fig, ax = plt.subplots(figsize=(5, 5))
    tx, rx = net.tx_positions, net.rx_positions
    for a, b in zip(tx, rx):
        ax.plot([a[0], b[0]], [a[1], b[1]], "k--", lw=0.6)
    ax.plot(tx[:, 0], tx[:, 1], "o", ms=4, label="transmitter")
    ax.plot(rx[:, 0], rx[:, 1], "x", ms=4, label="receiver")
    ax.set_xlim(0, net.area_side)
    ax.set_ylim(0, net.area_side)
    ax.set_aspect("equal")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    ax.legend(loc="upper right", fontsize=8)
    _save(fig, Path(path))


def plot_potential(trace, path) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(trace.potential_series, lw=1)
    if trace.converged_at is not None:
        ax.axvline(trace.converged_at, color="grey", ls=":", lw=1)
    ax.set_xlabel("slot")
    ax.set_ylabel("potential")
    _save(fig, Path(path))


def plot_actions(trace, path, users=None) -> None:
    profiles = np.array(trace.profiles)
    users = range(profiles.shape[1]) if users is None else users
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for i in users:
        ax.step(np.arange(len(profiles)), profiles[:, i], where="post", lw=0.8)
    ax.set_xlabel("slot")
    ax.set_ylabel("channel")
    ax.set_yticks(range(1, int(profiles.max()) + 1))
    _save(fig, Path(path))


def plot_weights(trace, path, user: int = 0) -> None:
    slots = [t for t, _ in trace.weight_snapshots]
    w = np.array([snap[user] for _, snap in trace.weight_snapshots])
    fig, ax = plt.subplots(figsize=(6, 3.5))
    for c in range(w.shape[1]):
        ax.plot(slots, w[:, c], lw=1, label=f"channel {c + 1}")
    ax.set_ylim(-0.02, 1.02)
    ax.set_xlabel("slot")
    ax.set_ylabel(f"weight, user {user + 1}")
    ax.legend(fontsize=8)
    _save(fig, Path(path))


def plot_sir_bars(result, path) -> None:
    sir = np.asarray(result.per_user_avg_sir_db, dtype=float)
    shown = np.where(np.isfinite(sir), sir, np.nan)
    fig, ax = plt.subplots(figsize=(7, 3.5))
    ax.bar(np.arange(1, len(sir) + 1), shown)
    ax.axhline(0, color="k", lw=0.5)
    ax.set_xlabel("user")
    ax.set_ylabel("average SIR (dB)")
    _save(fig, Path(path))


def plot_cdfs(results: dict, path, field: str, xlabel: str) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, r in results.items():
        values = np.asarray(getattr(r, field), dtype=float)
        values = values[np.isfinite(values)]
        if values.size == 0:
            continue
        pts = metrics.empirical_cdf(values)
        xs = [x for x, _ in pts]
        ys = [y for _, y in pts]
        ax.step(xs, ys, where="post", label=SCHEME_LABELS.get(name, name))
    ax.set_xlabel(xlabel)
    ax.set_ylabel("fraction of users")
    ax.set_ylim(0, 1.02)
    ax.legend(fontsize=8)
    _save(fig, Path(path))


def plot_sir_histogram(results: dict, path, bins=np.arange(-10, 41, 2.5)) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, r in results.items():
        counts, edges = metrics.histogram(r.per_user_avg_sir_db, bins=bins)
        ax.step(edges[:-1], counts, where="post", label=SCHEME_LABELS.get(name, name))
    ax.set_xlabel("average SIR (dB)")
    ax.set_ylabel("users")
    ax.legend(fontsize=8)
    _save(fig, Path(path))


def plot_summary(results: dict, path) -> None:
    names = list(results)
    labels = [SCHEME_LABELS.get(n, n) for n in names]
    panels = (
        ("total_throughput", "total throughput"),
        ("mean_throughput", "mean per user"),
        ("variance_throughput", "variance per user"),
    )
    fig, axes = plt.subplots(1, 3, figsize=(10, 3.5))
    for ax, (field, title) in zip(axes, panels):
        ax.bar(range(len(names)), [getattr(results[n], field) for n in names])
        ax.set_xticks(range(len(names)))
        ax.set_xticklabels(labels, rotation=40, ha="right", fontsize=8)
        ax.set_title(title, fontsize=9)
    _save(fig, Path(path))


def render_run(net, result, out) -> None:
    out = Path(out)
    plot_topology(net, out / "topology.png")
    plot_sir_bars(result, out / "sir_per_user.png")
    trace = result.trace
    if trace is not None:
        plot_potential(trace, out / "potential.png")
        plot_actions(trace, out / "actions.png")
        if trace.weight_snapshots:
            plot_weights(trace, out / "weights_u1.png", user=0)


def render_comparison(comp, out) -> None:
    out = Path(out)
    plot_topology(comp.network, out / "topology.png")
    plot_cdfs(comp.results, out / "cdf_sir.png", "per_user_avg_sir_db", "time-average SIR (dB)")
    plot_cdfs(comp.results, out / "cdf_throughput.png", "per_user_avg_throughput", "average normalized throughput")
    plot_sir_histogram(comp.results, out / "sir_histogram.png")
    plot_summary(comp.results, out / "summary.png")
    for name, r in comp.results.items():
        render_run(comp.network, r, out / name)
