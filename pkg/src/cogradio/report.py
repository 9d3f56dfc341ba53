"""Run-directory outputs: plot-ready CSV tables and matplotlib figures."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from . import metrics
from .experiment import Comparison, SchemeResult, ScenarioConfig
from .signaling import write_packet_log_csv
from .topology import Network, write_gains_csv, write_topology_csv


def fmt(x) -> str:
    """Six significant digits; integers verbatim."""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.6g}"


def _write(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if not isinstance(v, str) else v for v in row])


def write_trace(trace, out: Path) -> None:
    if trace is None:
        return
    _write(out / "potential.csv", ["slot", "potential"], enumerate(trace.potential_series))
    n = len(trace.profiles[0])
    _write(out / "actions.csv", ["slot"] + [f"s_{i + 1}" for i in range(n)], ([t, *p] for t, p in enumerate(trace.profiles)))
    if trace.weight_snapshots:
        k = trace.weight_snapshots[0][1].shape[1]
        for i in range(n):
            _write(
                out / f"weights_u{i + 1}.csv",
                ["slot"] + [f"w_{c + 1}" for c in range(k)],
                ([t, *w[i]] for t, w in trace.weight_snapshots),
            )


def write_scheme(result: SchemeResult, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_trace(result.trace, out)
    if result.packet_log is not None:
        write_packet_log_csv(result.packet_log, out / "packets.csv")
    ids = range(1, len(result.per_user_avg_throughput) + 1)
    _write(
        out / "per_user.csv",
        ["id", "avg_sir_db", "avg_throughput"],
        zip(ids, result.per_user_avg_sir_db, result.per_user_avg_throughput),
    )
    finite_sir = result.per_user_avg_sir_db[np.isfinite(result.per_user_avg_sir_db)]
    if finite_sir.size:
        _write(out / "cdf_sir.csv", ["sir_db", "fraction"], metrics.empirical_cdf(finite_sir))
    _write(out / "cdf_throughput.csv", ["throughput", "fraction"], metrics.empirical_cdf(result.per_user_avg_throughput))


def summary_rows(results: dict[str, SchemeResult]):
    for name, r in results.items():
        conv = "" if r.converged_at is None else str(r.converged_at)
        yield [name, r.total_throughput, r.mean_throughput, r.variance_throughput, conv]


def write_summary(results: dict[str, SchemeResult], out: Path) -> None:
    _write(out / "summary.csv", ["scheme", "total", "mean", "variance", "converged_at"], summary_rows(results))


def write_network(net: Network, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    write_topology_csv(net, out / "topology.csv")
    write_gains_csv(net, out / "gains.csv")


def write_config(cfg: ScenarioConfig, out: Path) -> None:
    (out / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")


def write_run(cfg: ScenarioConfig, net: Network, result: SchemeResult, out, figures: bool = True) -> Path:
    out = Path(out)
    write_network(net, out)
    write_config(cfg, out)
    write_scheme(result, out)
    write_summary({result.scheme: result}, out)
    if figures:
        from . import plotting

        plotting.render_run(net, result, out)
    return out


def write_comparison(comp: Comparison, out, figures: bool = True) -> Path:
    """Network and summary at the top level, one subdirectory per scheme."""
    out = Path(out)
    write_network(comp.network, out)
    write_config(comp.config, out)
    _write(out / "initial_profile.csv", [f"s_{i + 1}" for i in range(comp.network.n)], [list(comp.initial_profile)])
    for name, r in comp.results.items():
        write_scheme(r, out / name)
    write_summary(comp.results, out)
    if figures:
        from . import plotting

        plotting.render_comparison(comp, out)
    return out


def format_summary(results: dict[str, SchemeResult]) -> str:
    lines = [f"{'scheme':<10} {'total':>9} {'mean':>9} {'variance':>10} {'converged_at':>12}"]
    for name, total, mean, var, conv in summary_rows(results):
        lines.append(f"{name:<10} {total:9.4f} {mean:9.4f} {var:10.5f} {conv or '-':>12}")
    return "\n".join(lines)

