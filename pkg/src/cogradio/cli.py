"""Command-line entry point: ``cogradio {generate,run,compare,table1}``.

Exit status: 0 on success, 1 for an invalid configuration, 2 when a run
did not converge within its slot budget (outputs are still written).
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import coding
from .errors import InvalidParameterError
from .experiment import SCHEMES, ScenarioConfig, build_network, compare_schemes, run_scenario

log = logging.getLogger("cogradio")

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NOT_CONVERGED = 2

# flag -> ScenarioConfig field
_OVERRIDES = {
    "seed": "seed",
    "scheme": "scheme",
    "n": "n_pairs",
    "k": "n_channels",
    "beta": "beta",
    "slots": "max_slots",
    "eval_slots": "eval_slots",
    "area": "area_side",
    "placement": "placement",
    "scheduler": "scheduler",
    "p_a": "p_a",
    "utility_scale": "utility_scale",
    "normalize": "normalize",
}


def _add_common(p: argparse.ArgumentParser, scheme: bool = True) -> None:
    p.add_argument("--config", type=Path, help="JSON file with ScenarioConfig fields")
    p.add_argument("--seed", type=int)
    if scheme:
        p.add_argument("--scheme", choices=SCHEMES)
    p.add_argument("--n", type=int, help="number of transmitter/receiver pairs")
    p.add_argument("--k", type=int, help="number of channels")
    p.add_argument("--beta", type=float)
    p.add_argument("--slots", type=int, help="maximum adaptation slots")
    p.add_argument("--eval-slots", type=int)
    p.add_argument("--area", type=float, help="side of the square region (m)")
    p.add_argument("--placement", help="uniform-square or disk(R)")
    p.add_argument("--scheduler", choices=("bernoulli", "sequential"))
    p.add_argument("--p-a", type=float, help="decision probability per slot (default 1/N)")
    p.add_argument("--utility-scale", type=float)
    p.add_argument("--normalize", choices=("none", "worst", "median", "signal"))
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--no-figures", action="store_true", help="write CSV only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cogradio", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="draw a topology and write topology.csv / gains.csv")
    _add_common(p, scheme=False)

    p = sub.add_parser("run", help="run one scheme")
    _add_common(p)
    p.add_argument("--signaling", action="store_true", help="drive the potential game through handshakes")

    p = sub.add_parser("compare", help="run several schemes from a shared start")
    _add_common(p, scheme=False)
    p.add_argument("--schemes", nargs="+", choices=SCHEMES, default=list(SCHEMES))

    p = sub.add_parser("table1", help="dump the code-rate table as CSV")
    p.add_argument("--out", type=Path, help="file to write (default stdout)")
    return parser


def config_from_args(args) -> ScenarioConfig:
    cfg = ScenarioConfig.from_json(args.config) if args.config else ScenarioConfig()
    changes = {}
    for flag, name in _OVERRIDES.items():
        value = getattr(args, flag, None)
        if value is not None:
            changes[name] = value
    if getattr(args, "signaling", False):
        changes["signaling"] = True
    return cfg.replace(**changes) if changes else cfg


def _cmd_generate(args) -> int:
    from .report import write_config, write_network

    cfg = config_from_args(args)
    net = build_network(cfg)
    write_network(net, args.out)
    write_config(cfg, args.out)
    if not args.no_figures:
        from .plotting import plot_topology

        plot_topology(net, args.out / "topology.png")
    print(f"wrote {net.n} pairs to {args.out}")
    return EXIT_OK


def _cmd_run(args) -> int:
    from .report import format_summary, write_run

    cfg = config_from_args(args)
    result = run_scenario(cfg)
    write_run(cfg, build_network(cfg), result, args.out, figures=not args.no_figures)
    print(format_summary({result.scheme: result}))
    if not result.converged:
        log.warning("%s did not converge within %d slots", result.scheme, cfg.max_slots)
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_compare(args) -> int:
    from .report import format_summary, write_comparison

    cfg = config_from_args(args)
    comp = compare_schemes(cfg, args.schemes)
    write_comparison(comp, args.out, figures=not args.no_figures)
    print(format_summary(comp.results))
    stalled = [name for name, r in comp.results.items() if not r.converged]
    if stalled:
        log.warning("no convergence within %d slots: %s", cfg.max_slots, ", ".join(stalled))
        return EXIT_NOT_CONVERGED
    return EXIT_OK


def _cmd_table1(args) -> int:
    text = coding.rate_table_csv()
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    handler = {"generate": _cmd_generate, "run": _cmd_run, "compare": _cmd_compare, "table1": _cmd_table1}[args.command]
    try:
        return handler(args)
    except (InvalidParameterError, TypeError, OSError) as exc:
        print(f"cogradio: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
