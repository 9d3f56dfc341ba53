"""Scenario orchestration: build a network, run one or more allocation
schemes from a shared start, and evaluate SIR and throughput over time."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import coding, dynamics, metrics
from .dynamics import RunTrace, Scheduler
from .errors import InvalidParameterError
from .game import GameConfig, Utility, random_profile, sir_all
from .signaling import ProbePowerConfig, run_protocol_game
from .topology import Network, Placement, generate_network

SCHEMES = ("potential", "learn_u1", "learn_u2", "random")
INITIAL = "initial"

# Independent random streams derived from the scenario seed.
_STREAM_TOPOLOGY, _STREAM_INITIAL, _STREAM_DYNAMICS, _STREAM_EVAL = range(4)


@dataclass
class ScenarioConfig:
    seed: int = 0
    n_pairs: int = 30
    area_side: float = 200.0
    n_channels: int = 4
    scheme: str = "potential"
    beta: float = dynamics.DEFAULT_BETA
    scheduler: str = "bernoulli"
    p_a: float | None = None
    placement: str = "disk(50)"
    alpha: float = 4.0
    ref_dist: float = 1.0
    eval_slots: int = 1000
    max_slots: int = dynamics.DEFAULT_MAX_SLOTS
    utility_scale: float = dynamics.DEFAULT_UTILITY_SCALE
    normalize: str = dynamics.DEFAULT_NORMALIZE
    gated_learning: bool = False
    signaling: bool = False
    probe_ratio: float = 2.0

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.n_pairs < 2:
            raise InvalidParameterError("n_pairs must be >= 2")
        if self.n_channels < 1:
            raise InvalidParameterError("n_channels must be >= 1")
        if self.area_side <= 0 or self.alpha <= 0 or self.ref_dist <= 0:
            raise InvalidParameterError("area_side, alpha and ref_dist must be positive")
        if self.scheme not in SCHEMES:
            raise InvalidParameterError(f"scheme must be one of {SCHEMES}")
        if self.beta <= 0:
            raise InvalidParameterError("beta must be positive")
        if self.eval_slots < 1 or self.max_slots < 1:
            raise InvalidParameterError("eval_slots and max_slots must be >= 1")
        if self.utility_scale <= 0:
            raise InvalidParameterError("utility_scale must be positive")
        Scheduler(self.scheduler, self.p_a)
        Placement.parse(self.placement)

    @classmethod
    def from_dict(cls, data: dict) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidParameterError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_json(cls, path) -> "ScenarioConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise InvalidParameterError(f"{path}: {exc}") from exc
        if not isinstance(data, dict):
            raise InvalidParameterError("config must be a JSON object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


@dataclass
class SchemeResult:
    scheme: str
    per_user_avg_sir_db: np.ndarray
    per_user_avg_throughput: np.ndarray
    total_throughput: float
    mean_throughput: float
    variance_throughput: float
    trace: RunTrace | None = None
    profile: np.ndarray | None = None  # allocation replayed during evaluation, if pure
    packet_log: list | None = None

    @property
    def converged_at(self) -> int | None:
        return None if self.trace is None else self.trace.converged_at

    @property
    def converged(self) -> bool:
        return self.trace is None or self.trace.converged


@dataclass
class Comparison:
    config: ScenarioConfig
    network: Network
    initial_profile: np.ndarray
    results: dict[str, SchemeResult] = field(default_factory=dict)


def _streams(seed: int):
    return np.random.SeedSequence(seed).spawn(4)


def build_network(cfg: ScenarioConfig) -> Network:
    ss = _streams(cfg.seed)[_STREAM_TOPOLOGY]
    return generate_network(
        np.random.default_rng(ss), cfg.n_pairs, cfg.area_side, Placement.parse(cfg.placement), cfg.alpha, cfg.ref_dist
    )


def initial_profile(cfg: ScenarioConfig, n: int) -> np.ndarray:
    rng = np.random.default_rng(_streams(cfg.seed)[_STREAM_INITIAL])
    return random_profile(rng, n, cfg.n_channels)


def _evaluate(net: Network, slots: int, draw) -> tuple[np.ndarray, np.ndarray]:
    """Average per-user SIR (dB, finite slots only) and throughput over
    ``slots`` slots; ``draw(t)`` gives the profile played in slot ``t``."""
    sir_sum = np.zeros(net.n)
    sir_count = np.zeros(net.n)
    thr_sum = np.zeros(net.n)
    for t in range(slots):
        sir_db = coding.to_db(sir_all(draw(t), net))
        finite = np.isfinite(sir_db)
        sir_sum[finite] += sir_db[finite]
        sir_count += finite
        thr_sum += coding.normalized_throughput(sir_db)
    with np.errstate(invalid="ignore", divide="ignore"):
        avg_sir = np.where(sir_count > 0, sir_sum / np.maximum(sir_count, 1), math.inf)
    return avg_sir, thr_sum / slots


def evaluate_fixed(net: Network, profile, slots: int) -> tuple[np.ndarray, np.ndarray]:
    """Evaluation of a profile replayed every slot. Every slot is identical,
    so one slot stands for all of them."""
    return _evaluate(net, 1, lambda t: profile)


def evaluate_mixed(net: Network, weights: np.ndarray, slots: int, rng) -> tuple[np.ndarray, np.ndarray]:
    return _evaluate(net, slots, lambda t: dynamics.sample_channels(weights, rng))


def _result(scheme, avg_sir, avg_thr, trace=None, profile=None) -> SchemeResult:
    mean, var, total = metrics.summary_stats(avg_thr)
    return SchemeResult(scheme, avg_sir, avg_thr, total, mean, var, trace, profile)


def run_scheme(cfg: ScenarioConfig, net: Network, initial, scheme: str | None = None) -> SchemeResult:
    """Run one scheme on a given network and starting allocation."""
    scheme = scheme or cfg.scheme
    streams = _streams(cfg.seed)
    rng = np.random.default_rng(streams[_STREAM_DYNAMICS])
    eval_rng = np.random.default_rng(streams[_STREAM_EVAL])
    k = cfg.n_channels
    scheduler = Scheduler(cfg.scheduler, cfg.p_a)

    if scheme == INITIAL:
        return _result(INITIAL, *evaluate_fixed(net, initial, cfg.eval_slots), profile=np.asarray(initial))
    if scheme == "random":
        uniform = np.full((net.n, k), 1.0 / k)
        return _result("random", *evaluate_mixed(net, uniform, cfg.eval_slots, eval_rng))
    if scheme == "potential":
        game = GameConfig(k, Utility.COOPERATIVE)
        log = None
        if cfg.signaling:
            trace, world = run_protocol_game(
                net, k, scheduler, rng, cfg.max_slots, initial, ProbePowerConfig(ratio=cfg.probe_ratio)
            )
            log = world.log
        else:
            trace = dynamics.run_potential_game(net, game, scheduler, rng, cfg.max_slots, initial=initial)
        res = _result(scheme, *evaluate_fixed(net, trace.final_profile, cfg.eval_slots), trace, trace.final_profile)
        res.packet_log = log
        return res
    if scheme in ("learn_u1", "learn_u2"):
        game = GameConfig(k, Utility.SELFISH if scheme == "learn_u1" else Utility.COOPERATIVE)
        trace = dynamics.run_learning(
            net,
            game,
            rng,
            beta=cfg.beta,
            max_slots=cfg.max_slots,
            initial=initial,
            utility_scale=cfg.utility_scale,
            normalize=cfg.normalize,
            scheduler=scheduler if cfg.gated_learning else None,
        )
        if trace.outcome == "pure":
            return _result(scheme, *evaluate_fixed(net, trace.final_profile, cfg.eval_slots), trace, trace.final_profile)
        return _result(scheme, *evaluate_mixed(net, trace.final_weights, cfg.eval_slots, eval_rng), trace)
    raise InvalidParameterError(f"unknown scheme {scheme!r}")


def run_scenario(cfg: ScenarioConfig) -> SchemeResult:
    net = build_network(cfg)
    return run_scheme(cfg, net, initial_profile(cfg, net.n))


def compare_schemes(cfg: ScenarioConfig, schemes=SCHEMES) -> Comparison:
    """Run each scheme on the same network from the same starting allocation.

    The result also holds the ``"initial"`` baseline: the starting
    allocation held fixed.
    """
    schemes = list(schemes)
    if not schemes:
        raise InvalidParameterError("need at least one scheme")
    for s in schemes:
        if s not in SCHEMES:
            raise InvalidParameterError(f"unknown scheme {s!r}")
    net = build_network(cfg)
    start = initial_profile(cfg, net.n)
    out = Comparison(cfg, net, start)
    out.results[INITIAL] = run_scheme(cfg, net, start, INITIAL)
    for s in schemes:
        out.results[s] = run_scheme(cfg, net, start, s)
    return out
