"""Adaptation engines: scheduled best response and exponential-weights learning."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParameterError, UnsupportedConfigurationError
from .game import (
    GameConfig,
    Utility,
    as_profile,
    channel_utilities,
    is_pure_nash,
    pick_best,
    potential,
)
from .topology import Network

STABILITY_WINDOW = 50
WEIGHT_WINDOW = 100
WEIGHT_TOL = 1e-3
VERTEX_THRESHOLD = 0.99
DEFAULT_BETA = 0.1
DEFAULT_MAX_SLOTS = 5000
DEFAULT_UTILITY_SCALE = 0.1
DEFAULT_NORMALIZE = "median"


@dataclass(frozen=True)
class Scheduler:
    """Who gets decision rights each slot.

    ``bernoulli``: every user independently with probability ``p_a``
    (``None`` means 1/N). ``sequential``: one user per slot, round robin.
    """

    mode: str = "bernoulli"
    p_a: float | None = None

    def __post_init__(self):
        if self.mode not in ("bernoulli", "sequential"):
            raise InvalidParameterError(f"unknown scheduler mode {self.mode!r}")
        if self.p_a is not None and not 0.0 < self.p_a <= 1.0:
            raise InvalidParameterError("p_a must be in (0, 1]")

    def probability(self, n: int) -> float:
        return 1.0 / n if self.p_a is None else self.p_a


def bernoulli_actors(rng, n: int, p_a: float) -> np.ndarray:
    """Indices of users whose coin flip with probability ``p_a`` succeeds."""
    if not 0.0 <= p_a <= 1.0:
        raise InvalidParameterError("p_a must be in [0, 1]")
    return np.flatnonzero(rng.random(n) < p_a)


@dataclass
class RunTrace:
    """Per-slot record of one run. Slot 0 is the starting point."""

    profiles: list[np.ndarray] = field(default_factory=list)
    potential_series: list[float] = field(default_factory=list)
    weight_snapshots: list[tuple[int, np.ndarray]] = field(default_factory=list)
    converged_at: int | None = None
    outcome: str | None = None  # "pure", "mixed" or None when not converged
    final_profile: np.ndarray | None = None
    final_weights: np.ndarray | None = None

    @property
    def converged(self) -> bool:
        return self.converged_at is not None

    @property
    def slots(self) -> int:
        return len(self.profiles) - 1


def potential_game_step(profile, net: Network, cfg: GameConfig, scheduler: Scheduler, rng, slot: int = 0) -> np.ndarray:
    """One slot of best-response play.

    All scheduled actors respond to the same incoming profile. In sequential
    mode user ``slot % N`` is the sole actor.
    """
    if cfg.utility is not Utility.COOPERATIVE:
        raise UnsupportedConfigurationError("best-response dynamics need the cooperative utility")
    s = as_profile(profile, cfg.n_channels, net.n)
    if scheduler.mode == "sequential":
        actors = np.array([slot % net.n])
    else:
        actors = bernoulli_actors(rng, net.n, scheduler.probability(net.n))
    if actors.size == 0:
        return s.copy()
    u = channel_utilities(s, net, cfg)
    out = s.copy()
    for i in actors:
        out[i] = pick_best(u[i], rng)
    return out


def run_potential_game(
    net: Network,
    cfg: GameConfig,
    scheduler: Scheduler,
    rng,
    max_slots: int = DEFAULT_MAX_SLOTS,
    initial=None,
    window: int = STABILITY_WINDOW,
) -> RunTrace:
    """Iterate best-response slots until a pure NE has held for ``window`` slots.

    ``converged_at`` is the first slot of that stable stretch. Ties can let a
    user hop between equally good channels while the NE condition keeps
    holding, so stability is judged on the NE condition rather than on
    bit-identical profiles.
    """
    if max_slots <= 0:
        raise InvalidParameterError("max_slots must be positive")
    if initial is None:
        initial = rng.integers(1, cfg.n_channels + 1, size=net.n)
    s = as_profile(initial, cfg.n_channels, net.n).copy()
    trace = RunTrace(profiles=[s.copy()], potential_series=[potential(s, net)])

    streak_start = 0 if is_pure_nash(s, net, cfg) else None
    for t in range(1, max_slots + 1):
        if streak_start is not None and t - streak_start >= window:
            break
        s = potential_game_step(s, net, cfg, scheduler, rng, slot=t - 1)
        trace.profiles.append(s)
        trace.potential_series.append(potential(s, net))
        if is_pure_nash(s, net, cfg):
            if streak_start is None:
                streak_start = t
        else:
            streak_start = None
    if streak_start is not None:
        trace.converged_at = streak_start
        trace.outcome = "pure"
    trace.final_profile = s
    return trace


def weights_from_cum_utils(cum_utils_row, beta: float) -> np.ndarray:
    """Exponential weights ``(1+beta)**U / sum((1+beta)**U)``, evaluated in
    the log domain after subtracting the row maximum."""
    if beta <= 0:
        raise InvalidParameterError("beta must be positive")
    z = np.asarray(cum_utils_row, dtype=float) * math.log1p(beta)
    z = z - z.max(axis=-1, keepdims=True)
    w = np.exp(z)
    return w / w.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class LearnerState:
    cum_utils: np.ndarray  # N x K
    weights: np.ndarray  # N x K, rows sum to 1
    beta: float
    t: int = 0

    @classmethod
    def initial(cls, n: int, k: int, beta: float = DEFAULT_BETA) -> "LearnerState":
        if beta <= 0:
            raise InvalidParameterError("beta must be positive")
        return cls(np.zeros((n, k)), np.full((n, k), 1.0 / k), beta, 0)


def sample_channels(weights: np.ndarray, rng) -> np.ndarray:
    """One channel per row of a row-stochastic matrix (1-based)."""
    u = rng.random(weights.shape[0])
    cdf = np.cumsum(weights, axis=1)
    idx = (cdf < u[:, None] * cdf[:, -1:]).sum(axis=1)
    return np.minimum(idx, weights.shape[1] - 1) + 1


def utility_scales(net: Network, cfg: GameConfig, normalize: str = DEFAULT_NORMALIZE) -> np.ndarray:
    """Per-user factor applied to utilities before accumulation.

    ``"none"`` keeps raw linear powers. ``"worst"`` divides by the utility
    the user would see with everyone else on its channel. ``"median"``
    divides by the median coupling between the user and one other user
    (incoming, plus outgoing for the cooperative utility), which keeps one
    dominant neighbour from flattening the differences between the rest.
    Positive per-user factors leave every user's preference order, and so
    the pure Nash equilibria, unchanged.
    """
    if normalize == "none":
        return np.ones(net.n)
    cross = net.powers[:, None] * net.gains
    coupling = cross.T.copy()  # coupling[i, j]: power from j reaching receiver i
    if cfg.utility is Utility.COOPERATIVE:
        coupling = coupling + cross
    np.fill_diagonal(coupling, np.nan)
    if normalize == "worst":
        return 1.0 / np.nansum(coupling, axis=1)
    if normalize == "median":
        return 1.0 / np.nanmedian(coupling, axis=1)
    if normalize == "signal":
        return 1.0 / (net.powers * np.diag(net.gains))
    raise InvalidParameterError(f"unknown normalization {normalize!r}")


def learning_step(
    state: LearnerState,
    net: Network,
    cfg: GameConfig,
    rng,
    scales=None,
    played=None,
    actors=None,
    previous=None,
) -> tuple[LearnerState, np.ndarray]:
    """Sample a profile from the weights, then credit every channel of every
    user with the utility it would have earned against the others' play.

    ``played`` forces the profile for this slot. With ``actors`` given, only
    those users redraw; the rest repeat ``previous``.
    """
    if played is None:
        played = sample_channels(state.weights, rng)
        if actors is not None and previous is not None:
            keep = np.ones(net.n, dtype=bool)
            keep[actors] = False
            played[keep] = np.asarray(previous)[keep]
    played = as_profile(played, cfg.n_channels, net.n)
    u = channel_utilities(played, net, cfg)
    if scales is not None:
        u = u * np.asarray(scales)[:, None]
    cum = state.cum_utils + u
    weights = weights_from_cum_utils(cum, state.beta)
    return LearnerState(cum, weights, state.beta, state.t + 1), played


def run_learning(
    net: Network,
    cfg: GameConfig,
    rng,
    beta: float = DEFAULT_BETA,
    max_slots: int = DEFAULT_MAX_SLOTS,
    initial=None,
    utility_scale: float = DEFAULT_UTILITY_SCALE,
    normalize: str = DEFAULT_NORMALIZE,
    scheduler: Scheduler | None = None,
    snapshot_every: int = 1,
    window: int = WEIGHT_WINDOW,
    tol: float = WEIGHT_TOL,
    vertex: float = VERTEX_THRESHOLD,
    stop_on_vertex: bool = True,
) -> RunTrace:
    """Repeated play with exponential weights until the weights settle.

    Stops at the first slot where every user has a channel with weight above
    ``vertex`` (outcome ``"pure"``) or where no weight moved by ``tol`` or
    more over the last ``window`` slots (outcome ``"mixed"``, reported as
    ``"pure"`` if every row has nonetheless reached a vertex). With
    ``stop_on_vertex=False`` only the window rule ends the run. ``initial``,
    when given, is the profile played in slot 1. ``scheduler`` switches on
    gated play: only scheduled users redraw their channel each slot.
    """
    if beta <= 0:
        raise InvalidParameterError("beta must be positive")
    if max_slots <= 0:
        raise InvalidParameterError("max_slots must be positive")
    state = LearnerState.initial(net.n, cfg.n_channels, beta)
    scales = utility_scales(net, cfg, normalize) * utility_scale
    history = [state.weights]
    trace = RunTrace(weight_snapshots=[(0, state.weights)])
    played = None

    for t in range(1, max_slots + 1):
        forced = as_profile(initial, cfg.n_channels, net.n) if (t == 1 and initial is not None) else None
        actors = None
        if scheduler is not None and played is not None:
            actors = bernoulli_actors(rng, net.n, scheduler.probability(net.n))
        state, played = learning_step(state, net, cfg, rng, scales, played=forced, actors=actors, previous=played)
        if t == 1:
            trace.profiles.append(played)
            trace.potential_series.append(potential(played, net))
        trace.profiles.append(played)
        trace.potential_series.append(potential(played, net))
        history.append(state.weights)
        if t % snapshot_every == 0:
            trace.weight_snapshots.append((t, state.weights))

        if stop_on_vertex and np.all(state.weights.max(axis=1) > vertex):
            trace.outcome = "pure"
        elif t >= window and np.max(np.abs(state.weights - history[t - window])) < tol:
            trace.outcome = "pure" if np.all(state.weights.max(axis=1) > vertex) else "mixed"
        if trace.outcome is not None:
            trace.converged_at = t
            break

    if trace.weight_snapshots[-1][0] != state.t:
        trace.weight_snapshots.append((state.t, state.weights))
    trace.final_weights = state.weights
    trace.final_profile = np.argmax(state.weights, axis=1) + 1
    return trace
