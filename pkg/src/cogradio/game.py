"""Channel-selection game: interference, SIR, utilities, potential, equilibria.

Strategy profiles are integer vectors with 1-based channels (``s[i]`` in
``1..K``); user indices are 0-based. All quantities are linear powers.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import EnumerationTooLargeError, InvalidParameterError
from .topology import Network

INF = math.inf
ENUMERATION_CAP = 10**6


class Utility(str, enum.Enum):
    SELFISH = "U1"
    COOPERATIVE = "U2"


@dataclass(frozen=True)
class GameConfig:
    n_channels: int
    utility: Utility = Utility.COOPERATIVE

    def __post_init__(self):
        if self.n_channels < 1:
            raise InvalidParameterError("need at least one channel")
        object.__setattr__(self, "utility", Utility(self.utility))


def as_profile(channels, n_channels: int | None = None, n_users: int | None = None) -> np.ndarray:
    s = np.asarray(channels, dtype=np.int64).reshape(-1)
    if n_users is not None and s.size != n_users:
        raise InvalidParameterError(f"profile has {s.size} entries, expected {n_users}")
    if s.size and s.min() < 1:
        raise InvalidParameterError("channels are numbered from 1")
    if n_channels is not None and s.size and s.max() > n_channels:
        raise InvalidParameterError(f"channel exceeds K={n_channels}")
    return s


def random_profile(rng, n_users: int, n_channels: int) -> np.ndarray:
    return rng.integers(1, n_channels + 1, size=n_users)


def co_channel(s_i: int, s_j: int) -> int:
    return int(s_i == s_j)


def _cross(net: Network) -> np.ndarray:
    # cross[j, i] = p_j * G[j, i] for j != i, zero on the diagonal
    c = net.powers[:, None] * net.gains
    np.fill_diagonal(c, 0.0)
    return c


def interference_terms(profile, net: Network, n_channels: int) -> tuple[np.ndarray, np.ndarray]:
    """Incoming and outgoing co-channel interference per (user, channel).

    ``incoming[i, k]`` is the power that would reach receiver ``i`` if user
    ``i`` sat on channel ``k+1`` with everyone else fixed; ``outgoing[i, k]``
    is what transmitter ``i`` would put into the receivers on that channel.
    Sums run over users in index order.
    """
    s = as_profile(profile, n_channels, net.n)
    cross = _cross(net)
    incoming = np.zeros((net.n, n_channels))
    outgoing = np.zeros((net.n, n_channels))
    for k in range(n_channels):
        mask = s == k + 1
        incoming[:, k] = cross[mask, :].sum(axis=0)
        outgoing[:, k] = cross[:, mask].sum(axis=1)
    return incoming, outgoing


def channel_utilities(profile, net: Network, cfg: GameConfig) -> np.ndarray:
    """N x K matrix: utility of user i for each channel, opponents fixed."""
    incoming, outgoing = interference_terms(profile, net, cfg.n_channels)
    if cfg.utility is Utility.SELFISH:
        return -incoming
    return -(incoming + outgoing)


def _own_terms(profile, net):
    s = as_profile(profile, n_users=net.n)
    incoming, outgoing = interference_terms(s, net, int(s.max()))
    rows = np.arange(net.n)
    return incoming[rows, s - 1], outgoing[rows, s - 1]


def sir(i: int, profile, net: Network) -> float:
    """Linear SIR at the receiver of pair ``i``; ``INF`` with no co-channel interferer."""
    s = as_profile(profile, n_users=net.n)
    interferers = [k for k in range(net.n) if k != i and s[k] == s[i]]
    if not interferers:
        return INF
    denom = sum(net.powers[k] * net.gains[k, i] for k in interferers)
    return float(net.powers[i] * net.gains[i, i] / denom)


def sir_all(profile, net: Network) -> np.ndarray:
    s = as_profile(profile, n_users=net.n)
    incoming, _ = _own_terms(s, net)
    signal = net.powers * np.diag(net.gains)
    with np.errstate(divide="ignore"):
        out = np.where(incoming > 0, signal / np.where(incoming > 0, incoming, 1.0), INF)
    return out


def utility_selfish(i: int, profile, net: Network) -> float:
    s = as_profile(profile, n_users=net.n)
    return -float(sum(net.powers[j] * net.gains[j, i] * co_channel(s[j], s[i]) for j in range(net.n) if j != i))


def utility_cooperative(i: int, profile, net: Network) -> float:
    s = as_profile(profile, n_users=net.n)
    out = sum(net.powers[i] * net.gains[i, j] * co_channel(s[i], s[j]) for j in range(net.n) if j != i)
    return utility_selfish(i, s, net) - float(out)


def utility(i: int, profile, net: Network, cfg: GameConfig) -> float:
    if cfg.utility is Utility.SELFISH:
        return utility_selfish(i, profile, net)
    return utility_cooperative(i, profile, net)


def potential(profile, net: Network) -> float:
    """Network potential: minus the total co-channel interference power,
    counted half at each end of every interfering link."""
    incoming, outgoing = _own_terms(profile, net)
    return float(np.sum(-0.5 * incoming - 0.5 * outgoing))


def generalized_potential(profile, net: Network, a: float) -> float:
    """Potential family weighting incoming interference by ``a`` and outgoing
    by ``1 - a``; every member is an exact potential for the cooperative game."""
    if not 0.0 < a < 1.0:
        raise InvalidParameterError("a must lie strictly between 0 and 1")
    incoming, outgoing = _own_terms(profile, net)
    return float(np.sum(-a * incoming - (1.0 - a) * outgoing))


def best_response_set(i: int, profile, net: Network, cfg: GameConfig) -> list[int]:
    """All channels maximizing user ``i``'s utility (exact float comparison)."""
    row = channel_utilities(profile, net, cfg)[i]
    best = row.max()
    return [k + 1 for k in range(cfg.n_channels) if row[k] == best]


def pick_best(values, rng) -> int:
    """1-based index of the maximum; ties drawn uniformly from ``rng``.

    ``rng`` is only consumed when there is a tie.
    """
    values = np.asarray(values)
    best = np.flatnonzero(values == values.max())
    if best.size == 1:
        return int(best[0]) + 1
    return int(best[rng.integers(best.size)]) + 1


def best_response(i: int, profile, net: Network, cfg: GameConfig, rng) -> int:
    """Utility-maximizing channel for user ``i``; ties drawn uniformly from ``rng``."""
    return pick_best(channel_utilities(profile, net, cfg)[i], rng)


def is_pure_nash(profile, net: Network, cfg: GameConfig) -> bool:
    s = as_profile(profile, cfg.n_channels, net.n)
    u = channel_utilities(s, net, cfg)
    current = u[np.arange(net.n), s - 1]
    return bool(np.all(u.max(axis=1) <= current))


def enumerate_pure_nash(net: Network, cfg: GameConfig, cap: int = ENUMERATION_CAP) -> list[np.ndarray]:
    """Every pure Nash equilibrium, by exhaustive scan of all K**N profiles."""
    if cfg.n_channels**net.n > cap:
        raise EnumerationTooLargeError(f"K^N = {cfg.n_channels}^{net.n} exceeds cap {cap}")
    k = cfg.n_channels
    cross = _cross(net)
    scale = max(float(cross.sum()), 1e-300)
    found = []
    # Batched screen with a small slack, then exact confirmation so the
    # result agrees bit-for-bit with is_pure_nash.
    for chunk in _profile_chunks(net.n, k):
        onehot = np.eye(k)[chunk]  # (M, N, K)
        incoming = np.einsum("ji,mjk->mik", cross, onehot)
        u = -incoming
        if cfg.utility is Utility.COOPERATIVE:
            u = u - np.einsum("ij,mjk->mik", cross, onehot)
        current = np.take_along_axis(u, chunk[:, :, None], axis=2)[:, :, 0]
        ok = np.all(u.max(axis=2) <= current + 1e-12 * scale, axis=1)
        for row in chunk[ok]:
            s = row.astype(np.int64) + 1
            if is_pure_nash(s, net, cfg):
                found.append(s)
    return found


def _profile_chunks(n: int, k: int, size: int = 20000):
    total = k**n
    powers = k ** np.arange(n - 1, -1, -1)
    for start in range(0, total, size):
        idx = np.arange(start, min(start + size, total))
        yield (idx[:, None] // powers[None, :]) % k


def format_profile(profile) -> str:
    return ",".join(str(int(c)) for c in profile)


def parse_profile(row: str) -> np.ndarray:
    return as_profile([int(x) for x in row.strip().split(",") if x])
