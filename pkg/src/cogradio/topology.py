"""Random fixed ad hoc topologies and the link-gain matrix."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError

DEFAULT_ALPHA = 4.0
DEFAULT_REF_DIST = 1.0
DEFAULT_DISK_RADIUS = 50.0


@dataclass(frozen=True)
class Placement:
    """Receiver placement rule.

    ``mode`` is ``"uniform-square"`` (receiver anywhere in the square) or
    ``"disk"`` (receiver uniform over the annulus [ref_dist, radius]
    around its own transmitter).
    """

    mode: str = "disk"
    radius: float = DEFAULT_DISK_RADIUS

    @classmethod
    def parse(cls, text: str) -> "Placement":
        text = text.strip().lower()
        if text in ("uniform-square", "uniform", "square"):
            return cls("uniform-square")
        if text.startswith("disk"):
            inner = text[4:].strip("() ")
            radius = float(inner) if inner else DEFAULT_DISK_RADIUS
            return cls("disk", radius)
        raise InvalidParameterError(f"unknown placement {text!r}")

    def __str__(self) -> str:
        if self.mode == "disk":
            return f"disk({self.radius:g})"
        return self.mode


@dataclass(frozen=True)
class NodePair:
    id: int
    tx_pos: tuple[float, float]
    rx_pos: tuple[float, float]


@dataclass(frozen=True, eq=False)
class Network:
    """N transmitter/receiver pairs with their gain matrix.

    ``gains[i, j]`` is the linear gain from transmitter ``i`` to the
    receiver of pair ``j``; the diagonal holds the desired links.
    Pair ids are 1-based, array indices 0-based.
    """

    pairs: tuple[NodePair, ...]
    area_side: float
    gains: np.ndarray
    powers: np.ndarray

    def __post_init__(self):
        n = len(self.pairs)
        if n < 2:
            raise InvalidParameterError("a network needs at least 2 pairs")
        if self.gains.shape != (n, n) or self.powers.shape != (n,):
            raise InvalidParameterError("gain/power shapes do not match the pair count")
        if not np.all(np.isfinite(self.gains)) or np.any(self.gains <= 0) or np.any(self.gains > 1):
            raise InvalidParameterError("gains must lie in (0, 1]")
        if np.any(self.powers <= 0):
            raise InvalidParameterError("powers must be strictly positive")
        self.gains.setflags(write=False)
        self.powers.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.pairs)

    @property
    def tx_positions(self) -> np.ndarray:
        return np.array([p.tx_pos for p in self.pairs])

    @property
    def rx_positions(self) -> np.ndarray:
        return np.array([p.rx_pos for p in self.pairs])

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.pairs == other.pairs
            and self.area_side == other.area_side
            and np.array_equal(self.gains, other.gains)
            and np.array_equal(self.powers, other.powers)
        )


def link_gain(tx_pos, rx_pos, alpha: float = DEFAULT_ALPHA, ref_dist: float = DEFAULT_REF_DIST) -> float:
    """Power-law path loss ``min(1, (d / ref_dist) ** -alpha)``.

    Distances below ``ref_dist`` are clamped, so the gain never exceeds 1.
    """
    if alpha <= 0 or ref_dist <= 0:
        raise InvalidParameterError("alpha and ref_dist must be positive")
    d = math.hypot(tx_pos[0] - rx_pos[0], tx_pos[1] - rx_pos[1])
    d = max(d, ref_dist)
    return min(1.0, (d / ref_dist) ** (-alpha))


def gain_matrix(pairs, alpha: float = DEFAULT_ALPHA, ref_dist: float = DEFAULT_REF_DIST) -> np.ndarray:
    n = len(pairs)
    g = np.empty((n, n))
    for i, a in enumerate(pairs):
        for j, b in enumerate(pairs):
            g[i, j] = link_gain(a.tx_pos, b.rx_pos, alpha, ref_dist)
    return g


def _place_receiver(rng, tx, area_side, placement, ref_dist):
    while True:
        if placement.mode == "disk":
            r = math.sqrt(rng.uniform(ref_dist**2, placement.radius**2))
            theta = rng.uniform(0.0, 2 * math.pi)
            rx = (tx[0] + r * math.cos(theta), tx[1] + r * math.sin(theta))
            if not (0 <= rx[0] <= area_side and 0 <= rx[1] <= area_side):
                continue
        else:
            rx = (rng.uniform(0, area_side), rng.uniform(0, area_side))
        if math.hypot(rx[0] - tx[0], rx[1] - tx[1]) >= ref_dist:
            return rx


def generate_network(
    seed,
    n_pairs: int = 30,
    area_side: float = 200.0,
    placement: Placement | str = Placement(),
    alpha: float = DEFAULT_ALPHA,
    ref_dist: float = DEFAULT_REF_DIST,
) -> Network:
    """Draw a random topology; identical arguments give an identical network.

    ``seed`` may be an int, a ``SeedSequence`` or a ``Generator``.
    """
    if n_pairs < 2:
        raise InvalidParameterError("n_pairs must be >= 2")
    if area_side <= 0 or alpha <= 0 or ref_dist <= 0:
        raise InvalidParameterError("area_side, alpha and ref_dist must be positive")
    if isinstance(placement, str):
        placement = Placement.parse(placement)
    if placement.mode == "disk" and placement.radius <= ref_dist:
        raise InvalidParameterError("disk radius must exceed ref_dist")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)

    pairs = []
    for idx in range(n_pairs):
        tx = (float(rng.uniform(0, area_side)), float(rng.uniform(0, area_side)))
        rx = _place_receiver(rng, tx, area_side, placement, ref_dist)
        pairs.append(NodePair(idx + 1, tx, (float(rx[0]), float(rx[1]))))
    pairs = tuple(pairs)
    return Network(pairs, float(area_side), gain_matrix(pairs, alpha, ref_dist), np.ones(n_pairs))


def network_from_gains(gains, powers=None) -> Network:
    """Wrap an explicit gain matrix (positions are placeholders)."""
    gains = np.array(gains, dtype=float)
    n = gains.shape[0]
    powers = np.ones(n) if powers is None else np.array(powers, dtype=float)
    pairs = tuple(NodePair(i + 1, (0.0, 0.0), (0.0, 0.0)) for i in range(n))
    return Network(pairs, 1.0, gains, powers)


def write_topology_csv(net: Network, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["id", "tx_x", "tx_y", "rx_x", "rx_y"])
        for p in net.pairs:
            w.writerow([p.id, repr(p.tx_pos[0]), repr(p.tx_pos[1]), repr(p.rx_pos[0]), repr(p.rx_pos[1])])


def write_gains_csv(net: Network, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in net.gains:
            w.writerow([repr(float(x)) for x in row])


def read_topology_csv(path, area_side: float, alpha: float = DEFAULT_ALPHA, ref_dist: float = DEFAULT_REF_DIST) -> Network:
    """Rebuild a network from a topology CSV, recomputing gains from positions."""
    pairs = []
    with open(Path(path), newline="") as fh:
        for row in csv.DictReader(fh):
            pairs.append(
                NodePair(
                    int(row["id"]),
                    (float(row["tx_x"]), float(row["tx_y"])),
                    (float(row["rx_x"]), float(row["rx_y"])),
                )
            )
    pairs = tuple(pairs)
    return Network(pairs, float(area_side), gain_matrix(pairs, alpha, ref_dist), np.ones(len(pairs)))


def read_gains_csv(path) -> np.ndarray:
    with open(Path(path), newline="") as fh:
        return np.array([[float(x) for x in row] for row in csv.reader(fh) if row])
