"""Common-control-channel etiquette.

Each pair runs a three-way call setup (START, START_CH, ACK_START_CH) and
a two-way teardown (END, ACK_END). Every node keeps a Channel Status Table
built from the packets it overhears:

* a transmitter's table (CST_t) holds, per neighbour pair, its channel and
  the gain from this transmitter to that pair's receiver, measured on the
  neighbour receiver's START_CH (path loss is reciprocal);
* a receiver's table (CST_r) holds the channel and the gain from the
  neighbour's transmitter to this receiver, measured on its ACK_START_CH.

Control packets go out at ``ratio`` times the data power and the control
channel is collision free.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import RunTrace, Scheduler, STABILITY_WINDOW, bernoulli_actors
from .errors import InvalidParameterError, InvalidStateError, PacketNotHeard
from .game import GameConfig, Utility, as_profile, is_pure_nash, pick_best, potential
from .topology import Network

START = "START"
START_CH = "START_CH"
ACK_START_CH = "ACK_START_CH"
END = "END"
ACK_END = "ACK_END"
PACKET_KINDS = (START, START_CH, ACK_START_CH, END, ACK_END)

TX = "tx"
RX = "rx"

# Which node sends each packet, and which side of the other pairs learns from it.
_SENDER_SIDE = {START: TX, START_CH: RX, ACK_START_CH: TX, END: TX, ACK_END: RX}
_LISTENER_SIDE = {START_CH: TX, ACK_START_CH: RX, END: RX, ACK_END: TX}


@dataclass(frozen=True)
class ProbePowerConfig:
    ratio: float = 2.0
    hear_threshold: float = 0.0
    noise_db: float = 0.0  # std of a log-normal measurement error; 0 disables it

    def __post_init__(self):
        if self.ratio < 1:
            raise InvalidParameterError("signaling/data power ratio must be >= 1")
        if self.hear_threshold < 0 or self.noise_db < 0:
            raise InvalidParameterError("hear_threshold and noise_db must be non-negative")


@dataclass(frozen=True)
class SignalingPacket:
    slot: int
    seq: int
    kind: str
    sender_pair: int  # 1-based pair id
    channel: int | None = None
    payload: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in PACKET_KINDS:
            raise InvalidParameterError(f"unknown packet kind {self.kind!r}")


@dataclass
class ChannelStatusTable:
    side: str
    entries: dict[int, tuple[int, float]] = field(default_factory=dict)  # pair index -> (channel, gain)

    def copy(self) -> "ChannelStatusTable":
        return ChannelStatusTable(self.side, dict(self.entries))


def node_gain(sender: tuple[int, str], listener: tuple[int, str], net: Network) -> float:
    """Gain between a transmitter and a receiver node, in either direction."""
    (a, side_a), (b, side_b) = sender, listener
    if side_a == side_b:
        raise InvalidParameterError("only transmitter<->receiver links are modelled")
    return float(net.gains[a, b] if side_a == TX else net.gains[b, a])


def observe_probe(listener: tuple[int, str], sender: tuple[int, str], probe_cfg: ProbePowerConfig, net: Network, rng=None) -> float:
    """Estimate the link gain from an overheard control packet.

    The received power is divided by the known control power, so without
    measurement noise this returns the true gain.
    """
    p_sender = float(net.powers[sender[0]])
    received = probe_cfg.ratio * p_sender * node_gain(sender, listener, net)
    if received < probe_cfg.hear_threshold:
        raise PacketNotHeard(f"{sender} -> {listener}: {received:.3g} below threshold")
    est = received / (probe_cfg.ratio * p_sender)
    if probe_cfg.noise_db > 0:
        if rng is None:
            raise InvalidParameterError("measurement noise needs an rng")
        est *= 10.0 ** (rng.normal(0.0, probe_cfg.noise_db) / 10.0)
    return est


def estimate_incoming(receiver_cst: ChannelStatusTable, net: Network, n_channels: int) -> np.ndarray:
    """Interference per channel at a receiver, from its CST_r."""
    out = np.zeros(n_channels)
    for j in sorted(receiver_cst.entries):
        ch, g = receiver_cst.entries[j]
        out[ch - 1] += net.powers[j] * g
    return out


def estimate_outgoing(transmitter_cst: ChannelStatusTable, p_self: float, n_channels: int) -> np.ndarray:
    """Interference a transmitter would cause per channel, from its CST_t."""
    out = np.zeros(n_channels)
    for j in sorted(transmitter_cst.entries):
        ch, g = transmitter_cst.entries[j]
        out[ch - 1] += p_self * g
    return out


class SignalingWorld:
    """Node states, channel assignments and the packet log of one run.

    Pairs are addressed by 0-based index; packets carry 1-based ids.
    """

    def __init__(self, net: Network, n_channels: int, probe_cfg: ProbePowerConfig | None = None, rng=None):
        if n_channels < 1:
            raise InvalidParameterError("need at least one channel")
        self.net = net
        self.n_channels = n_channels
        self.probe_cfg = probe_cfg or ProbePowerConfig()
        self.noise_rng = rng
        self.channels = np.zeros(net.n, dtype=np.int64)  # 0 = no active call
        self.cst = {(i, side): ChannelStatusTable(side) for i in range(net.n) for side in (TX, RX)}
        self.log: list[SignalingPacket] = []
        self.slot = 0
        self._seq = 0

    @property
    def active(self) -> np.ndarray:
        return self.channels > 0

    def profile(self) -> np.ndarray:
        if not np.all(self.active):
            raise InvalidStateError("not every pair holds a channel")
        return self.channels.copy()

    def _emit(self, kind: str, pair: int, channel=None, payload=()) -> SignalingPacket:
        pkt = SignalingPacket(self.slot, self._seq, kind, pair + 1, channel, tuple(payload))
        self._seq += 1
        self.log.append(pkt)
        apply_packet(self.cst, pkt, self.net, self.probe_cfg, self.noise_rng)
        return pkt

    def utilities(self, pair: int) -> np.ndarray:
        """Cooperative utility of every channel, as the pair estimates it."""
        i_o = estimate_outgoing(self.cst[(pair, TX)], float(self.net.powers[pair]), self.n_channels)
        i_d = estimate_incoming(self.cst[(pair, RX)], self.net, self.n_channels)
        return -(i_d + i_o)

    def handshake(self, pair: int, rng, channel: int | None = None) -> tuple[int, list[SignalingPacket]]:
        """Run call setup for ``pair``; returns the chosen channel and its packets.

        The receiver picks the channel with the least estimated incoming plus
        outgoing interference. ``channel`` forces the choice (used to announce
        a prescribed starting allocation).
        """
        start = len(self.log)
        p_self = float(self.net.powers[pair])
        i_o = estimate_outgoing(self.cst[(pair, TX)], p_self, self.n_channels)
        self._emit(START, pair, payload=i_o)
        if channel is None:
            i_d = estimate_incoming(self.cst[(pair, RX)], self.net, self.n_channels)
            channel = pick_best(-(i_d + i_o), rng)
        elif not 1 <= channel <= self.n_channels:
            raise InvalidParameterError(f"channel {channel} outside 1..{self.n_channels}")
        self._emit(START_CH, pair, channel=channel)
        self._emit(ACK_START_CH, pair, channel=channel)
        self.channels[pair] = channel
        return channel, self.log[start:]

    def end_call(self, pair: int) -> list[SignalingPacket]:
        if self.channels[pair] == 0:
            raise InvalidStateError(f"pair {pair + 1} has no active call")
        start = len(self.log)
        self._emit(END, pair)
        self._emit(ACK_END, pair)
        self.channels[pair] = 0
        return self.log[start:]

    def announce(self, profile) -> None:
        """Bring every pair up on the channels of ``profile``, in index order."""
        s = as_profile(profile, self.n_channels, self.net.n)
        for i in range(self.net.n):
            self.handshake(i, None, channel=int(s[i]))

    def snapshot(self) -> dict:
        return {key: table.copy() for key, table in self.cst.items()}


def apply_packet(cst: dict, pkt: SignalingPacket, net: Network, probe_cfg: ProbePowerConfig, rng=None) -> None:
    """Update every table whose node overhears ``pkt``."""
    listener_side = _LISTENER_SIDE.get(pkt.kind)
    if listener_side is None:
        return
    sender = (pkt.sender_pair - 1, _SENDER_SIDE[pkt.kind])
    for j in range(net.n):
        if j == sender[0]:
            continue
        node = (j, listener_side)
        try:
            est = observe_probe(node, sender, probe_cfg, net, rng)
        except PacketNotHeard:
            continue
        if pkt.kind in (START_CH, ACK_START_CH):
            cst[node].entries[sender[0]] = (pkt.channel, est)
        else:
            cst[node].entries.pop(sender[0], None)


def replay(log, net: Network, probe_cfg: ProbePowerConfig | None = None) -> dict:
    """Rebuild all tables from a packet log (noise-free measurements)."""
    probe_cfg = probe_cfg or ProbePowerConfig()
    if probe_cfg.noise_db > 0:
        raise InvalidParameterError("replay is defined for noise-free probes only")
    cst = {(i, side): ChannelStatusTable(side) for i in range(net.n) for side in (TX, RX)}
    for pkt in log:
        apply_packet(cst, pkt, net, probe_cfg)
    return cst


def run_protocol_game(
    net: Network,
    n_channels: int,
    scheduler: Scheduler,
    rng,
    max_slots: int,
    initial,
    probe_cfg: ProbePowerConfig | None = None,
    window: int = STABILITY_WINDOW,
) -> tuple[RunTrace, SignalingWorld]:
    """Best-response play where every decision is a handshake.

    Scheduled pairs signal one after another within a slot, so later actors
    see earlier actors' announcements.
    """
    world = SignalingWorld(net, n_channels, probe_cfg, rng)
    world.announce(initial)
    cfg = GameConfig(n_channels, Utility.COOPERATIVE)
    s = world.profile()
    trace = RunTrace(profiles=[s], potential_series=[potential(s, net)])
    streak_start = 0 if is_pure_nash(s, net, cfg) else None
    for t in range(1, max_slots + 1):
        if streak_start is not None and t - streak_start >= window:
            break
        world.slot = t
        if scheduler.mode == "sequential":
            actors = [(t - 1) % net.n]
        else:
            actors = bernoulli_actors(rng, net.n, scheduler.probability(net.n))
        for i in actors:
            world.handshake(int(i), rng)
        s = world.profile()
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
    return trace, world


def write_packet_log_csv(log, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["slot", "seq", "kind", "sender_pair", "channel", "payload_summary"])
        for p in log:
            summary = ";".join(f"{x:.6g}" for x in p.payload)
            w.writerow([p.slot, p.seq, p.kind, p.sender_pair, "" if p.channel is None else p.channel, summary])


def read_packet_log_csv(path) -> list[SignalingPacket]:
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            payload = tuple(float(x) for x in row["payload_summary"].split(";") if x)
            out.append(
                SignalingPacket(
                    int(row["slot"]),
                    int(row["seq"]),
                    row["kind"],
                    int(row["sender_pair"]),
                    int(row["channel"]) if row["channel"] else None,
                    payload,
                )
            )
    return out


def tables_equal(a: dict, b: dict, tol: float = 0.0) -> bool:
    if a.keys() != b.keys():
        return False
    for key in a:
        ea, eb = a[key].entries, b[key].entries
        if ea.keys() != eb.keys():
            return False
        for j in ea:
            if ea[j][0] != eb[j][0] or not math.isclose(ea[j][1], eb[j][1], rel_tol=tol, abs_tol=0.0):
                return False
    return True
