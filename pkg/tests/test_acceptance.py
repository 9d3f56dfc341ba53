"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line (also repeated in
the pytest terminal summary) and then asserts the criterion.
"""

import filecmp
import functools
import time

import numpy as np
import pytest

from cogradio.cli import main
from cogradio.coding import normalized_throughput, parse_rate_table_csv
from cogradio.dynamics import Scheduler, run_learning, run_potential_game
from cogradio.experiment import ScenarioConfig, _streams, build_network, compare_schemes, initial_profile
from cogradio.game import (
    GameConfig,
    Utility,
    best_response_set,
    enumerate_pure_nash,
    generalized_potential,
    is_pure_nash,
    potential,
    utility_cooperative,
)
from cogradio.signaling import SignalingWorld, replay, tables_equal
from cogradio.topology import generate_network

from conftest import ACCEPTANCE

pytestmark = pytest.mark.slow


def verdict(number: int, ok: bool, detail: str) -> None:
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    ACCEPTANCE.append((number, "PASS" if ok else "FAIL", detail))
    assert ok, line


def _random_instance(rng, max_n, max_k):
    n = int(rng.integers(2, max_n + 1))
    k = int(rng.integers(2, max_k + 1))
    net = generate_network(rng, n, 200.0)
    return net, k, rng.integers(1, k + 1, size=n)


def test_criterion_1_exact_potential_identity():
    start = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    a_half_exact = True
    for _ in range(1000):
        net, k, s = _random_instance(rng, 12, 4)
        i = int(rng.integers(net.n))
        dev = s.copy()
        dev[i] = int(rng.integers(1, k + 1))
        d_u = utility_cooperative(i, dev, net) - utility_cooperative(i, s, net)
        scale = max(1.0, abs(potential(s, net)))
        worst = max(worst, abs(d_u - (potential(dev, net) - potential(s, net))) / scale)
        for a in (0.1, 0.3, 0.7, 0.9):
            d_gen = generalized_potential(dev, net, a) - generalized_potential(s, net, a)
            worst = max(worst, abs(d_u - d_gen) / scale)
        a_half_exact &= generalized_potential(s, net, 0.5) == potential(s, net)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and a_half_exact and elapsed < 10
    verdict(1, ok, f"max scaled |dU-dPot|={worst:.2e}, a=0.5 identical={a_half_exact}, {elapsed:.1f}s")


def test_criterion_2_potential_is_half_utility_sum():
    rng = np.random.default_rng(102)
    worst = 0.0
    for _ in range(1000):
        net, _, s = _random_instance(rng, 12, 4)
        pot = potential(s, net)
        half = 0.5 * sum(utility_cooperative(i, s, net) for i in range(net.n))
        if pot != half:
            worst = max(worst, abs(pot - half) / max(abs(pot), abs(half)))
    verdict(2, worst <= 1e-12, f"max relative error {worst:.2e}")


def test_criterion_3_sequential_convergence():
    start = time.perf_counter()
    rng = np.random.default_rng(103)
    failures = []
    for idx in range(100):
        net, k, s = _random_instance(rng, 10, 3)
        cfg = GameConfig(k, Utility.COOPERATIVE)
        trace = run_potential_game(net, cfg, Scheduler("sequential"), rng, max_slots=k**net.n * net.n + 100, initial=s)
        pots = trace.potential_series
        nash = is_pure_nash(trace.final_profile, net, cfg)
        monotone = all(b >= a for a, b in zip(pots, pots[1:]))
        listed = any(np.array_equal(trace.final_profile, e) for e in enumerate_pure_nash(net, cfg))
        if not (trace.converged and nash and monotone and listed):
            failures.append(idx)
    elapsed = time.perf_counter() - start
    verdict(3, not failures and elapsed < 30, f"{100 - len(failures)}/100 instances ok, {elapsed:.1f}s")


def test_criterion_4_bernoulli_convergence():
    converged = 0
    not_worse = 0
    for seed in range(50):
        cfg = ScenarioConfig(seed=seed, n_pairs=30, n_channels=4, area_side=200.0, p_a=1 / 30)
        net = build_network(cfg)
        rng = np.random.default_rng(_streams(seed)[2])
        trace = run_potential_game(
            net, GameConfig(4), Scheduler("bernoulli", 1 / 30), rng, max_slots=2000, initial=initial_profile(cfg, 30)
        )
        if trace.converged and is_pure_nash(trace.final_profile, net, GameConfig(4)):
            converged += 1
            not_worse += trace.potential_series[-1] >= trace.potential_series[0]
    ok = converged >= 0.95 * 50 and not_worse == converged
    verdict(4, ok, f"{converged}/50 reached a pure NE within 2000 slots, final>=initial potential in {not_worse}/{converged}")


@functools.lru_cache(maxsize=None)
def _comparison(seed: int):
    return compare_schemes(ScenarioConfig(seed=seed), ("potential", "learn_u1", "learn_u2", "random"))


def test_criterion_5_cooperative_learning():
    comps = [_comparison(seed) for seed in range(50)]
    vertex = sum(
        c.results["learn_u2"].trace.converged and bool(np.all(c.results["learn_u2"].trace.final_weights.max(axis=1) > 0.99))
        for c in comps
    )
    mean_total = {s: np.mean([c.results[s].total_throughput for c in comps]) for s in ("potential", "learn_u2", "random")}
    close = abs(mean_total["learn_u2"] - mean_total["potential"]) <= 0.15 * mean_total["potential"]
    beat_random = mean_total["learn_u2"] > mean_total["random"] and mean_total["potential"] > mean_total["random"]
    ok = vertex >= 0.9 * 50 and close and beat_random
    totals = ", ".join(f"{k}={v:.2f}" for k, v in mean_total.items())
    verdict(5, ok, f"vertex in {vertex}/50 seeds; mean totals {totals}")


def test_criterion_6_selfish_learning():
    settled = 0
    mixed_seeds = []
    for seed in range(50):
        cfg = ScenarioConfig(seed=seed, scheme="learn_u1")
        net = build_network(cfg)
        rng = np.random.default_rng(_streams(seed)[2])
        trace = run_learning(
            net,
            GameConfig(4, Utility.SELFISH),
            rng,
            beta=cfg.beta,
            max_slots=5000,
            initial=initial_profile(cfg, net.n),
            utility_scale=cfg.utility_scale,
            normalize=cfg.normalize,
            stop_on_vertex=False,
        )
        settled += trace.converged
        if np.any(trace.final_weights.max(axis=1) <= 0.99):
            mixed_seeds.append(seed)
    ok = settled == 50 and len(mixed_seeds) >= 1
    verdict(6, ok, f"weights settled in {settled}/50 seeds; seeds with a mixed final row: {len(mixed_seeds)}")


def test_criterion_7_fairness_ordering():
    comps = [_comparison(seed) for seed in range(20)]
    var = {s: np.mean([c.results[s].variance_throughput for c in comps]) for s in ("potential", "learn_u2", "learn_u1")}
    total = {s: np.mean([c.results[s].total_throughput for c in comps]) for s in ("potential", "learn_u2", "learn_u1", "random")}
    ordered = var["potential"] <= var["learn_u2"] <= var["learn_u1"]
    beat_random = all(total[s] > total["random"] for s in ("potential", "learn_u2", "learn_u1"))
    detail = "variance " + ", ".join(f"{k}={v:.4f}" for k, v in var.items())
    detail += "; totals " + ", ".join(f"{k}={v:.2f}" for k, v in total.items())
    verdict(7, ordered and beat_random, detail)


def test_criterion_8_rate_table(capsys):
    reference = [
        (2, 0.75, 6.0),
        (3, 0.5, 5.15),
        (4, 0.3125, 4.6),
        (5, 0.1875, 4.1),
        (6, 0.1094, 3.75),
        (7, 0.0625, 3.45),
        (8, 0.0352, 3.2),
        (9, 0.0195, 3.1),
        (10, 0.0107, 2.8),
    ]
    assert main(["table1"]) == 0
    dumped = [tuple(r) for r in parse_rate_table_csv(capsys.readouterr().out)]
    exact = dumped == reference
    steps_ok = True
    for idx, (_, rate, threshold) in enumerate(reference):
        below = reference[idx + 1][1] if idx + 1 < len(reference) else 0.0
        steps_ok &= normalized_throughput(threshold + 0.001) == rate
        steps_ok &= normalized_throughput(threshold) == rate
        steps_ok &= normalized_throughput(threshold - 0.001) == below
    verdict(8, exact and steps_ok, f"table rows exact={exact}, boundary steps ok={steps_ok}")


def test_criterion_9_protocol_equivalence():
    rng = np.random.default_rng(109)
    choice_ok = 0
    worst = 0.0
    for _ in range(200):
        net, k, s = _random_instance(rng, 12, 4)
        world = SignalingWorld(net, k)
        world.announce(s)
        for i in range(net.n):
            u = world.utilities(i)
            for c in range(1, k + 1):
                dev = s.copy()
                dev[i] = c
                worst = max(worst, abs(u[c - 1] - utility_cooperative(i, dev, net)))
        i = int(rng.integers(net.n))
        allowed = best_response_set(i, world.profile(), net, GameConfig(k))
        ch, _ = world.handshake(i, rng)
        choice_ok += ch in allowed

    replay_ok = 0
    for _ in range(100):
        net, k, s = _random_instance(rng, 8, 4)
        world = SignalingWorld(net, k)
        world.announce(s)
        for step in range(int(rng.integers(1, 30))):
            world.slot = step + 1
            i = int(rng.integers(net.n))
            if world.channels[i] and rng.random() < 0.3:
                world.end_call(i)
            else:
                world.handshake(i, rng)
        a, b = replay(world.log, net), replay(list(world.log), net)
        replay_ok += tables_equal(a, world.snapshot()) and tables_equal(a, b)

    ok = choice_ok == 200 and worst <= 1e-9 and replay_ok == 100
    verdict(9, ok, f"handshake choices in argmax set {choice_ok}/200, max |U2 diff|={worst:.1e}, replay {replay_ok}/100")


def test_criterion_10_reproducibility(tmp_path):
    mismatched = []
    runs = [
        ["compare", "--seed", "17", "--n", "16", "--eval-slots", "200", "--no-figures"],
        ["run", "--seed", "5", "--scheme", "learn_u1", "--no-figures"],
        ["run", "--seed", "6", "--signaling", "--no-figures"],
    ]
    compared = 0
    for idx, argv in enumerate(runs):
        a, b = tmp_path / f"{idx}a", tmp_path / f"{idx}b"
        main([*argv, "--out", str(a)])
        main([*argv, "--out", str(b)])
        for f in sorted(a.rglob("*.csv")):
            other = b / f.relative_to(a)
            compared += 1
            if not other.exists() or not filecmp.cmp(f, other, shallow=False):
                mismatched.append(str(f.relative_to(tmp_path)))
    verdict(10, compared > 0 and not mismatched, f"{compared} CSV files compared, {len(mismatched)} differ")
