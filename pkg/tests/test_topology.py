import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cogradio.errors import InvalidParameterError
from cogradio.topology import (
    Placement,
    gain_matrix,
    generate_network,
    link_gain,
    network_from_gains,
    read_gains_csv,
    read_topology_csv,
    write_gains_csv,
    write_topology_csv,
)


def test_generate_reference_scale():
    net = generate_network(7, n_pairs=30, area_side=200.0, placement=Placement.parse("disk(50)"))
    assert net.n == 30
    for pos in (net.tx_positions, net.rx_positions):
        assert pos.min() >= 0.0 and pos.max() <= 200.0
    assert np.all((net.gains > 0) & (net.gains <= 1))


def test_generate_deterministic():
    a = generate_network(7, 30, 200.0)
    b = generate_network(7, 30, 200.0)
    assert a == b
    assert np.array_equal(a.gains, b.gains)
    assert a != generate_network(8, 30, 200.0)


def test_generate_rejects_single_pair():
    with pytest.raises(InvalidParameterError):
        generate_network(7, n_pairs=1, area_side=200.0)
    with pytest.raises(InvalidParameterError):
        generate_network(7, n_pairs=5, area_side=0.0)


def test_link_gain_examples():
    assert link_gain((0, 0), (1, 0)) == 1.0
    assert link_gain((0, 0), (2, 0), alpha=4) == 0.0625
    assert link_gain((3, 3), (3, 3)) == 1.0


def test_disk_placement_radius():
    net = generate_network(1, 50, 200.0, Placement.parse("disk(20)"))
    d = np.linalg.norm(net.tx_positions - net.rx_positions, axis=1)
    assert np.all(d <= 20.0 + 1e-9) and np.all(d >= 1.0 - 1e-9)


def test_placement_parse_roundtrip():
    for text in ("disk(50)", "uniform-square", "disk(12.5)"):
        assert str(Placement.parse(text)) == text
    with pytest.raises(InvalidParameterError):
        Placement.parse("ring(3)")


def test_gain_matrix_orientation():
    net = generate_network(3, 6, 100.0)
    for i in range(6):
        for j in range(6):
            assert net.gains[i, j] == link_gain(net.pairs[i].tx_pos, net.pairs[j].rx_pos)
    assert np.array_equal(gain_matrix(net.pairs), net.gains)


def test_network_validation():
    with pytest.raises(InvalidParameterError):
        network_from_gains([[1.0, 0.0], [0.1, 1.0]])
    with pytest.raises(InvalidParameterError):
        network_from_gains([[1.0, 0.1], [0.1, 1.0]], powers=[1.0, -1.0])
    net = network_from_gains([[1.0, 0.1], [0.2, 1.0]])
    with pytest.raises(ValueError):
        net.gains[0, 1] = 0.5


def test_csv_roundtrip(tmp_path):
    net = generate_network(11, 12, 150.0)
    write_topology_csv(net, tmp_path / "topology.csv")
    write_gains_csv(net, tmp_path / "gains.csv")
    back = read_topology_csv(tmp_path / "topology.csv", area_side=150.0)
    assert back == net
    assert np.array_equal(read_gains_csv(tmp_path / "gains.csv"), net.gains)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 500), st.floats(0, 500), st.floats(2.0, 6.0))
def test_link_gain_monotone_and_bounded(d1, d2, alpha):
    g1 = link_gain((0, 0), (d1, 0), alpha)
    g2 = link_gain((0, 0), (d2, 0), alpha)
    assert 0 < g1 <= 1 and 0 < g2 <= 1
    if d1 <= d2:
        assert g1 >= g2
