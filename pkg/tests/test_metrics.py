import pytest
from hypothesis import given, strategies as st

from cogradio.errors import InvalidParameterError
from cogradio.metrics import empirical_cdf, fraction_below, histogram, jain_index, summary_stats


def test_cdf_examples():
    assert empirical_cdf([5]) == [(5.0, 1.0)]
    assert dict(empirical_cdf([1, 2, 2, 4]))[2.0] == 0.75
    with pytest.raises(InvalidParameterError):
        empirical_cdf([])


def test_summary_examples():
    assert summary_stats([1, 1, 1]) == (1.0, 0.0, 3.0)
    assert summary_stats([0, 2]) == (1.0, 1.0, 2.0)
    with pytest.raises(InvalidParameterError):
        summary_stats([])


def test_fraction_below_and_histogram():
    assert fraction_below([0.1, 0.2, 0.5, 0.75], 0.3) == 0.5
    counts, edges = histogram([1.0, 2.0, float("inf"), 2.5], bins=2, value_range=(0, 4))
    assert list(counts) == [1, 2] and list(edges) == [0, 2, 4]


def test_jain():
    assert jain_index([1, 1, 1, 1]) == 1.0
    assert jain_index([1, 0, 0, 0]) == 0.25
    assert jain_index([0, 0]) == 0.0


values = st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50)


@given(values)
def test_cdf_valid(xs):
    cdf = empirical_cdf(xs)
    fr = [f for _, f in cdf]
    assert all(0 < f <= 1 for f in fr)
    assert fr == sorted(fr) and fr[-1] == 1.0
    assert [x for x, _ in cdf] == sorted(set(float(x) for x in xs))


@given(values)
def test_total_is_mean_times_n(xs):
    mean, var, total = summary_stats(xs)
    assert var >= 0
    assert total == pytest.approx(mean * len(xs), rel=1e-9, abs=1e-6)
