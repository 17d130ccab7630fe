import math

import numpy as np
import pytest

from slicemarket.randomness import RngStream, RunStreams, sample_exponential_slots, sample_poisson


def test_poisson_zero_rate_is_zero():
    stream = RngStream(seed=1, stream_id=0)
    assert all(sample_poisson(stream, 0.0) == 0 for _ in range(100))


def test_poisson_rejects_negative_rate():
    stream = RngStream(seed=1, stream_id=0)
    with pytest.raises(ValueError):
        sample_poisson(stream, -0.5)


def test_poisson_sample_mean_matches_rate():
    stream = RngStream(seed=42, stream_id=1)
    n = 100_000
    rate = 5.0
    draws = [sample_poisson(stream, rate) for _ in range(n)]
    se = math.sqrt(rate / n)  # Poisson variance equals the rate
    assert abs(np.mean(draws) - rate) < 3 * se


def test_fixed_seed_reproduces_sequence():
    first = RngStream(seed=9, stream_id=3)
    second = RngStream(seed=9, stream_id=3)
    seq1 = [sample_poisson(first, 4.0) for _ in range(10)]
    seq2 = [sample_poisson(second, 4.0) for _ in range(10)]
    assert seq1 == seq2


def test_exponential_slots_at_least_one():
    stream = RngStream(seed=5, stream_id=2)
    draws = [sample_exponential_slots(stream, 0.01) for _ in range(10_000)]
    assert min(draws) >= 1


def test_exponential_slots_rejects_nonpositive_mean():
    stream = RngStream(seed=5, stream_id=2)
    with pytest.raises(ValueError):
        sample_exponential_slots(stream, 0.0)


def test_exponential_slot_mean_matches_geometric_oracle():
    # Ceiling an Exponential(mean m) draw gives a geometric distribution on
    # {1, 2, ...} with success probability 1 - exp(-1/m); its mean and
    # variance are known in closed form, which is the independent oracle.
    mean = 4.0
    q = math.exp(-1.0 / mean)
    expected = 1.0 / (1.0 - q)
    var = q / (1.0 - q) ** 2
    n = 100_000
    stream = RngStream(seed=11, stream_id=4)
    draws = [sample_exponential_slots(stream, mean) for _ in range(n)]
    assert abs(np.mean(draws) - expected) < 3 * math.sqrt(var / n)


def test_exponential_smaller_mean_dominates_cdf():
    n = 10_000
    stream_small, stream_large = RngStream(3, 7), RngStream(3, 8)
    small = [sample_exponential_slots(stream_small, 3.0) for _ in range(n)]
    large = [sample_exponential_slots(stream_large, 4.0) for _ in range(n)]
    slack = 3 * math.sqrt(0.25 / n)
    strictly_above = False
    for k in range(1, 21):
        f_small = np.mean([d <= k for d in small])
        f_large = np.mean([d <= k for d in large])
        assert f_small >= f_large - slack
        if f_small > f_large + slack:
            strictly_above = True
    assert strictly_above


def test_streams_are_independent():
    a1 = RngStream(seed=21, stream_id=100)
    b1 = RngStream(seed=21, stream_id=200)
    ref_b = [b1.uniform() for _ in range(20)]

    a2 = RngStream(seed=21, stream_id=100)
    b2 = RngStream(seed=21, stream_id=200)
    interleaved = []
    for i in range(20):
        a2.uniform()  # consuming A must not perturb B
        interleaved.append(b2.uniform())
    assert interleaved == ref_b
    assert [a1.uniform() for _ in range(5)] != ref_b[:5]


def test_run_streams_key_roles_and_entities():
    streams = RunStreams(seed=13)
    arr3 = streams.arrivals(3).poisson_array(2.0, 50)
    arr4 = streams.arrivals(4).poisson_array(2.0, 50)
    assert not np.array_equal(arr3, arr4)
    again = RunStreams(seed=13).arrivals(3).poisson_array(2.0, 50)
    assert np.array_equal(arr3, again)
