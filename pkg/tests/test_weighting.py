import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from sosnet.errors import ConfigError, DegenerateInputError
from sosnet.model import Bundle, NodeProfile
from sosnet.weighting import (FeatureVector, buffer_ratio, carried_ttl_ratio, closeness_from_rd,
                              composite_weight, cooperation, cooperation_threshold, energy_ratio,
                              features, node_degree, relative_distance, ttl_ratio)

from conftest import make_world


def profile(energy=90.0, emax=90.0, buf=4096.0, bmax=4096.0, contacts=0):
    return NodeProfile(0, energy, emax, buf, bmax, (0.0, 0.0), contacts=contacts)


@pytest.mark.parametrize("now,expected", [(45.0, 0.5), (90.0, 1.0), (0.0, 0.0)])
def test_energy_ratio(now, expected):
    assert energy_ratio(profile(energy=now)) == expected


def test_energy_ratio_zero_max():
    with pytest.raises(DegenerateInputError):
        energy_ratio(profile(energy=0.0, emax=0.0))


@pytest.mark.parametrize("now,expected", [(1024.0, 0.25), (0.0, 0.0), (4096.0, 1.0)])
def test_buffer_ratio(now, expected):
    assert buffer_ratio(profile(buf=now)) == expected


def test_buffer_ratio_zero_max():
    with pytest.raises(DegenerateInputError):
        buffer_ratio(profile(buf=0.0, bmax=0.0))


@pytest.mark.parametrize("remaining,expected", [(30.0, 0.5), (0.0, 0.0), (60.0, 1.0)])
def test_ttl_ratio(remaining, expected):
    b = Bundle.create(0, 0, 1, 0.0, 60.0, 10)
    b.ttl_remaining = remaining
    assert ttl_ratio(b) == expected


def test_ttl_ratio_zero_total():
    b = Bundle(0, 0, 1, 0.0, 0.0, 0.0, 10)
    with pytest.raises(DegenerateInputError):
        ttl_ratio(b)


def test_carried_ttl_ratio_mean_and_empty():
    a = Bundle.create(0, 0, 1, 0.0, 60.0, 10)
    b = Bundle.create(1, 0, 1, 0.0, 60.0, 10)
    b.ttl_remaining = 0.0
    assert carried_ttl_ratio([a, b]) == 0.5
    assert carried_ttl_ratio([]) == 1.0


def test_node_degree_line(line_world):
    d = node_degree(0, line_world)
    assert d.count == 2
    assert math.isclose(d.normalized, 2 / 3)


def test_node_degree_coincident():
    w = make_world([(5, 5)] * 6)
    d = node_degree(3, w)
    assert d.count == 5 and d.normalized == 1.0


def test_node_degree_zero_range():
    w = make_world([(0, 0), (0, 0), (1, 0)], t_range=0.0)
    assert node_degree(0, w).count == 0


def test_node_degree_unknown_node(line_world):
    with pytest.raises(KeyError):
        node_degree(17, line_world)


def test_relative_distance_345():
    # neighbors placed so the centroid of the group lands on the origin
    w = make_world([(3, 4), (-3, -4), (0, 0)], t_range=50.0, area=(100.0, 100.0))
    rd = relative_distance(0, w)
    assert math.isclose(rd.meters, 5.0)


def test_relative_distance_at_centroid():
    w = make_world([(50, 50), (40, 50), (60, 50)], t_range=50.0)
    rd = relative_distance(0, w)
    assert rd.meters == 0.0 and rd.closeness == 1.0


def test_relative_distance_one_neighbor():
    w = make_world([(100, 0), (0, 0)], t_range=150.0)
    rd = relative_distance(0, w)
    assert math.isclose(rd.meters, 50.0)
    assert math.isclose(rd.closeness, 1 - 50.0 / math.hypot(500, 500))


def test_isolated_node_is_flagged_peripheral():
    w = make_world([(0, 0), (400, 400)], t_range=10.0)
    rd = relative_distance(0, w)
    assert rd.isolated and rd.closeness == 0.0


def test_closeness_inversion_flag():
    assert closeness_from_rd(0.0, 100.0, centrality=False) == 0.0
    assert math.isclose(closeness_from_rd(25.0, 100.0, centrality=False), 0.25)


def test_composite_weight_examples():
    ones = FeatureVector(1, 1, 1, 1, 1)
    zeros = FeatureVector(0, 0, 0, 0, 0)
    assert composite_weight(ones, (0.1, 0.2, 0.3, 0.15, 0.25)) == pytest.approx(1.0, abs=1e-12)
    assert composite_weight(zeros, (0.2,) * 5) == 0.0
    f = FeatureVector(0.5, 0.25, 1.0, 0.5, 0.8)
    assert composite_weight(f, (0.2,) * 5) == pytest.approx(0.61, abs=1e-12)


def test_composite_weight_rejects_bad_coeffs():
    with pytest.raises(ConfigError):
        composite_weight(FeatureVector(1, 1, 1, 1, 1), (0.5, 0.5))


@pytest.mark.parametrize("n,cp,k,coop", [(50, 20, 17, True), (50, 17, 17, False), (3, 2, 1, True)])
def test_cooperation(n, cp, k, coop):
    assert cooperation_threshold(n) == k
    assert cooperation(profile(contacts=cp), n) == (cp, coop)


@given(st.integers(1, 10_000))
def test_threshold_is_ceiling_of_third(n):
    k = cooperation_threshold(n)
    assert 3 * k >= n and 3 * (k - 1) < n


simplex = st.lists(st.floats(0.01, 1.0), min_size=5, max_size=5).map(lambda v: tuple(x / sum(v) for x in v))
unit = st.floats(0.0, 1.0)


@given(simplex, st.lists(unit, min_size=5, max_size=5), st.integers(0, 4), unit)
def test_weight_monotone_in_each_feature(coeffs, feats, idx, bump):
    base = FeatureVector(*feats)
    raised = list(feats)
    raised[idx] = max(feats[idx], bump)
    assert composite_weight(FeatureVector(*raised), coeffs) >= composite_weight(base, coeffs) - 1e-12


@given(simplex)
def test_all_ones_weight_is_one(coeffs):
    assert composite_weight(FeatureVector(1, 1, 1, 1, 1), coeffs) == pytest.approx(1.0, abs=1e-9)


@given(simplex, st.lists(unit, min_size=5, max_size=5))
def test_weight_lies_in_unit_interval(coeffs, feats):
    assert -1e-12 <= composite_weight(FeatureVector(*feats), coeffs) <= 1 + 1e-9


def test_features_in_unit_interval(line_world):
    for node in range(4):
        assert all(0.0 <= v <= 1.0 for v in features(node, line_world).as_tuple())


def test_weight_ignores_node_ids():
    # the same geometry listed in a different order yields the same per-node features
    pts = [(0, 0), (30, 0), (0, 40), (200, 200)]
    a = make_world(pts)
    b = make_world(pts[::-1])
    fa = [features(i, a) for i in range(4)]
    fb = [features(i, b) for i in range(4)][::-1]
    assert fa == fb
