import itertools
import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sosnet.errors import ConflictError, DegenerateEvidenceError
from sosnet.fusion import (BINARY_FRAME, C, S, Bpa, Verdict, cif_combine, cif_exponents, cif_fuse,
                           classify, ds_combine, eds_combine, importance_factors, report_to_bpa)
from sosnet.model import FusionVariant

COOP, SELF = Verdict.COOPERATIVE, Verdict.SELFISH
WORKED = [(COOP, 0.7), (SELF, 0.3), (SELF, 0.1), (SELF, 0.4)]


def oracle_eds(b1, b2, e1, e2):
    """Term-by-term expansion over every ordered pair of focal sets."""
    num = {}
    for a, ma in b1.mass.items():
        for b, mb in b2.mass.items():
            inter = a & b
            if inter:
                num[inter] = num.get(inter, 0.0) + (ma ** e1) * (mb ** e2)
    tot = sum(num.values())
    return {k: v / tot for k, v in num.items()}


def test_ds_hand_example():
    out = ds_combine(Bpa.binary(0.6, 0.4), Bpa.binary(0.7, 0.3))
    assert out.cooperative == pytest.approx(0.42 / 0.54, abs=1e-12)
    assert out.selfish == pytest.approx(0.12 / 0.54, abs=1e-12)
    assert round(out.cooperative, 4) == 0.7778 and round(out.selfish, 4) == 0.2222


def test_ds_vacuous_is_neutral():
    b = Bpa.binary(0.3, 0.7)
    assert ds_combine(b, Bpa.vacuous()).close_to(b)


def test_ds_total_conflict():
    with pytest.raises(ConflictError):
        ds_combine(Bpa.binary(1.0, 0.0), Bpa.binary(0.0, 1.0))


def test_bpa_validation():
    with pytest.raises(ValueError):
        Bpa({C: 0.5, S: 0.6})
    with pytest.raises(ValueError):
        Bpa({C: -0.1, S: 1.1})
    with pytest.raises(ValueError):
        Bpa({frozenset(): 0.2, C: 0.8})


def test_eds_equal_if_reduces_to_ds():
    b1, b2 = Bpa.binary(0.9, 0.1), Bpa.binary(0.2, 0.8)
    assert eds_combine(b1, b2, 0.4, 0.4).close_to(ds_combine(b1, b2))


def test_eds_vacuous_side():
    b2 = Bpa.binary(0.6, 0.4)
    out = eds_combine(Bpa.vacuous(), b2, 0.8, 0.2)
    e2 = 0.2 / 0.8
    c, s = 0.6 ** e2, 0.4 ** e2
    assert out.cooperative == pytest.approx(c / (c + s), abs=1e-12)


def test_eds_asymmetric_against_expansion():
    b1, b2 = Bpa.binary(0.9, 0.1), Bpa.binary(0.1, 0.9)
    out = eds_combine(b1, b2, 0.8, 0.2)
    ref = oracle_eds(b1, b2, 4.0, 0.25)
    assert out.cooperative == pytest.approx(ref[C], abs=1e-12)
    assert out.selfish == pytest.approx(ref[S], abs=1e-12)
    # frozen from the expansion: C ~ 0.6983
    assert out.cooperative == pytest.approx(0.9 ** 4 * 0.1 ** 0.25 / (0.9 ** 4 * 0.1 ** 0.25 + 0.1 ** 4 * 0.9 ** 0.25))


def test_importance_factor_examples():
    assert importance_factors([70, 30, 10, 40]) == pytest.approx([70 / 150, 30 / 150, 10 / 150, 40 / 150])
    assert [round(v, 4) for v in importance_factors([70, 30, 10, 40])] == [0.4667, 0.2, 0.0667, 0.2667]
    assert importance_factors([1, 1]) == [0.5, 0.5]
    assert importance_factors([100, 0]) == [1 - 1e-6, 1e-6]


def test_importance_all_zero_is_uniform():
    assert importance_factors([0, 0, 0, 0]) == [0.25] * 4


def test_importance_needs_two():
    with pytest.raises(ValueError):
        importance_factors([5])


@pytest.mark.parametrize("verdict,f,c,s", [(COOP, 0.7, 0.7, 0.3), (SELF, 0.1, 0.9, 0.1), (COOP, 0.5, 0.5, 0.5)])
def test_report_to_bpa(verdict, f, c, s):
    b = report_to_bpa(verdict, f)
    assert b.cooperative == pytest.approx(c) and b.selfish == pytest.approx(s)


def test_worked_example_intermediates():
    res = cif_combine(WORKED, FusionVariant.WORKED_EXAMPLE)
    assert res.raw_selfish == pytest.approx(1.95, abs=0.01)
    assert res.raw_cooperative == pytest.approx(2.73, abs=0.01)
    assert res.bpa.selfish == pytest.approx(0.4167, abs=0.005)
    assert res.bpa.cooperative == pytest.approx(0.5833, abs=0.005)
    assert classify(res.bpa) is COOP


def test_worked_example_by_hand_expansion():
    ifs = [f for _, f in WORKED]
    ex = [f / (1 - f) for f in ifs]
    coop = [0.7, 0.7, 0.9, 0.6]
    terms = [m ** e for m, e in zip(coop, ex)]
    assert cif_combine(WORKED).raw_cooperative == pytest.approx(sum(terms) - math.prod(terms), abs=1e-12)


def test_unanimous_selfish_high_if():
    out = cif_fuse([(SELF, 0.8)] * 4)
    raw_s = 4 * 0.8 ** 4 - 0.8 ** 16
    raw_c = 4 * 0.2 ** 4 - 0.2 ** 16
    assert out.selfish == pytest.approx(raw_s / (raw_s + raw_c), abs=1e-12)
    assert out.selfish == pytest.approx(0.9960, abs=1e-4)
    assert classify(out) is SELF


def test_uninformative_reports_split_evenly():
    out = cif_fuse([(COOP, 0.5), (SELF, 0.5), (SELF, 0.5)])
    assert out.cooperative == pytest.approx(0.5) and classify(out) is COOP


def test_eq21_exponents():
    assert cif_exponents([0.5, 0.25, 0.25], FusionVariant.EQ21_LITERAL) == pytest.approx([1.0, 1 / 3, 1 / 3])
    assert cif_exponents([0.5, 0.25], FusionVariant.WORKED_EXAMPLE) == pytest.approx([1.0, 1 / 3])


def test_cif_needs_two_reports():
    with pytest.raises(DegenerateEvidenceError):
        cif_fuse([(COOP, 0.7)])


@pytest.mark.parametrize("c,expected", [(0.5833, COOP), (0.2, SELF), (0.5, COOP)])
def test_classify(c, expected):
    assert classify(Bpa.binary(c, 1 - c)) is expected


# -- properties ----------------------------------------------------------------

mass = st.floats(0.01, 1.0)


@st.composite
def binary_bpa(draw, with_theta=True):
    c, s = draw(mass), draw(mass)
    t = draw(mass) if with_theta else 0.0
    tot = c + s + t
    m = {C: c / tot, S: s / tot}
    if with_theta:
        m[BINARY_FRAME] = t / tot
    return Bpa(m)


def _valid(b):
    return all(v >= 0 for v in b.mass.values()) and abs(sum(b.mass.values()) - 1) < 1e-9


@given(binary_bpa(), binary_bpa())
def test_ds_commutative_and_valid(b1, b2):
    ab, ba = ds_combine(b1, b2), ds_combine(b2, b1)
    assert _valid(ab) and ab.close_to(ba)


@given(binary_bpa(), binary_bpa(), binary_bpa())
def test_ds_associative(b1, b2, b3):
    left = ds_combine(ds_combine(b1, b2), b3)
    right = ds_combine(b1, ds_combine(b2, b3))
    assert left.close_to(right, 1e-9)


@given(binary_bpa(), binary_bpa(), st.floats(0.01, 0.99))
def test_eds_equal_factor_property(b1, b2, k):
    assert eds_combine(b1, b2, k, k).close_to(ds_combine(b1, b2), 1e-9)


@given(binary_bpa(), binary_bpa(), st.floats(0.05, 0.95), st.floats(0.05, 0.95))
def test_eds_valid(b1, b2, i1, i2):
    assert _valid(eds_combine(b1, b2, i1, i2))


reports = st.lists(st.tuples(st.sampled_from([COOP, SELF]), st.floats(0.01, 0.99)), min_size=2, max_size=6)


@settings(max_examples=150)
@given(reports, st.randoms(use_true_random=False), st.sampled_from(list(FusionVariant)))
def test_cif_permutation_invariant(rs, rnd, variant):
    shuffled = list(rs)
    rnd.shuffle(shuffled)
    a, b = cif_combine(rs, variant), cif_combine(shuffled, variant)
    assert a.raw_cooperative == b.raw_cooperative and a.raw_selfish == b.raw_selfish
    assert _valid(a.bpa)


@given(st.sampled_from([COOP, SELF]), st.floats(0.51, 0.99), st.integers(2, 6))
def test_unanimous_confident_reports_win(verdict, f, n):
    assert classify(cif_fuse([(verdict, f)] * n)) is verdict


def test_ds_against_enumeration_general_frames():
    rnd = random.Random(5)
    for _ in range(200):
        frame = list(range(rnd.randint(2, 4)))
        subsets = [frozenset(c) for r in range(1, len(frame) + 1) for c in itertools.combinations(frame, r)]
        def draw():
            keys = rnd.sample(subsets, rnd.randint(1, len(subsets)))
            w = [rnd.random() + 1e-3 for _ in keys]
            return Bpa({k: v / sum(w) for k, v in zip(keys, w)}, frame)
        b1, b2 = draw(), draw()
        try:
            out = ds_combine(b1, b2)
        except ConflictError:
            continue
        ref = oracle_eds(b1, b2, 1.0, 1.0)
        for k in set(ref) | set(out.mass):
            assert abs(out[k] - ref.get(k, 0.0)) < 1e-9
