import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from nlkorovkin.capacity import (Capacity, Distortion, MeasurableSet, check_capacity_axioms,
                                 counting, counting_capacity, distorted_capacity, lebesgue,
                                 lebesgue_capacity, random_interval_set, sqrt_lebesgue)
from nlkorovkin.exceptions import (InvalidDistortionError, PreconditionError,
                                   StructuralError)


def test_lebesgue_examples():
    assert lebesgue(MeasurableSet.interval(0, 1)) == 1.0
    assert lebesgue(MeasurableSet.union([(0, 0.25), (0.5, 0.75)])) == 0.5
    assert lebesgue(MeasurableSet.empty()) == 0.0
    assert lebesgue(MeasurableSet.interval(0.3, 0.3)) == 0.0     # degenerate
    assert lebesgue(MeasurableSet.box((0, 0.5), (0, 0.25))) == 0.125


def test_malformed_sets_raise():
    with pytest.raises(StructuralError):
        MeasurableSet("union", ((0.5, 1.0), (0.0, 0.25)))        # unsorted
    with pytest.raises(StructuralError):
        MeasurableSet("union", ((0.0, 0.6), (0.5, 1.0)))         # overlapping
    with pytest.raises(StructuralError):
        MeasurableSet.interval(1, 0)
    with pytest.raises(StructuralError):
        MeasurableSet("blob")


def test_union_normalises_overlaps():
    s = MeasurableSet.union([(0.5, 0.7), (0.0, 0.2), (0.1, 0.3), (0.7, 0.8)])
    assert s.components == ((0.0, 0.3), (0.5, 0.8))


def test_set_algebra():
    a = MeasurableSet.union([(0, 0.25), (0.5, 0.75)])
    b = MeasurableSet.interval(0.2, 0.6)
    assert (a & b).components == ((0.2, 0.25), (0.5, 0.6))
    assert (a | b).components == ((0.0, 0.75),)
    assert (a & b).issubset(a)
    assert a.issubset(a | b)


def test_distorted_capacity_examples():
    L = lebesgue_capacity()
    sq = distorted_capacity(L, Distortion(np.sqrt, concave=True))
    assert sq(MeasurableSet.interval(0, 0.25)) == pytest.approx(0.5, abs=1e-15)
    assert sq.submodular
    ident = distorted_capacity(L, Distortion(lambda t: t, concave=True))
    a = MeasurableSet.union([(0.1, 0.3), (0.6, 0.65)])
    assert ident(a) == pytest.approx(lebesgue(a), abs=1e-15)
    square = distorted_capacity(L, Distortion(lambda t: t ** 2))
    assert square(MeasurableSet.interval(0, 0.5)) == pytest.approx(0.25, abs=1e-15)
    assert not square.submodular


def test_distortion_validation():
    with pytest.raises(InvalidDistortionError):
        distorted_capacity(lebesgue_capacity(), Distortion(lambda t: np.sin(6 * t)))
    with pytest.raises(InvalidDistortionError):
        distorted_capacity(lebesgue_capacity(), Distortion(lambda t: t + 0.1))
    with pytest.raises(PreconditionError):
        distorted_capacity(sqrt_lebesgue(), Distortion(np.sqrt, concave=True))


def test_sqrt_lebesgue_examples():
    mu = sqrt_lebesgue()
    n, k = 3, 0
    assert mu(MeasurableSet.interval(k / (n + 1), (k + 1) / (n + 1))) == 0.5
    assert mu(MeasurableSet.interval(0, 1)) == 1.0
    assert mu(MeasurableSet.empty()) == 0.0
    assert mu.submodular and not mu.additive


def test_of_length_requires_profile():
    with pytest.raises(PreconditionError):
        counting_capacity(3).of_length(1.0)
    assert np.allclose(sqrt_lebesgue().of_length(np.array([0.0, 0.25, 1.0])), [0, 0.5, 1])


def test_counting():
    assert counting(MeasurableSet.points([3, 1, 2])) == 3.0
    with pytest.raises(StructuralError):
        counting(MeasurableSet.interval(0, 1))


def test_axioms_sqrt_lebesgue_pass():
    reps = check_capacity_axioms(sqrt_lebesgue(), trials=1000)
    assert all(r.passed for r in reps.values()), reps


def test_axioms_lebesgue_pass():
    reps = check_capacity_axioms(lebesgue_capacity(), trials=500)
    assert reps["monotone"].passed and reps["submodular"].passed


def test_squared_lebesgue_fails_submodularity_with_witness():
    mu = distorted_capacity(lebesgue_capacity(), Distortion(lambda t: t ** 2))
    a, b = MeasurableSet.interval(0, 0.5), MeasurableSet.interval(0.5, 1)

    def sampler(rng):
        return a, b

    rep = check_capacity_axioms(mu, sampler=sampler, trials=1)["submodular"]
    assert rep.failed
    # mu(A u B) + mu(A n B) - mu(A) - mu(B) = 1 + 0 - 1/4 - 1/4
    assert rep.worst_violation == pytest.approx(0.5, abs=1e-12)
    assert rep.witness is not None


def test_concave_distortions_submodular_on_1000_pairs():
    for expo in (0.3, 0.5, 0.8):
        mu = distorted_capacity(lebesgue_capacity(),
                                Distortion(lambda t, e=expo: np.power(t, e), concave=True))
        reps = check_capacity_axioms(mu, trials=1000, seed=int(10 * expo))
        assert reps["submodular"].passed and reps["monotone"].passed


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_sqrt_squared_is_lebesgue(seed):
    rng = np.random.default_rng(seed)
    a = random_interval_set(rng, max_components=4)
    assert sqrt_lebesgue()(a) ** 2 == pytest.approx(lebesgue(a), abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_monotone_on_nested_pairs(seed):
    rng = np.random.default_rng(seed)
    a, b = random_interval_set(rng), random_interval_set(rng)
    mu = sqrt_lebesgue()
    assert mu(a & b) <= mu(a) + 1e-12
    assert mu(a) <= mu(a | b) + 1e-12
    assert mu(MeasurableSet.empty()) == 0.0


def test_capacity_is_immutable():
    mu = sqrt_lebesgue()
    with pytest.raises(Exception):
        mu.total = 2.0
    assert isinstance(mu, Capacity)
    assert math.isclose(sqrt_lebesgue(4.0).total, 2.0)
