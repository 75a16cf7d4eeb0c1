import numpy as np
import pytest

from nlkorovkin.exceptions import ConfigurationError, DomainError, PreconditionError
from nlkorovkin.fields import DomainSpec, ScalarField
from nlkorovkin.opalgebra import (FunctionGenerator, Identity, Scaled, axiom_matrix,
                                  bkc2_comonotone_witness, check_axiom, check_holder, compose,
                                  holder_trials, operator_norm_estimate, profile_mismatches,
                                  sup_combinator, witnesses_for)
from nlkorovkin.operators import make_family

S = ScalarField


def q1(**kw):
    return make_family("poss_kantorovich", dim=1, cell_resolution=8, refinements=0, **kw)


# -- generators --------------------------------------------------------------------

@pytest.mark.parametrize("family", ["polynomial", "piecewise_linear", "trig", "nonneg_shifted"])
@pytest.mark.parametrize("kind", ["interval", "box", "plane"])
def test_generator_reproducible_and_bounded(family, kind):
    dom = DomainSpec(kind)
    pts = dom.grid(9)
    a = FunctionGenerator.for_domain(dom, family, seed=5).sample()
    b = FunctionGenerator.for_domain(dom, family, seed=5).sample()
    assert np.array_equal(a.at(pts), b.at(pts))
    assert np.all(np.isfinite(a.at(pts)))
    if kind == "plane" and family != "trig":
        far = np.array([[1e6, -1e6], [3e3, 0.0]])
        assert np.all(np.abs(a.at(far)) < 100)


def test_generator_pairs():
    gen = FunctionGenerator.for_domain(DomainSpec.box(), seed=2)
    pts = DomainSpec.box().grid(15)
    f, g = gen.ordered_pair()
    assert np.all(f.at(pts) <= g.at(pts))
    f, g = gen.comonotone_pair()
    fv, gv = f.at(pts), g.at(pts)
    assert np.all((fv[:, None] - fv[None, :]) * (gv[:, None] - gv[None, :]) >= -1e-12)
    assert np.all(gen.nonnegative().at(pts) >= 0)
    with pytest.raises(ConfigurationError):
        FunctionGenerator("wavelet")


# -- check_axiom ------------------------------------------------------------------------

def test_maxprod_sublinear_200_trials():
    T = make_family("maxprod")
    assert check_axiom(T, 8, "SL", trials=200).passed


def test_truncated_bernstein_tr_witness():
    T = make_family("truncated_bernstein")
    f = S(lambda t: t - 1, 1, name="x-1")
    rep = check_axiom(T, 6, "TR", trials=0, witnesses=[dict(f=f, alpha=1.0)])
    # T(f + 1)(0) = B_n(x)(0) = 0 while T(f)(0) + T(1)(0) = 1
    assert rep.failed and rep.worst_violation == pytest.approx(1.0)
    assert rep.witness["x"] == (0.0,)


def test_unital_definition():
    assert check_axiom(make_family("bkc1"), 4, "unital").passed
    assert check_axiom(Scaled(make_family("bkc1"), 2.0), 4, "unital").failed
    with pytest.raises(ConfigurationError):
        check_axiom(make_family("bkc1"), 4, "XX")


def test_inequality_one_for_every_family():
    fams = [make_family("bkc1"), make_family("maxprod"), make_family("truncated_bernstein"),
            make_family("poss_durrmeyer", grid_min=64), q1(),
            make_family("poss_kantorovich", cell_resolution=4, refinements=0)]
    for T in fams:
        assert check_axiom(T, 5, "ineq1", trials=20, grid=5).passed, T.name


def test_witness_registry():
    assert witnesses_for(make_family("maxprod"), "TR")
    assert witnesses_for(make_family("bkc1"), "TR") == []
    f, g = bkc2_comonotone_witness()
    pts = DomainSpec.box().grid(21)
    fv, gv = f.at(pts), g.at(pts)
    assert np.all((fv[:, None] - fv[None, :]) * (gv[:, None] - gv[None, :]) >= -1e-12)


def test_bkc2_ca_witness_exceeds_ten_tol():
    T = make_family("bkc2", cell_samples=64)
    rep = check_axiom(T, 2, "CA", trials=0, witnesses=witnesses_for(T, "CA"), grid=5)
    assert rep.worst_violation > 10 * T.tolerance


@pytest.mark.parametrize("name", ["maxprod", "poss_durrmeyer"])
def test_tr_witness_fixtures(name):
    T = make_family(name) if name == "maxprod" else make_family(name, grid_min=64)
    for n in (2, 8, 32):
        rep = check_axiom(T, n, "TR", trials=0, witnesses=witnesses_for(T, "TR"), grid=5)
        assert rep.worst_violation > 10 * T.tolerance


def test_axiom_matrix_small():
    T = make_family("bkc1")
    m = axiom_matrix(T, ns=(2, 8), trials=20)
    assert set(m) == {(n, a) for n in (2, 8) for a in ("SL", "M", "TR", "CA", "unital")}
    assert profile_mismatches(T, m) == []


# -- norm -----------------------------------------------------------------------------

def test_operator_norm():
    for T in (make_family("bkc1"), make_family("maxprod")):
        assert operator_norm_estimate(T, 8, trials=20) <= 1 + T.tolerance
    assert operator_norm_estimate(Scaled(Identity(DomainSpec.interval()), 2.0), 3,
                                  trials=10) == pytest.approx(2.0)
    # f = 1 attains the bound: estimate with zero random trials equals ||T(1)||
    T = make_family("bkc1")
    assert operator_norm_estimate(T, 8, trials=0) == pytest.approx(1.0, abs=1e-12)


def test_operator_norm_precondition():
    class NotMonotone(Identity):
        profile = Identity.profile.__class__(monotone=False)

    with pytest.raises(PreconditionError):
        operator_norm_estimate(NotMonotone(DomainSpec.interval()), 2)


# -- combinators ----------------------------------------------------------------------------

def test_sup_combinator_examples():
    T = make_family("bkc1")
    same = sup_combinator(T, T)
    x = np.linspace(0, 1, 9)
    f = S(np.sin, 1)
    assert np.allclose(same.evaluate(4, f, x), T.evaluate(4, f, x))
    both = sup_combinator(T, q1())
    assert both.profile.translatable and both.profile.unital
    assert check_axiom(both, 4, "unital").passed
    for ax in ("SL", "M", "TR"):
        assert check_axiom(both, 8, ax, trials=30).passed


def test_sup_combinator_precondition():
    with pytest.raises(PreconditionError):
        sup_combinator(make_family("bkc1"), Scaled(make_family("bkc1"), 2.0))
    with pytest.raises(PreconditionError):
        sup_combinator(make_family("bkc1"), make_family("maxprod"))


def test_compose_examples():
    T = make_family("bkc1")
    ident = Identity(DomainSpec.interval())
    x = np.linspace(0, 1, 9)
    f = S(lambda t: t ** 3 - t, 1)
    assert np.allclose(compose(T, ident).evaluate(5, f, x), T.evaluate(5, f, x))
    c = compose(T, q1())
    assert c.profile.unital and c.profile.translatable
    assert check_axiom(c, 4, "unital").passed
    for ax in ("SL", "M", "TR"):
        assert check_axiom(c, 4, ax, trials=15).passed
    with pytest.raises(PreconditionError):
        compose(T, Scaled(T, 3.0))


# -- Hoelder ----------------------------------------------------------------------------------

def test_holder_examples():
    T = make_family("maxprod")
    one = S.constant(1.0, 2)
    f = S(lambda a, b: np.sin(3 * a) - b, 2)
    assert check_holder(T, 6, f, one, 2.0).passed          # T|f| <= T(f^2)^(1/2)
    rep = check_holder(T, 6, f, f, 2.0)                    # equality case
    assert rep.passed and rep.worst_violation == pytest.approx(0.0, abs=1e-12)
    gen = FunctionGenerator.for_domain(T.domain, seed=9)
    g, h = gen.sample(), gen.sample()
    assert check_holder(T, 10, g, h, 3.0).passed
    with pytest.raises(DomainError):
        check_holder(T, 3, f, f, 1.0)
    with pytest.raises(PreconditionError):
        check_holder(Scaled(T, 2.0), 3, f, f, 2.0)


def test_holder_trials_bkc1():
    assert holder_trials(make_family("bkc1"), 8, trials=25).passed


@pytest.mark.parametrize("name", ["maxprod", "truncated_bernstein"])
def test_ca_witness_found_without_random_trials(name):
    T = make_family(name)
    rep = check_axiom(T, 4, "CA", trials=0, witnesses=witnesses_for(T, "CA"))
    assert rep.failed and rep.witness is not None
