import math

import numpy as np
import pytest

from nlkorovkin.exceptions import ConfigurationError, EvaluationError
from nlkorovkin.fields import DomainSpec, ScalarField
from nlkorovkin.korovkin import (NOISE_FLOOR, ConvergenceReport, SeparatingFn, ShiftedFamily,
                                 TestSet, build_test_set, check_separating, rate_bound,
                                 rate_bound_lhs, run_harness, separating_from_functions,
                                 shift_trick, squared_distance, theorem3_bound_check, verdict,
                                 verify_rate_bound)
from nlkorovkin.operators import make_family

S = ScalarField


# -- test sets --------------------------------------------------------------------------

def test_canonical_test_sets():
    box = build_test_set(DomainSpec.box())
    assert box.names == ["1", "pr1", "-pr1", "pr2", "-pr2", "pr1^2+pr2^2"]
    assert len(box) == 6 and box.kind == "euclidean-2N+1"
    assert build_test_set(DomainSpec.circle()).names == ["1", "cos", "-cos", "sin", "-sin"]
    assert build_test_set(DomainSpec.interval()).names == ["1", "e1", "-e1", "e2"]
    assert len(build_test_set(DomainSpec.plane())) == 6
    assert build_test_set(DomainSpec.simplex()).nonnegative(DomainSpec.simplex()).names == \
        ["1", "pr1", "pr2", "pr1^2+pr2^2"]


def test_unsupported_kind():
    class Fake:
        kind = "torus"

    with pytest.raises(ConfigurationError):
        build_test_set(Fake())


# -- separating functions -------------------------------------------------------------------------

def test_separating_squared_distance():
    dom = DomainSpec.interval()
    rep = check_separating(squared_distance(dom), grid=dom.grid(41), eps_list=(0.2, 0.1, 0.05))
    assert rep.passed
    for eps, delta in rep.details["delta"].items():
        assert math.isfinite(delta)
        assert delta <= 1 / eps                              # d <= eps + d^2 / eps
        assert delta <= dom.diameter ** 2 / eps * 2


def test_separating_box_invariant():
    dom = DomainSpec.box()
    rep = check_separating(squared_distance(dom), grid=dom.grid(9))
    for eps, delta in rep.details["delta"].items():
        assert delta <= dom.diameter ** 2 / eps * 2


def test_separating_distance_gives_one():
    dom = DomainSpec.interval()
    gamma = SeparatingFn(lambda x, y: dom.metric(x, y), dom, "d")
    rep = check_separating(gamma, grid=dom.grid(21), eps_list=(0.2, 0.1, 0.05))
    for eps, delta in rep.details["delta"].items():
        assert delta <= 1.0
        assert delta == pytest.approx(1.0 - eps, abs=1e-12)      # worst pair at d = diam = 1


def test_separating_zero_fails_with_witness():
    dom = DomainSpec.interval()
    gamma = SeparatingFn(lambda x, y: 0.0 * dom.metric(x, y), dom, "zero")
    rep = check_separating(gamma, grid=dom.grid(11), eps_list=(0.1,))
    assert rep.failed and rep.witness is not None


def test_separating_from_functions_circle():
    dom = DomainSpec.circle()
    gamma = separating_from_functions([S(np.cos, 1), S(np.sin, 1)], dom)
    rep = check_separating(gamma, grid=dom.grid(40))
    assert rep.passed
    # cos/sin separating function equals the squared chordal metric
    x = dom.grid(10)
    assert np.allclose(gamma(x[:, None, :], x[None, :, :]),
                       dom.metric(x[:, None, :], x[None, :, :]) ** 2)


def test_section():
    dom = DomainSpec.box()
    g = squared_distance(dom).section(np.array([0.2, 0.3]))
    assert g(0.2, 0.3) == 0.0 and g(0.2, 0.4) == pytest.approx(0.01)


# -- verdicts ----------------------------------------------------------------------------------------

def test_verdict_rule():
    assert verdict([0.1, 0.05, 0.004], 1e-2) == "converging"
    assert verdict([0.1, 0.09, 0.095], 1e-2) == "stalled"
    assert verdict([0.001, 0.01, 0.02], 0.05) == "diverging"
    assert verdict([1e-16, 5e-14], 1e-2) == "converging"     # exact reproduction
    assert NOISE_FLOOR < 1e-9


# -- harness ----------------------------------------------------------------------------------------

def test_harness_bkc1_converging():
    T = make_family("bkc1")
    probes = {"exp": S(np.exp, 1, name="exp")}
    rep = run_harness(T, probes=probes, schedule=(4, 16, 128), probe_tol=5e-2)
    assert isinstance(rep, ConvergenceReport)
    assert all(v == "converging" for k, v in rep.verdicts.items() if k != "exp")
    assert rep.verdicts["exp"] == "converging"
    assert all(e >= 0 for series in rep.per_function.values() for e in series)
    assert rep.grid_points == 101


def test_harness_truncated_bernstein_negative_case():
    T = make_family("truncated_bernstein")
    probe = {"x-1/2": S(lambda t: t - 0.5, 1)}
    rep = run_harness(T, TestSet({}), probe, schedule=(4, 16, 64))
    assert rep.verdicts["x-1/2"] != "converging"
    assert min(rep.probes["x-1/2"]) >= 0.2


def test_harness_schedule_must_increase():
    with pytest.raises(ConfigurationError):
        run_harness(make_family("bkc1"), schedule=(8, 4))


def test_harness_error_context():
    bad = {"bad": S(lambda t: np.where(t > 0.9, np.nan, t), 1, name="bad")}
    with pytest.raises(EvaluationError) as err:
        run_harness(make_family("truncated_bernstein"), TestSet({}), bad, schedule=(4, 8),
                    diagnose=False)
    ctx = err.value.context
    assert ctx["function"] == "bad" and ctx["n"] == 4 and "point" in ctx


def test_harness_parallel_matches_serial():
    T = make_family("maxprod")
    a = run_harness(T, schedule=(4, 8), grid=11, diagnose=False)
    b = run_harness(T, schedule=(4, 8), grid=11, diagnose=False, jobs=3)
    assert a.per_function == b.per_function


def test_korovkin_implication_on_probe_corpus():
    # families whose tests and hyp2 diagnostic pass: nonnegative probes within 10 * pass_tol
    T = make_family("maxprod")
    dom = T.domain
    probes = {"a": S(lambda a, b: np.exp(a) * (1 + b), 2), "b": S(lambda a, b: np.abs(a - b), 2)}
    rep = run_harness(T, build_test_set(dom).nonnegative(dom), probes, schedule=(8, 32, 128),
                      grid=21)
    assert max(rep.final_error(k) for k in rep.per_function) < rep.pass_tol
    assert rep.final_error("hyp2") < rep.pass_tol
    assert all(rep.final_error(k) < 10 * rep.pass_tol for k in probes)


# -- Lipschitz bound ---------------------------------------------------------------------------------------

def test_theorem3_constant_and_lipschitz():
    T = make_family("maxprod")
    assert theorem3_bound_check(T, S.constant(2.0, 2), (4, 16), grid=11).passed
    rep = theorem3_bound_check(T, S.coordinate(1, 2), (4, 16, 64), grid=21)
    assert rep.passed
    with pytest.raises(ConfigurationError):
        theorem3_bound_check(T, S(lambda a, b: a * b, 2), (4,))


def test_theorem3_bkc1():
    rep = theorem3_bound_check(make_family("bkc1"), S.coordinate(1, 1), (4, 16, 64), grid=21)
    assert rep.passed


# -- rate bounds ----------------------------------------------------------------------------------------

def test_rate_bound_values():
    assert rate_bound("maxprod", 0.3, 35) == pytest.approx(1.0)
    assert rate_bound("gauss_weierstrass", 0.0, 8) == pytest.approx(0.5)
    assert rate_bound("poss_kantorovich", 0.0, 9) == pytest.approx(0.2)
    x, n = 0.25, 16
    est = ((1 + math.sqrt(2)) * math.sqrt(x * (1 - x)) + math.sqrt(2) * math.sqrt(x)) / 4 + 1 / 16
    assert rate_bound("poss_durrmeyer", x, n) == pytest.approx(est)
    with pytest.raises(ConfigurationError):
        rate_bound("bkc1", 0.5, 4)


def test_rate_bound_pairing_errors():
    with pytest.raises(ConfigurationError):
        verify_rate_bound(make_family("maxprod"), "gauss_weierstrass")
    with pytest.raises(ConfigurationError):
        verify_rate_bound(make_family("bkc1"))


def test_poss_kantorovich_lhs_at_origin():
    Q = make_family("poss_kantorovich", cell_resolution=4, refinements=0)
    for n in (3, 9):
        lhs = rate_bound_lhs(Q, n, np.array([[0.0, 0.0]]))
        assert np.allclose(lhs, 1 / (n + 1))
        assert np.all(lhs <= rate_bound("poss_kantorovich", 0.0, n))


def test_maxprod_rate_bound_at_35():
    rep = verify_rate_bound(make_family("maxprod"), schedule=(35,), grid=11)
    assert rep.passed and rep.details["per_n"][35]["max_lhs"] <= 1.0


# -- shift trick ------------------------------------------------------------------------------------------

def test_shift_trick_equals_T_for_translatable_unital():
    T = make_family("bkc1")
    f = S(lambda t: np.sin(4 * t), 1)
    x = np.linspace(0, 1, 11)
    assert np.allclose(shift_trick(T, 6, f)(x), T.evaluate(6, f, x), atol=T.tolerance)


def test_shift_trick_truncated_bernstein():
    T = ShiftedFamily(make_family("truncated_bernstein"))
    rep = run_harness(T, TestSet({}), {"x-1/2": S(lambda t: t - 0.5, 1)}, schedule=(4, 32, 128),
                      diagnose=False, pass_tol=5e-2)
    assert rep.verdicts["x-1/2"] == "converging"


def test_shift_trick_maxprod():
    T = ShiftedFamily(make_family("maxprod"))
    f = S(lambda a, b: a - 0.25 + 0 * b, 2, name="x1-1/4")
    rep = run_harness(T, TestSet({}), {"f": f}, schedule=(4, 32, 128), grid=21, diagnose=False)
    assert rep.verdicts["f"] == "converging"
