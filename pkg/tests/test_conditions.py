import numpy as np
import pytest
from scipy import optimize

from musielak.conditions import (a2_defect_profile, check_A0, check_A1,
                                 check_A2pp, check_growth_condition,
                                 check_grows_more_slowly, check_normalized,
                                 unit_ball_volume)
from musielak.gyf import ConjugateGYF, OrliczGYF, PowerGYF
from musielak.normalize import make_bar


@pytest.mark.parametrize("n, expected", [
    (1, 2.0),
    (2, np.pi),
    (3, 4.0 * np.pi / 3.0),
    (4, np.pi ** 2 / 2.0),
])
def test_unit_ball_volume(n, expected):
    assert unit_ball_volume(n) == pytest.approx(expected, rel=1e-14)


# -- A0: unit-level calibration ------------------------------------------------

@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 3.0])
def test_A0_powers_have_unit_witness(p):
    rep = check_A0(PowerGYF(p, n=2))
    assert rep.holds
    assert rep.beta == pytest.approx(1.0, rel=1e-9)


def test_A0_double_phase_matches_scalar_root(doublephase3):
    # the witness is phi^{-1}(0, 1): the root of t^2 + t^2.5 = 1, since
    # a(x) peaks at the origin and the inverse grows toward 1 at infinity
    root = optimize.brentq(lambda t: t * t + t ** 2.5 - 1.0, 0.1, 1.0)
    rep = check_A0(doublephase3)
    assert rep.holds
    assert rep.beta == pytest.approx(root, rel=1e-6)


def test_A0_fails_for_bounded_function():
    rep = check_A0(OrliczGYF("min(t, 0.5)", n=2))
    assert not rep.holds
    assert rep.beta is None


def test_A0_of_conjugate_at_least_half(varexp3):
    # t <= phi^{-1}(x,t) phi~^{-1}(x,t) <= 2t pins the conjugate's witness
    # to at least half of the base witness
    base = check_A0(varexp3)
    conj = check_A0(ConjugateGYF(varexp3))
    assert conj.holds
    assert conj.beta >= base.beta / 2.0 - 1e-9


# -- A1: ball comparability ------------------------------------------------------

def test_A1_power_is_exact(power2):
    rep = check_A1(power2)
    assert rep.holds
    assert rep.beta == pytest.approx(1.0, rel=1e-9)


def test_A1_frozen_sample_constants(doublephase3, varexp3):
    # frozen sampled witnesses on the default seeded ball sweep
    rep = check_A1(doublephase3)
    assert rep.holds
    assert rep.beta == pytest.approx(0.8747492948928086, rel=1e-9)
    rep = check_A1(varexp3)
    assert rep.holds
    assert rep.beta == pytest.approx(0.9157994688056061, rel=1e-9)


# -- A2'': tail agreement --------------------------------------------------------

def test_A2_double_phase_defect_closed_form(doublephase3):
    # with beta = 1 and no additive error the worst defect is
    # phi(0, 1) - phi_inf(1) = (1 + 1) - 1 = 1
    rep = check_A2pp(doublephase3, beta=1.0, xs=np.zeros((1, 3)),
                     ts=np.array([0.5, 1.0]))
    assert not rep.holds
    assert rep.worst_sample["defect"] == pytest.approx(1.0, rel=1e-12)


def test_A2_double_phase_holds_with_coefficient_error(doublephase3):
    # h(x) = a(x) absorbs the q-branch exactly
    rep = check_A2pp(doublephase3, h=doublephase3.a_field, beta=1.0,
                     xs=np.zeros((1, 3)), ts=np.array([0.5, 1.0]))
    assert rep.holds


def test_A2_power_is_exact(power2):
    rep = check_A2pp(power2, beta=1.0)
    assert rep.holds


def test_A2_rejects_bad_beta(power2):
    with pytest.raises(ValueError, match="beta"):
        check_A2pp(power2, beta=1.5)


def test_defect_profile_closed_form(varexp3):
    # at x = 0 (p = 3) the needed error is max over the grid of t^2 - t^3,
    # which the grid point t = 2/3 realizes at 4/27
    xs, d = a2_defect_profile(varexp3, beta=1.0, xs=np.array([[0.0, 0, 0]]),
                              ts=np.array([1.0 / 3.0, 2.0 / 3.0, 1.0]))
    assert d[0] == pytest.approx(4.0 / 27.0, rel=1e-12)


def test_defect_profile_decays_at_infinity(varexp3):
    xs = np.array([[0.0, 0, 0], [8.0, 0, 0], [64.0, 0, 0]])
    _, d = a2_defect_profile(varexp3, beta=1.0, xs=xs)
    assert d[0] > d[1] > d[2]
    assert d[2] < 1e-3


# -- normalized form -------------------------------------------------------------

def test_normalized_holds_for_bar(varexp3):
    rep = check_normalized(make_bar(varexp3))
    assert rep.holds
    assert rep.details["unit_calibration_defect"] <= 1e-6
    assert rep.details["tail_agreement_defect"] <= 1e-6


def test_normalized_fails_for_raw_variable_exponent(varexp3):
    # the raw family is calibrated but does not equal its tail on (0, 1]
    rep = check_normalized(varexp3)
    assert not rep.holds
    assert rep.details["tail_agreement_ok"] is False


# -- growth condition -------------------------------------------------------------

@pytest.mark.parametrize("n, p, alpha", [
    (3, 2.0, 1.0),
    (3, 3.0, 1.0),
    (2, 1.5, 1.0),
    (2, 2.0, 1.0),
    (4, 2.0, 2.0),
    (4, 2.0, 1.0),
])
def test_growth_condition_truth_table(n, p, alpha):
    # integrand near 0 is t^e with e = (1-p) alpha/(n-alpha); it is
    # integrable in dt/t exactly when e > -1 (p < n at alpha = 1)
    e = (1.0 - p) * alpha / (n - alpha)
    converges, tail = check_growth_condition(PowerGYF(p, n=n), alpha)
    assert converges == (e > -1.0)
    if converges:
        # closed form: integral over (0,1] of t^(e-1) dt... in the log
        # variable: integral of t^e dt/t = 1/e for e > 0; here the
        # integrand is (t/t^p)^(alpha/(n-alpha)) over dt, value 1/(e+1)
        assert tail == pytest.approx(1.0 / (e + 1.0), rel=1e-6)
    else:
        assert np.isinf(tail)


def test_growth_condition_rejects_bad_alpha(power2):
    with pytest.raises(ValueError, match="alpha"):
        check_growth_condition(power2, 2.0)
    with pytest.raises(ValueError, match="alpha"):
        check_growth_condition(power2, 0.0)


# -- growth comparison -------------------------------------------------------------

def test_grows_more_slowly_strict(power2):
    theta = PowerGYF(1.5, n=2)
    assert check_grows_more_slowly(theta, power2)
    # a function never grows more slowly than itself
    assert not check_grows_more_slowly(power2, power2)
    # nor does a faster one
    assert not check_grows_more_slowly(PowerGYF(3.0, n=2), power2)
