import numpy as np
import pytest
from scipy import integrate

from musielak.errors import GrowthConditionError
from musielak.quadrature import CumulativeTab, adaptive_integral


# -- cumulative tabulation vs scipy.quad on smooth integrands ---------------

@pytest.mark.parametrize("expo", [-0.5, 0.3, 1.0, 2.0])
def test_power_integrand_matches_closed_form(expo):
    # integral of tau^expo over (0, t] = t^(expo+1) / (expo+1) for expo > -1
    tab = CumulativeTab(lambda tau: tau ** expo, n_nodes=256)
    for t in (1e-8, 1e-3, 0.77, 1.0, 42.0, 1e7):
        exact = t ** (expo + 1.0) / (expo + 1.0)
        assert tab.integral(t) == pytest.approx(exact, rel=5e-9)


def test_knee_integrand_matches_quad():
    # piecewise rate: constant below 1, decaying above
    def f(tau):
        tau = np.asarray(tau, dtype=float)
        return np.where(tau <= 1.0, 1.0, tau ** -1.5)

    tab = CumulativeTab(f, n_nodes=512)
    # the kink at tau = 1 sits inside a fixed panel: ~1e-6 is the honest
    # accuracy of the tabulation there; smooth regions are ~1e-9
    for t in (0.5, 1.0, 3.0, 100.0):
        exact, _ = integrate.quad(lambda s: float(f(s)), 0.0, t,
                                  points=[1.0] if t > 1 else None)
        assert tab.integral(t) == pytest.approx(exact, rel=5e-6)


def test_decaying_integrand_has_finite_limit():
    tab = CumulativeTab(lambda tau: np.exp(-tau), n_nodes=256)
    assert tab.integral(700.0) == pytest.approx(1.0, rel=1e-8)
    assert tab.integral(np.inf) == pytest.approx(1.0, rel=1e-8)


def test_divergent_lower_endpoint_raises():
    with pytest.raises(GrowthConditionError, match="diverges at 0"):
        CumulativeTab(lambda tau: 1.0 / tau, n_nodes=64, label="integrand")


# -- the inverse: closed-form local model, exact on power laws --------------

@pytest.mark.parametrize("expo", [-0.5, 0.0, 1.0, 3.0])
def test_inverse_roundtrip_power(expo):
    tab = CumulativeTab(lambda tau: tau ** expo, n_nodes=256)
    ts = np.geomspace(1e-9, 1e8, 60)
    ys = tab.integral(ts)
    back = tab.inverse(ys)
    assert np.max(np.abs(back / ts - 1.0)) < 1e-12


def test_inverse_roundtrip_knee():
    def f(tau):
        tau = np.asarray(tau, dtype=float)
        return np.where(tau <= 1.0, 1.0, tau ** 0.5)

    tab = CumulativeTab(f, n_nodes=512)
    ts = np.geomspace(1e-7, 1e5, 80)
    back = tab.inverse(tab.integral(ts))
    assert np.max(np.abs(back / ts - 1.0)) < 1e-5


def test_inverse_log_matches_inverse():
    tab = CumulativeTab(lambda tau: tau ** 1.2, n_nodes=256)
    ys = np.geomspace(1e-6, 1e6, 40)
    a = tab.inverse(ys)
    b = np.exp(tab.inverse_log(ys))
    assert np.allclose(a, b, rtol=1e-12)


def test_inverse_handles_levels_beyond_table():
    tab = CumulativeTab(lambda tau: np.exp(-tau), n_nodes=128)
    # above the finite limit there is no preimage
    assert np.isinf(tab.inverse(np.asarray([2.0]))[0])


def test_integral_log_deep_below_window():
    # power integrand: cumulative scales like t^(expo+1) arbitrarily far down
    tab = CumulativeTab(lambda tau: tau ** 1.0, n_nodes=128)
    got = tab.integral_log(np.array([-60.0]))[0]
    exact = np.exp(-2.0 * 60.0) / 2.0
    assert got == pytest.approx(exact, rel=1e-6)


# -- adaptive integration --------------------------------------------------

def test_adaptive_integral_smooth():
    got = adaptive_integral(np.exp, 0.0, 1.0)
    assert got == pytest.approx(np.e - 1.0, rel=1e-10)


def test_adaptive_integral_endpoint_singularity():
    # integral of tau^(-1/2) over (0, 1] = 2, singular at the lower end
    got = adaptive_integral(lambda tau: tau ** -0.5, 0.0, 1.0)
    assert got == pytest.approx(2.0, rel=1e-7)


def test_adaptive_integral_divergent_raises():
    with pytest.raises(GrowthConditionError):
        adaptive_integral(lambda tau: 1.0 / tau, 0.0, 1.0, label="kernel")
