import numpy as np
import pytest

from musielak.errors import NormalizationError
from musielak.gyf import DilatedGYF, OrliczGYF, PowerGYF
from musielak.normalize import (LinearNormalized, TailNormalized,
                                UnitCalibrated, check_sandwiches, derive,
                                make_bar, make_bullet, make_circ, make_hat,
                                make_phi0)


# -- frozen values on the square function -------------------------------------

def test_bar_frozen_values(power2):
    bar = make_bar(power2)
    # above 1: 2 phi0 - 1; below 1: the tail profile (= phi here)
    assert bar.phi(None, 2.0) == pytest.approx(7.0, rel=1e-12)
    assert bar.phi(None, 0.5) == pytest.approx(0.25, rel=1e-12)
    assert bar.phi(None, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_hat_frozen_values(power2):
    hat = make_hat(power2)
    assert hat.phi(None, 3.0) == pytest.approx(17.0, rel=1e-12)
    assert hat.phi(None, 0.5) == pytest.approx(0.5, rel=1e-12)
    assert hat.phi(None, 1.0) == pytest.approx(1.0, rel=1e-12)


def test_phi0_recalibrates_scaled_function(power2):
    # (t/2)^2 has unit level at t = 2; recalibration restores t^2
    shifted = DilatedGYF(power2, 2.0)
    phi0 = make_phi0(shifted)
    ts = np.geomspace(0.1, 10.0, 11)
    assert np.allclose(phi0.phi_batch(None, ts),
                       np.maximum(ts ** 2, 2.0 * ts - 1.0), rtol=1e-10)


def test_phi0_unit_calibration_property(varexp3, rng):
    phi0 = make_phi0(varexp3)
    X = rng.normal(size=(30, 3)) * 2.0
    ones = np.ones(30)
    assert np.allclose(phi0.phi_xt(X, ones), 1.0, rtol=1e-9)
    assert np.allclose(phi0.inverse_xt(X, ones), 1.0, rtol=1e-9)


def test_phi0_inverse_dual_route(varexp3, rng):
    # closed-form inverse vs the generic scan on the same object
    phi0 = make_phi0(varexp3)
    X = rng.normal(size=(20, 3))
    T = 10.0 ** rng.uniform(-3, 3, size=20)
    fast = phi0.inverse_xt(X, T)
    generic = super(UnitCalibrated, phi0).inverse_xt(X, T)
    assert np.max(np.abs(fast / generic - 1.0)) < 1e-8


# -- structural properties over x ----------------------------------------------

def test_bar_and_hat_agree_above_one(varexp3, rng):
    bar, hat = make_bar(varexp3), make_hat(varexp3)
    X = rng.normal(size=(40, 3))
    T = 10.0 ** rng.uniform(0, 4, size=40)
    assert np.allclose(bar.phi_xt(X, T), hat.phi_xt(X, T), rtol=1e-12)


def test_bar_below_one_is_x_independent(varexp3, rng):
    # the low branch is the spatial tail profile: frozen t^2 here
    bar = make_bar(varexp3)
    X = rng.normal(size=(40, 3)) * 5.0
    T = 10.0 ** rng.uniform(-4, -0.01, size=40)
    got = bar.phi_xt(X, T)
    assert np.allclose(got, np.maximum(T ** 2, 2.0 * T - 1.0), rtol=1e-6)


def test_log_phi_matches_phi(varexp3, rng):
    bar = make_bar(varexp3)
    X = rng.normal(size=(30, 3))
    U = rng.uniform(-3, 3, size=30)
    direct = np.log(bar.phi_xt(X, np.exp(U)))
    assert np.allclose(bar.log_phi_xt(X, U), direct, rtol=1e-10)


def test_circ_and_bullet_are_equivalent_only(doublephase3):
    circ = make_circ(doublephase3)
    bullet = make_bullet(doublephase3)
    assert circ.equivalent_only
    assert bullet.equivalent_only
    # above 1 both keep the base function unchanged
    X = np.zeros((3, 3))
    T = np.array([1.0, 2.0, 5.0])
    assert np.allclose(circ.phi_xt(X, T), doublephase3.phi_xt(X, T))
    assert np.allclose(bullet.phi_xt(X, T), doublephase3.phi_xt(X, T))
    # below 1: tail profile vs identity
    assert circ.phi(np.zeros(3), 0.5) == pytest.approx(0.25, rel=1e-6)
    assert bullet.phi(np.zeros(3), 0.5) == pytest.approx(0.5)


def test_bar_inverse_roundtrip(varexp3, rng):
    bar = make_bar(varexp3)
    X = rng.normal(size=(25, 3))
    T = 10.0 ** rng.uniform(-4, 4, size=25)
    V = bar.phi_xt(X, T)
    back = bar.inverse_xt(X, V)
    assert np.max(np.abs(back / T - 1.0)) < 1e-8


# -- recipe dispatch and failure modes -----------------------------------------

def test_derive_dispatch(power2):
    assert isinstance(derive(power2, "bar"), TailNormalized)
    assert isinstance(derive(power2, "hat"), LinearNormalized)
    assert derive(power2, "none") is power2
    assert derive(power2, None) is power2
    with pytest.raises(ValueError, match="unknown recipe"):
        derive(power2, "tilde")


def test_degenerate_calibration_raises():
    # a bounded function never reaches level 1: phi^{-1}(1) = inf
    flat = OrliczGYF("min(t, 0.5)", n=2)
    phi0 = make_phi0(flat)
    with pytest.raises(NormalizationError, match="degenerate"):
        phi0.phi_batch(None, np.array([2.0]))


def test_sandwich_reports(varexp3):
    bar = make_bar(varexp3)
    rep = check_sandwiches(varexp3, bar, samples=2000, rng=11)
    assert rep.passed
    hat = make_hat(varexp3)
    rep = check_sandwiches(varexp3, hat, samples=2000, rng=11)
    assert rep.passed
    with pytest.raises(ValueError, match="bar and hat"):
        check_sandwiches(varexp3, make_circ(varexp3), samples=100)
