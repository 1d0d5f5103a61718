import numpy as np
import pytest

from musielak.errors import ConfigError
from musielak.fields import SpatialField
from musielak.gyf import (ConjugateGYF, DilatedGYF, DoublePhaseGYF, OrliczGYF,
                          PowerGYF, VariableExponentGYF, check_delta2,
                          default_x_samples, estimate_equivalence,
                          gyf_from_config, limit_function, phi_infinity)


# -- evaluation --------------------------------------------------------------

def test_power_values(power2):
    ts = np.array([0.0, 0.5, 1.0, 3.0])
    assert np.allclose(power2.phi_batch(None, ts), ts ** 2)
    assert power2.phi(None, 1.0) == 1.0  # unit-calibrated


def test_variable_exponent_values(varexp3):
    # p(0) = 3, p((1,0,0)) = 2.5
    assert varexp3.phi(np.zeros(3), 2.0) == pytest.approx(8.0)
    assert varexp3.phi(np.array([1.0, 0, 0]), 4.0) == pytest.approx(32.0)


def test_double_phase_values(doublephase3):
    # at the origin a = 1: t^2 + t^2.5
    assert doublephase3.phi(np.zeros(3), 4.0) == pytest.approx(16.0 + 32.0)


def test_log_phi_handles_huge_arguments(varexp3):
    # log phi(x, e^u) = p(x) u for u far beyond floating-point range of e^u
    X = np.zeros((1, 3))
    got = varexp3.log_phi_xt(X, np.array([1e6]))
    assert got[0] == pytest.approx(3e6, rel=1e-12)


def test_orlicz_from_expression():
    phi = OrliczGYF("t^1.7", n=2)
    assert phi.x_independent
    assert phi.phi(None, 2.0) == pytest.approx(2.0 ** 1.7)


# -- inverse -----------------------------------------------------------------

def test_double_phase_inverse_frozen():
    # t^2 + t^3 = 12 at t = 2 (a constant 1)
    phi = DoublePhaseGYF(2.0, 3.0, SpatialField.constant(1.0, n=2))
    assert phi.inverse(np.zeros(2), 12.0) == pytest.approx(2.0, rel=1e-12)


def test_inverse_roundtrip_randomized(varexp3, rng):
    X = rng.normal(size=(40, 3))
    T = 10.0 ** rng.uniform(-4, 4, size=40)
    V = varexp3.phi_xt(X, T)
    back = varexp3.inverse_xt(X, V)
    assert np.max(np.abs(back / T - 1.0)) < 1e-9


def test_inverse_left_continuity_convention(power2):
    # inverse at level 0 is 0; at +inf it diverges
    assert power2.inverse(None, 0.0) == 0.0
    assert np.isinf(power2.inverse(None, np.inf))


def test_generic_inverse_agrees_with_closed_form(doublephase3, rng):
    # the double-phase family overrides inverse_xt; the base-class scan
    # must agree with it (dual route through the same left-continuous
    # convention)
    X = rng.normal(size=(25, 3))
    T = 10.0 ** rng.uniform(-3, 3, size=25)
    V = doublephase3.phi_xt(X, T)
    fast = doublephase3.inverse_xt(X, V)
    generic = super(DoublePhaseGYF, doublephase3).inverse_xt(X, V)
    assert np.max(np.abs(fast / generic - 1.0)) < 1e-8


# -- Young conjugate ---------------------------------------------------------

def test_conjugate_of_square_is_quarter_square(power2):
    # (t^2)* = s^2/4
    ss = np.geomspace(0.1, 100.0, 25)
    got = power2.conjugate_batch(None, ss)
    assert np.max(np.abs(got / (ss ** 2 / 4.0) - 1.0)) < 1e-8


def test_conjugate_of_identity_is_indicator():
    phi = PowerGYF(1.0, n=2)
    # (t)* = 0 on [0, 1], +inf beyond
    assert phi.conjugate(None, 0.5) == 0.0
    assert phi.conjugate(None, 1.0) == 0.0
    assert np.isinf(phi.conjugate(None, 2.0))


@pytest.mark.parametrize("p", [1.3, 2.0, 3.5])
def test_conjugate_matches_dual_exponent(p):
    # (t^p/p...)-free version: (t^p)*(s) = C s^q with q = p/(p-1) and
    # C = (p-1) p^(-q); verified against the sampled Legendre transform
    phi = PowerGYF(p, n=2)
    q = p / (p - 1.0)
    C = (p - 1.0) * p ** (-q)
    ss = np.geomspace(1e-2, 1e3, 31)
    got = phi.conjugate_batch(None, ss)
    assert np.max(np.abs(got / (C * ss ** q) - 1.0)) < 1e-7


def test_biconjugation_recovers_convex_function():
    # dual route: two sampled Legendre transforms of a convex function
    # must return to it (no closed-form shortcuts on the Orlicz family)
    phi = OrliczGYF("t^2", n=2)
    once = ConjugateGYF(phi)
    twice = ConjugateGYF(once)
    ts = np.geomspace(0.1, 10.0, 13)
    got = twice.phi_batch(None, ts)
    assert np.max(np.abs(got / ts ** 2 - 1.0)) < 1e-6


def test_young_inequality_randomized(varexp3, rng):
    # t s <= phi(x, t) + phi*(x, s) on a sampled cloud
    X = rng.normal(size=(20, 3))
    ts = 10.0 ** rng.uniform(-2, 2, size=20)
    ss = 10.0 ** rng.uniform(-2, 2, size=20)
    lhs = ts * ss
    rhs = varexp3.phi_xt(X, ts) + varexp3.conjugate_xt(X, ss)
    assert np.all(lhs <= rhs * (1.0 + 1e-9))


def test_dilated_conjugate_rescales(power2):
    # (phi(t / k))*(s) = phi*(k s)
    k = 3.0
    dil = DilatedGYF(power2, k)
    ss = np.geomspace(0.1, 10.0, 9)
    got = dil.conjugate_batch(None, ss)
    want = power2.conjugate_batch(None, k * ss)
    assert np.max(np.abs(got / want - 1.0)) < 1e-7


# -- limit profile, doubling, equivalence -------------------------------------

def test_limit_profile_of_variable_exponent(varexp3):
    prof = limit_function(varexp3)
    ts = np.geomspace(0.1, 10.0, 7)
    assert np.allclose(prof.phi_batch(None, ts), ts ** 2.0, rtol=1e-9)
    assert phi_infinity(varexp3, 3.0) == pytest.approx(9.0, rel=1e-9)


def test_delta2_power(power2):
    holds, c = check_delta2(power2)
    assert holds
    assert c == pytest.approx(4.0, rel=1e-9)


def test_delta2_double_phase(doublephase3):
    holds, c = check_delta2(doublephase3)
    assert holds
    assert c <= 2.0 ** 2.5 * (1.0 + 1e-9)


def test_equivalence_modes(power2):
    dil = DilatedGYF(power2, 2.0)  # phi(t/2) = t^2/4
    c1, c2 = estimate_equivalence(power2, dil, mode="approx")
    assert c1 == pytest.approx(0.25, rel=1e-9)
    assert c2 == pytest.approx(0.25, rel=1e-9)
    # argument-scaling mode absorbs the factor as a dilation instead
    c1, c2 = estimate_equivalence(power2, dil, mode="simeq")
    assert c1 == pytest.approx(0.5, rel=1e-6)
    assert c2 == pytest.approx(0.5, rel=1e-6)


def test_default_x_samples_cover_far_field():
    xs = default_x_samples(3, rng=0)
    r = np.linalg.norm(xs, axis=1)
    assert xs.shape[1] == 3
    assert r.max() > 100.0  # far ladder present
    assert r.min() < 1.0


# -- declarative construction --------------------------------------------------

def test_config_power():
    phi = gyf_from_config({"family": "power", "n": 2, "params": {"p": 2.0}})
    assert isinstance(phi, PowerGYF)
    assert phi.phi(None, 3.0) == 9.0


def test_config_variable_exponent():
    doc = {
        "family": "variable-exponent", "n": 3,
        "fields": [{"name": "p", "kind": "expression",
                    "payload": "3 - abs(x)^2/(1 + abs(x)^2)",
                    "range": [2.0, 3.0], "limit": 2.0}],
    }
    phi = gyf_from_config(doc)
    assert isinstance(phi, VariableExponentGYF)
    assert phi.phi(np.zeros(3), 2.0) == pytest.approx(8.0)


def test_config_rejects_bad_exponent():
    with pytest.raises(ConfigError, match="p >= 1"):
        gyf_from_config({"family": "power", "n": 2, "params": {"p": 0.5}})


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError):
        gyf_from_config({"family": "power", "n": 2, "params": {"p": 2.0},
                         "bogus": 1})
    with pytest.raises(ConfigError):
        gyf_from_config({"family": "power", "n": 2,
                         "params": {"p": 2.0, "q": 3.0}})
