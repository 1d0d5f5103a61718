import numpy as np
import pytest

from musielak.tab import MonotoneTab


def _power_tab(p=2.0, extend="power"):
    grid = np.geomspace(0.1, 10.0, 40)
    return MonotoneTab(grid, grid ** p, extend_above=extend)


def test_interpolation_is_exact_on_powers():
    tab = _power_tab(2.0)
    ts = np.geomspace(0.1, 10.0, 113)
    assert np.max(np.abs(tab(ts) / ts ** 2 - 1.0)) < 1e-12


def test_extrapolation_both_sides():
    tab = _power_tab(1.5)
    # power extension continues the boundary slope
    assert tab(0.01) == pytest.approx(0.01 ** 1.5, rel=1e-10)
    assert tab(100.0) == pytest.approx(100.0 ** 1.5, rel=1e-10)


def test_inverse_roundtrip():
    tab = _power_tab(2.0)
    ts = np.geomspace(0.05, 20.0, 31)
    back = tab.inverse(tab(ts))
    assert np.max(np.abs(back / ts - 1.0)) < 1e-10


def test_zero_maps_to_zero():
    tab = _power_tab()
    assert tab(0.0) == 0.0
    assert tab.inverse(0.0) == 0.0


def test_flat_extension_saturates():
    grid = np.array([1.0, 2.0, 4.0])
    tab = MonotoneTab(grid, np.array([1.0, 2.0, 3.0]), extend_above="flat")
    assert tab(100.0) == 3.0
    assert tab.sup_value == 3.0
    # levels past the supremum have no preimage
    assert np.isinf(tab.inverse(5.0))


def test_inf_extension_jumps():
    grid = np.array([1.0, 2.0, 4.0])
    tab = MonotoneTab(grid, np.array([1.0, 2.0, 3.0]), extend_above="inf")
    assert np.isinf(tab(100.0))
    # the inverse of any level above the table is the jump location
    assert tab.inverse(50.0) == pytest.approx(4.0)


def test_infinite_tabulated_values():
    grid = np.array([1.0, 2.0, 4.0, 8.0])
    tab = MonotoneTab(grid, np.array([1.0, 4.0, np.inf, np.inf]))
    assert tab(1.5) > 0.0
    assert np.isinf(tab(5.0))


def test_leading_zeros_are_honored():
    grid = np.array([1.0, 2.0, 4.0])
    tab = MonotoneTab(grid, np.array([0.0, 0.0, 3.0]))
    assert tab(1.5) == 0.0
    assert tab(0.5) == 0.0


@pytest.mark.parametrize("grid, values, msg", [
    ([1.0], [1.0], "len >= 2"),
    ([2.0, 1.0], [1.0, 2.0], "increasing"),
    ([-1.0, 1.0], [1.0, 2.0], "positive"),
    ([1.0, 2.0], [2.0, 1.0], "nondecreasing"),
    ([1.0, 2.0], [0.0, 0.0], "positive finite"),
])
def test_constructor_validation(grid, values, msg):
    with pytest.raises(ValueError, match=msg):
        MonotoneTab(np.asarray(grid, float), np.asarray(values, float))
