import numpy as np
import pytest

from musielak.fields import SpatialField
from musielak.gyf import DoublePhaseGYF, PowerGYF, VariableExponentGYF


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def power2():
    return PowerGYF(2.0, n=2)


@pytest.fixture
def varexp3():
    # p(x) = 3 - |x|^2 / (1 + |x|^2): p(0) = 3, p -> 2 at infinity
    field = SpatialField("expression", "3 - abs(x)^2 / (1 + abs(x)^2)", n=3,
                         rng=(2.0, 3.0), limit=2.0, name="p")
    return VariableExponentGYF(field)


@pytest.fixture
def doublephase3():
    # t^2 + a(x) t^2.5 with a(x) = 1 / (1 + |x|^2) -> 0 at infinity
    field = SpatialField("expression", "1 / (1 + abs(x)^2)", n=3,
                         rng=(0.0, 1.0), limit=0.0, name="a")
    return DoublePhaseGYF(2.0, 2.5, field)
