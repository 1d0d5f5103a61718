import numpy as np
import pytest

from musielak.errors import ConfigError, FieldDomainError
from musielak.fields import SpatialField, compile_expression


def test_constant_field_broadcasts():
    f = SpatialField.constant(1.5, n=3)
    X = np.zeros((4, 3))
    assert np.all(f(X) == 1.5)
    assert f.limit == 1.5


@pytest.mark.parametrize("expr, x, expected", [
    ("2 + x1", [3.0, 0.0], 5.0),
    ("x1 * x2", [2.0, 4.0], 8.0),
    ("abs(x)", [3.0, 4.0], 5.0),
    ("abs(x)^2", [3.0, 4.0], 25.0),
    ("exp(-abs(x)^2)", [1.0, 0.0], np.exp(-1.0)),
    ("min(2, abs(x))", [9.0, 0.0], 2.0),
    ("max(1, x1)", [-5.0, 0.0], 1.0),
    ("log(exp(3))", [0.0, 0.0], 3.0),
    ("1 / (1 + abs(x)^2)", [1.0, 1.0], 1.0 / 3.0),
])
def test_expression_values(expr, x, expected):
    f = SpatialField("expression", expr, n=2)
    assert f.at(np.asarray(x)) == pytest.approx(expected, rel=1e-14)


def test_expression_vectorized_matches_scalar():
    f = SpatialField("expression", "3 - abs(x)^2 / (1 + abs(x)^2)", n=3)
    X = np.random.default_rng(0).normal(size=(50, 3))
    vals = f(X)
    for i in range(X.shape[0]):
        assert vals[i] == pytest.approx(f.at(X[i]), rel=1e-14)


def test_grid_field_interpolates():
    f = SpatialField("grid", {"radii": [1.0, 2.0, 4.0],
                              "values": [1.0, 3.0, 5.0]}, n=2)
    assert f.at([1.5, 0.0]) == pytest.approx(2.0)
    # constant extension outside the table
    assert f.at([0.1, 0.0]) == pytest.approx(1.0)
    assert f.at([10.0, 0.0]) == pytest.approx(5.0)
    assert f.limit == 5.0


def test_range_violation_raises_with_location():
    f = SpatialField("expression", "x1", n=2, rng=(0.0, 1.0), name="p")
    f(np.array([[0.5, 0.0]]))
    with pytest.raises(FieldDomainError, match="p"):
        f(np.array([[2.0, 0.0]]))


def test_dimension_mismatch_raises():
    f = SpatialField.constant(1.0, n=3)
    with pytest.raises(FieldDomainError, match="dimension"):
        f(np.zeros((2, 2)))


@pytest.mark.parametrize("bad", [
    "__import__('os')",
    "x1.real",
    "sin(x1)",
    "x9",
    "lambda t: t",
])
def test_expression_rejects_disallowed_syntax(bad):
    with pytest.raises(ConfigError):
        compile_expression(bad, 2)(np.zeros((1, 2)))


def test_from_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="expr"):
        SpatialField.from_config({"kind": "expression", "expr": "x1"}, n=2)
    with pytest.raises(ConfigError, match="payload"):
        SpatialField.from_config({"kind": "expression"}, n=2)


def test_from_config_roundtrip():
    doc = {"name": "a", "kind": "expression", "payload": "1/(1+abs(x)^2)",
           "range": [0.0, 1.0], "limit": 0.0}
    f = SpatialField.from_config(doc, n=3)
    assert f.at([0.0, 0.0, 0.0]) == pytest.approx(1.0)
    assert f.limit == 0.0


def test_grid_field_validation():
    with pytest.raises(ConfigError):
        SpatialField("grid", {"radii": [2.0, 1.0], "values": [1.0, 2.0]}, n=2)
    with pytest.raises(ConfigError):
        SpatialField("grid", {"radii": [1.0], "values": [1.0]}, n=2)
    with pytest.raises(ConfigError):
        SpatialField("banana", 1.0, n=2)
