import io

import numpy as np
import pytest

from musielak.errors import ConfigError
from musielak.grids import Domain, GridFunction, domain_from_config


# -- domains ------------------------------------------------------------------

def test_domain_measures():
    ball = Domain.ball(np.zeros(2), 2.0)
    assert ball.measure == pytest.approx(np.pi * 4.0, rel=1e-14)
    box = Domain.box(np.zeros(3), np.array([1.0, 2.0, 0.5]))
    assert box.measure == pytest.approx(2.0 * 4.0 * 1.0, rel=1e-14)


def test_domain_contains():
    ball = Domain.ball(np.zeros(2), 1.0)
    inside = ball.contains(np.array([[0.5, 0.0], [0.0, 1.5]]))
    assert inside.tolist() == [True, False]


def test_domain_from_config():
    dom = domain_from_config({"kind": "ball", "center": [0.0, 0.0],
                              "radius": 1.5})
    assert dom.kind == "ball"
    assert dom.measure == pytest.approx(np.pi * 2.25)
    with pytest.raises(ConfigError):
        domain_from_config({"kind": "ball", "center": [0.0], "radius": -1.0})


# -- layouts: weights integrate the domain exactly -----------------------------

def test_weight_sums_tensor_box():
    dom = Domain.box(np.zeros(2), np.array([1.0, 2.0]))
    gf = GridFunction.tensor(dom, (16, 16), fn=lambda X: np.ones(len(X)))
    assert gf.weights.sum() == pytest.approx(8.0, rel=1e-12)
    assert gf.integrate() == pytest.approx(8.0, rel=1e-12)


def test_weight_sums_polar_ball():
    dom = Domain.ball(np.zeros(2), 1.0)
    gf = GridFunction.polar(dom, 24, 48, fn=lambda X: np.ones(len(X)))
    assert gf.weights.sum() == pytest.approx(np.pi, rel=1e-9)
    assert gf.integrate() == pytest.approx(np.pi, rel=1e-9)


def test_radial_layout_integrates_radial_functions():
    dom = Domain.ball(np.zeros(2), 1.0)
    gf = GridFunction.radial(dom, 256, fn=lambda r: r)
    # integral of |x| over the unit disk = 2 pi / 3
    assert gf.integrate() == pytest.approx(2.0 * np.pi / 3.0, rel=1e-4)


def test_spherical_layout_3d():
    dom = Domain.ball(np.zeros(3), 1.0)
    gf = GridFunction.spherical(dom, 24, 12, 24, fn=lambda X: np.ones(len(X)))
    assert gf.integrate() == pytest.approx(4.0 * np.pi / 3.0, rel=1e-6)


def test_weight_validation():
    dom = Domain.ball(np.zeros(2), 1.0)
    pts = np.zeros((2, 2))
    with pytest.raises(ValueError, match="positive"):
        GridFunction(dom, pts, np.array([1.0, -1.0]), np.zeros(2))
    with pytest.raises(ValueError, match="measure"):
        GridFunction(dom, pts, np.array([1.0, 1.0]), np.zeros(2))


# -- value operations -----------------------------------------------------------

def test_measure_above():
    dom = Domain.ball(np.zeros(2), 1.0)
    gf = GridFunction.radial(dom, 512, fn=lambda r: 1.0 - r)
    # {1 - r > 1/2} is the ball of radius 1/2
    assert gf.measure_above(0.5) == pytest.approx(np.pi / 4.0, rel=1e-2)
    assert gf.measure_above(2.0) == 0.0


def test_snap_returns_nearest_points():
    dom = Domain.box(np.zeros(2), np.ones(2))
    gf = GridFunction.tensor(dom, (8, 8))
    snapped, idx = gf.snap(np.array([[0.0, 0.0], [0.9, -0.9]]))
    assert np.linalg.norm(snapped[0]) < 0.2
    assert idx.shape == (2,)


def test_with_values_and_map():
    dom = Domain.ball(np.zeros(2), 1.0)
    gf = GridFunction.radial(dom, 16, fn=lambda r: r)
    doubled = gf.scaled(2.0)
    assert np.allclose(doubled.values, 2.0 * gf.values)
    absed = gf.map_values(lambda v: v - 1.0).abs()
    assert np.all(absed.values >= 0.0)


# -- CSV round trip ---------------------------------------------------------------

def test_csv_roundtrip_bit_exact(tmp_path):
    dom = Domain.ball(np.zeros(2), 1.3)
    gf = GridFunction.polar(dom, 9, 14, fn=lambda X: np.exp(X[:, 0]))
    path = tmp_path / "g.csv"
    gf.write_csv(str(path))
    back = GridFunction.read_csv(str(path))
    assert back.layout == "polar"
    assert np.array_equal(back.points, gf.points)
    assert np.array_equal(back.weights, gf.weights)
    assert np.array_equal(back.values, gf.values)
    assert back.domain.kind == "ball"
    assert back.domain.measure == gf.domain.measure
    # writing again produces identical bytes (deterministic formatting)
    path2 = tmp_path / "g2.csv"
    back.write_csv(str(path2))
    assert path.read_text() == path2.read_text()


def test_csv_write_to_file_object(tmp_path):
    dom = Domain.ball(np.zeros(2), 1.0)
    gf = GridFunction.radial(dom, 8, fn=lambda r: r)
    buf = io.StringIO()
    gf.write_csv(buf)
    path = tmp_path / "g.csv"
    gf.write_csv(str(path))
    assert buf.getvalue() == path.read_text()


def test_csv_rejects_malformed_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x1,x2,weight,value\n0,0,1,1\n")
    with pytest.raises(ConfigError, match="header"):
        GridFunction.read_csv(str(path))
    path.write_text("# musielak-grid n=2 domain=cone center=0,0 radius=1 "
                    "layout=radial m=4\nx1,x2,weight,value\n")
    with pytest.raises(ConfigError):
        GridFunction.read_csv(str(path))
