import numpy as np
import pytest

from musielak import accel


@pytest.fixture
def cloud(rng):
    src = rng.uniform(-1.0, 1.0, size=(300, 2))
    w = rng.uniform(0.5, 1.5, size=300)
    v = rng.uniform(0.0, 2.0, size=300)
    evals = rng.uniform(-0.5, 0.5, size=(40, 2))
    return src, w, v, evals


def test_backend_name_reports():
    assert accel.backend_name() in ("numba", "numpy")


def test_power_sum_matches_fallback(cloud):
    src, w, v, evals = cloud
    got = accel.kernel_power_sum(src, w, v, evals, 1.3)
    ref = accel._power_sum_np(src, w, v, evals, 1.3)
    assert np.allclose(got, ref, rtol=1e-12)


def test_power_sum_matches_dense_numpy(cloud):
    src, w, v, evals = cloud
    got = accel.kernel_power_sum(src, w, v, evals, 1.0)
    d = np.linalg.norm(evals[:, None, :] - src[None, :, :], axis=2)
    with np.errstate(divide="ignore"):
        contrib = np.where(d > 0.0, w * v / d, 0.0)
    assert np.allclose(got, contrib.sum(axis=1), rtol=1e-12)


def test_power_sum_skips_coincident_points(cloud):
    src, w, v, _ = cloud
    # evaluating exactly at a source point drops the singular self-term
    got = accel.kernel_power_sum(src, w, v, src[:3], 2.0)
    assert np.all(np.isfinite(got))


def test_ball_sums_match_brute_force(cloud):
    src, w, v, evals = cloud
    radii = np.array([0.25, 0.5, 1.0, 2.0])
    wv, ws = accel.ball_sums(src, w, v, evals, radii)
    d = np.linalg.norm(evals[:, None, :] - src[None, :, :], axis=2)
    for k, r in enumerate(radii):
        inside = d <= r
        assert np.allclose(wv[:, k], (inside * (w * v)).sum(axis=1),
                           rtol=1e-12)
        assert np.allclose(ws[:, k], (inside * w).sum(axis=1), rtol=1e-12)


def test_ball_sums_fallback_agrees(cloud):
    src, w, v, evals = cloud
    radii = np.geomspace(0.1, 2.0, 7)
    got = accel.ball_sums(src, w, v, evals, radii)
    ref = accel._ball_sums_np(src, w, v, evals,
                              np.ascontiguousarray(radii ** 2))
    assert np.allclose(got[0], ref[0], rtol=1e-12)
    assert np.allclose(got[1], ref[1], rtol=1e-12)


def test_ball_sums_rejects_unsorted_radii(cloud):
    src, w, v, evals = cloud
    with pytest.raises(ValueError, match="increasing"):
        accel.ball_sums(src, w, v, evals, np.array([1.0, 0.5]))


def test_dot_kernel_matches_einsum(cloud, rng):
    src, w, _, evals = cloud
    vec = rng.normal(size=(src.shape[0], 2))
    got = accel.dot_kernel_sum(src, w, vec, evals, 2.0)
    diff = evals[:, None, :] - src[None, :, :]
    d = np.linalg.norm(diff, axis=2)
    dots = np.einsum("mjk,jk->mj", diff, vec)
    with np.errstate(divide="ignore", invalid="ignore"):
        contrib = np.where(d > 0.0, w * dots / d ** 2.0, 0.0)
    assert np.allclose(got, contrib.sum(axis=1), rtol=1e-12)


def test_dot_kernel_fallback_agrees(cloud, rng):
    src, w, _, evals = cloud
    vec = rng.normal(size=(src.shape[0], 2))
    got = accel.dot_kernel_sum(src, w, vec, evals, 1.5)
    ref = accel._dot_sum_np(src, w, vec, evals, 1.5)
    assert np.allclose(got, ref, rtol=1e-12)
