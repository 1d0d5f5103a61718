"""Hot loops for grid sweeps: kernel sums, ball means, far-field dot sums.

Each kernel ships two implementations: a compiled loop (numba, parallel over
evaluation points) used when available, and a chunked-numpy fallback.  Set
the environment variable MUSIELAK_NUMBA=0 before import to force the
fallback — useful for debugging and as the benchmark baseline.  Both paths
accumulate per evaluation point in a fixed order, so results are
bit-reproducible regardless of thread count.
"""

import os

import numpy as np

__all__ = [
    "HAVE_NUMBA",
    "backend_name",
    "kernel_power_sum",
    "ball_sums",
    "dot_kernel_sum",
]

_CHUNK = 1024  # evaluation points per numpy-fallback block

try:
    if os.environ.get("MUSIELAK_NUMBA", "1") == "0":
        raise ImportError("numba disabled by MUSIELAK_NUMBA=0")
    from numba import njit, prange
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn
        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range


def backend_name():
    return "numba" if HAVE_NUMBA else "numpy"


def _prep(points):
    return np.ascontiguousarray(np.atleast_2d(np.asarray(points, dtype=float)))


# --------------------------------------------------------------------------
# sum_j w_j v_j |x_p - y_j|^(-expo), skipping coincident points
# --------------------------------------------------------------------------

@njit(parallel=True, cache=True)
def _power_sum_nb(src, w, v, evals, expo):
    n_eval, n_src, dim = evals.shape[0], src.shape[0], src.shape[1]
    out = np.zeros(n_eval)
    for p in prange(n_eval):
        acc = 0.0
        for j in range(n_src):
            d2 = 0.0
            for k in range(dim):
                diff = evals[p, k] - src[j, k]
                d2 += diff * diff
            if d2 > 0.0:
                acc += w[j] * v[j] * d2 ** (-0.5 * expo)
        out[p] = acc
    return out


def _power_sum_np(src, w, v, evals, expo):
    out = np.empty(evals.shape[0])
    wv = w * v
    for lo in range(0, evals.shape[0], _CHUNK):
        blk = evals[lo:lo + _CHUNK]
        d2 = ((blk[:, None, :] - src[None, :, :]) ** 2).sum(axis=2)
        with np.errstate(divide="ignore"):
            kern = np.where(d2 > 0.0, d2 ** (-0.5 * expo), 0.0)
        out[lo:lo + _CHUNK] = kern @ wv
    return out


def kernel_power_sum(src, w, v, evals, expo):
    """sum_j w_j v_j |x - y_j|^(-expo) at each evaluation point x.

    Source points coinciding with x are skipped; singular self-terms are the
    caller's host-cell correction.
    """
    src, evals = _prep(src), _prep(evals)
    w = np.ascontiguousarray(np.asarray(w, dtype=float))
    v = np.ascontiguousarray(np.asarray(v, dtype=float))
    if HAVE_NUMBA:
        return _power_sum_nb(src, w, v, evals, float(expo))
    return _power_sum_np(src, w, v, evals, float(expo))


# --------------------------------------------------------------------------
# weighted sums over the balls {|y - x| <= r_k} for an ascending radius ladder
# --------------------------------------------------------------------------

@njit(parallel=True, cache=True)
def _ball_sums_nb(src, w, v, evals, radii2):
    n_eval, n_src, dim = evals.shape[0], src.shape[0], src.shape[1]
    n_rad = radii2.shape[0]
    wv_out = np.zeros((n_eval, n_rad))
    w_out = np.zeros((n_eval, n_rad))
    for p in prange(n_eval):
        wv_bucket = np.zeros(n_rad)
        w_bucket = np.zeros(n_rad)
        for j in range(n_src):
            d2 = 0.0
            for k in range(dim):
                diff = evals[p, k] - src[j, k]
                d2 += diff * diff
            idx = np.searchsorted(radii2, d2)
            if idx < n_rad:
                wv_bucket[idx] += w[j] * v[j]
                w_bucket[idx] += w[j]
        acc_wv = 0.0
        acc_w = 0.0
        for k in range(n_rad):
            acc_wv += wv_bucket[k]
            acc_w += w_bucket[k]
            wv_out[p, k] = acc_wv
            w_out[p, k] = acc_w
    return wv_out, w_out


def _ball_sums_np(src, w, v, evals, radii2):
    n_eval, n_rad = evals.shape[0], radii2.shape[0]
    wv_out = np.empty((n_eval, n_rad))
    w_out = np.empty((n_eval, n_rad))
    wv = w * v
    for lo in range(0, n_eval, _CHUNK):
        blk = evals[lo:lo + _CHUNK]
        d2 = ((blk[:, None, :] - src[None, :, :]) ** 2).sum(axis=2)
        for k, r2 in enumerate(radii2):
            mask = d2 <= r2
            wv_out[lo:lo + _CHUNK, k] = mask @ wv
            w_out[lo:lo + _CHUNK, k] = mask @ w
    return wv_out, w_out


def ball_sums(src, w, v, evals, radii):
    """Cumulative weighted sums of v and of 1 over balls of the given radii.

    Returns (wv_sums, w_sums), each of shape (n_eval, n_radii); radii must be
    ascending.  Ball membership is inclusive: |y - x| <= r.
    """
    src, evals = _prep(src), _prep(evals)
    w = np.ascontiguousarray(np.asarray(w, dtype=float))
    v = np.ascontiguousarray(np.asarray(v, dtype=float))
    radii = np.asarray(radii, dtype=float)
    if np.any(np.diff(radii) <= 0.0):
        raise ValueError("radius ladder must be strictly increasing")
    radii2 = np.ascontiguousarray(radii ** 2)
    if HAVE_NUMBA:
        return _ball_sums_nb(src, w, v, evals, radii2)
    return _ball_sums_np(src, w, v, evals, radii2)


# --------------------------------------------------------------------------
# sum_j w_j  g_j . (x - y_j) |x - y_j|^(-power)   (far field of the
# gradient representation integral)
# --------------------------------------------------------------------------

@njit(parallel=True, cache=True)
def _dot_sum_nb(src, w, vec, evals, power):
    n_eval, n_src, dim = evals.shape[0], src.shape[0], src.shape[1]
    out = np.zeros(n_eval)
    for p in prange(n_eval):
        acc = 0.0
        for j in range(n_src):
            d2 = 0.0
            dot = 0.0
            for k in range(dim):
                diff = evals[p, k] - src[j, k]
                d2 += diff * diff
                dot += vec[j, k] * diff
            if d2 > 0.0:
                acc += w[j] * dot * d2 ** (-0.5 * power)
        out[p] = acc
    return out


def _dot_sum_np(src, w, vec, evals, power):
    out = np.empty(evals.shape[0])
    for lo in range(0, evals.shape[0], _CHUNK):
        blk = evals[lo:lo + _CHUNK]
        diff = blk[:, None, :] - src[None, :, :]
        d2 = (diff ** 2).sum(axis=2)
        dot = np.einsum("pjk,jk->pj", diff, vec)
        with np.errstate(divide="ignore", invalid="ignore"):
            term = np.where(d2 > 0.0, dot * d2 ** (-0.5 * power), 0.0)
        out[lo:lo + _CHUNK] = term @ w
    return out


def dot_kernel_sum(src, w, vec, evals, power):
    """sum_j w_j vec_j . (x - y_j) |x - y_j|^(-power), skipping coincidences."""
    src, evals = _prep(src), _prep(evals)
    w = np.ascontiguousarray(np.asarray(w, dtype=float))
    vec = np.ascontiguousarray(np.atleast_2d(np.asarray(vec, dtype=float)))
    if HAVE_NUMBA:
        return _dot_sum_nb(src, w, vec, evals, float(power))
    return _dot_sum_np(src, w, vec, evals, float(power))
