"""Sampled structural checks for generalized Young functions.

Every check here is a falsifier, not a proof: the conditions quantify over
all points, balls, and scales, which is undecidable numerically.  A
``holds = True`` verdict means "no violation on the declared sample", and
each report records the sample sizes so runs can be compared.  The checks:

* ``check_A0``    -- unit-level calibration: phi^{-1}(x, 1) bounded away
                     from 0 and infinity.
* ``check_A1``    -- comparability of phi^{-1}(., t) between points of a
                     small ball, for t between 1 and 1/|B|.
* ``check_A2pp``  -- agreement with the spatial tail profile up to a scale
                     factor beta and an additive error h(x).
* ``check_normalized`` -- the three-part normalized form (exact unit
                     calibration, ball comparability down to t = 0, and
                     exact tail agreement on [0, 1]).
* ``check_growth_condition`` -- integrability of (t/phi_inf(t))^{a/(n-a)}
                     near zero, the gateway to the conjugate-transform
                     machinery.
* ``check_grows_more_slowly`` -- decay of sup_x theta(x, c t)/phi(x, t)
                     along a t-ladder, for a grid of c.

The default ball sample uses radii 2^{-k} (k = 0..12, filtered to measure
at most 1), 32 centers per radius, 16 point-pairs per ball and 24 scales
per ball.  Essential suprema are approximated by maxima over the sample;
all built-in spatial fields are continuous, so this loses nothing.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NormalizationError
from .gyf import GYF, default_x_samples, limit_function, SphereLimitGYF
from .quadrature import _panel_values
from .reports import ConditionReport

__all__ = [
    "check_A0",
    "check_A1",
    "check_A2pp",
    "check_normalized",
    "check_growth_condition",
    "check_grows_more_slowly",
    "a2_defect_profile",
    "unit_ball_volume",
]

# Default ball-sample bounds.
BALL_RADII_EXP = 13          # radii 2^0 .. 2^-12 before the |B| <= 1 filter
BALL_CENTERS = 32
BALL_PAIRS = 16
BALL_SCALES = 24
BETA_FLOOR = 1e-4            # smallest comparability constant we accept
_T_EPS = 1e-8                # lower anchor for log-spaced scale grids


def unit_ball_volume(n):
    """Volume of the unit ball in R^n: pi^{n/2} / Gamma(n/2 + 1)."""
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def _tail_profile(phi):
    """Limit profile of ``phi`` for large |x|, or raise if unavailable."""
    prof = limit_function(phi)
    if isinstance(prof, SphereLimitGYF) and not prof.converged:
        raise NormalizationError(
            "tail profile of %r did not converge on the sampling spheres; "
            "limit data unavailable" % (phi,)
        )
    return prof


def _ball_sample(n, rng, radii=None, centers=BALL_CENTERS, pairs=BALL_PAIRS,
                 scales=BALL_SCALES):
    """Yield (center, radius, points, ts) for each sampled ball.

    Radii default to 2^-k filtered so the ball measure is at most 1.
    Points are 2*pairs uniform draws from the ball; ts are log-spaced in
    [1, 1/|B|].
    """
    wn = unit_ball_volume(n)
    if radii is None:
        radii = [2.0 ** (-k) for k in range(BALL_RADII_EXP)]
    radii = [r for r in radii if wn * r ** n <= 1.0 + 1e-12]
    for r in radii:
        vol = wn * r ** n
        cs = rng.normal(size=(centers, n)) * 2.0
        cs[0] = 0.0
        t_hi = max(1.0 / vol, 1.0)
        ts = np.geomspace(1.0, t_hi, scales)
        for c in cs:
            m = 2 * pairs
            z = rng.normal(size=(m, n))
            z /= np.linalg.norm(z, axis=1, keepdims=True)
            rad = r * rng.random(m) ** (1.0 / n)
            yield c, r, c + z * rad[:, None], ts


def _min_inverse_ratio(phi, rng, radii=None, centers=BALL_CENTERS,
                       pairs=BALL_PAIRS, scales=BALL_SCALES, include_zero_end=False):
    """Smallest value of phi^{-1}(y,t)/phi^{-1}(x,t) over sampled balls.

    One batched inverse evaluation covers every (point, scale) pair; the
    per-ball reduction then takes column min/max, which dominates every
    ordered point-pair within the ball.  Returns (beta, worst) where worst
    records the binding ball/scale/points.
    """
    balls = list(_ball_sample(phi.n, rng, radii, centers, pairs, scales))
    if not balls:
        return 1.0, {}
    blocks_x, blocks_t, spans = [], [], []
    for c, r, pts, ts in balls:
        if include_zero_end:
            # march the scale grid down toward 0 (t = 0 itself is trivial:
            # both inverses vanish)
            ts = np.geomspace(_T_EPS, ts[-1], ts.size)
        m, k = pts.shape[0], ts.size
        blocks_x.append(np.repeat(pts, k, axis=0))
        blocks_t.append(np.tile(ts, m))
        spans.append((m, k))
    X = np.concatenate(blocks_x, axis=0)
    T = np.concatenate(blocks_t)
    inv = phi.inverse_xt(X, T)

    beta = np.inf
    worst = {}
    pos = 0
    for (c, r, pts, ts), (m, k) in zip(balls, spans):
        if include_zero_end:
            ts = np.geomspace(_T_EPS, ts[-1], ts.size)
        grid = inv[pos:pos + m * k].reshape(m, k)
        pos += m * k
        lo = grid.min(axis=0)
        hi = grid.max(axis=0)
        ok = hi > 0
        if not ok.any():
            continue
        ratio = np.where(ok, lo / np.where(ok, hi, 1.0), np.inf)
        j = int(np.argmin(ratio))
        if ratio[j] < beta:
            beta = float(ratio[j])
            worst = {
                "center": c.tolist(),
                "radius": float(r),
                "t": float(ts[j]),
                "x": pts[int(np.argmax(grid[:, j]))].tolist(),
                "y": pts[int(np.argmin(grid[:, j]))].tolist(),
                "ratio": float(ratio[j]),
            }
    if not np.isfinite(beta):
        beta = 1.0
    return min(beta, 1.0), worst


def check_A0(phi, xs=None, rng=None):
    """Unit-level calibration: m = inf, M = sup of phi^{-1}(x, 1).

    Holds iff 0 < m and M < inf on the sample; the witness is
    beta = min(m, 1/M).  The report carries both a coarse and a refined
    estimate; refinement can only shrink the witness.
    """
    rng = np.random.default_rng(rng if rng is not None else 0)
    if xs is None:
        xs = default_x_samples(phi.n, rng)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    extra = rng.normal(size=(4 * xs.shape[0], phi.n)) * 4.0
    fine = np.concatenate([xs, extra], axis=0)

    def witness(pts):
        inv1 = phi.inverse_xt(pts, np.ones(pts.shape[0]))
        m = float(inv1.min())
        M = float(inv1.max())
        ok = m > 1e-9 and np.isfinite(M) and M < 1e9
        beta = min(m, 1.0 / M) if ok else 0.0
        return beta, m, M, inv1

    beta_c, m_c, M_c, _ = witness(xs)
    beta_f, m_f, M_f, inv1 = witness(fine)
    holds = beta_f > 0.0
    j_lo = int(np.argmin(inv1))
    j_hi = int(np.argmax(inv1))
    return ConditionReport(
        condition="A0 (unit calibration)",
        holds=holds,
        beta=beta_f if holds else None,
        worst_sample={
            "x_min": fine[j_lo].tolist(), "inv_min": float(inv1[j_lo]),
            "x_max": fine[j_hi].tolist(), "inv_max": float(inv1[j_hi]),
        },
        counts={"points_coarse": int(xs.shape[0]), "points_fine": int(fine.shape[0])},
        details={"beta_coarse": beta_c, "beta_fine": beta_f,
                 "inf_inv1": m_f, "sup_inv1": M_f},
    )


def check_A1(phi, rng=None, beta_floor=BETA_FLOOR, radii=None,
             centers=BALL_CENTERS, pairs=BALL_PAIRS, scales=BALL_SCALES):
    """Ball comparability of inverses for scales t in [1, 1/|B|].

    Estimates the largest beta with beta * phi^{-1}(x,t) <= phi^{-1}(y,t)
    for x, y in the same sampled ball.  Holds iff the refined estimate
    stays at or above ``beta_floor``.  Both the coarse and the refined
    estimate are reported; the refined one uses twice the pairs and scales
    and is never larger.
    """
    rng = np.random.default_rng(rng if rng is not None else 0)
    beta_c, _ = _min_inverse_ratio(phi, rng, radii, centers, pairs, scales)
    rng2 = np.random.default_rng(rng.integers(1 << 31))
    beta_f, worst = _min_inverse_ratio(
        phi, rng2, radii, centers, 2 * pairs, 2 * scales)
    beta_f = min(beta_f, beta_c)
    holds = beta_f >= beta_floor
    return ConditionReport(
        condition="A1 (ball comparability)",
        holds=holds,
        beta=beta_f if holds else None,
        worst_sample=worst,
        counts={"radii": BALL_RADII_EXP if radii is None else len(radii),
                "centers": centers, "pairs": pairs, "scales": scales},
        details={"beta_coarse": beta_c, "beta_fine": beta_f,
                 "beta_floor": beta_floor},
    )


def _a2_defects(phi, prof, beta, xs, ts, hx):
    """Max defects of the two tail-agreement inequalities on a sample grid.

    (a)  phi(x, beta*t) - prof(t) - h(x)   where prof(t) <= 1,
    (b)  prof(beta*t)   - phi(x, t) - h(x) where phi(x,t) <= 1.
    """
    m, k = xs.shape[0], ts.size
    X = np.repeat(xs, k, axis=0)
    T = np.tile(ts, m)
    H = np.repeat(hx, k)
    prof_t = prof.phi_batch(None, ts)
    prof_bt = prof.phi_batch(None, beta * ts)
    phi_t = phi.phi_xt(X, T).reshape(m, k)
    phi_bt = phi.phi_xt(X, beta * T).reshape(m, k)

    mask_a = (prof_t <= 1.0)[None, :] & np.isfinite(phi_bt)
    defect_a = np.where(mask_a, phi_bt - prof_t[None, :] - H.reshape(m, k), -np.inf)
    mask_b = (phi_t <= 1.0) & np.isfinite(phi_t)
    defect_b = np.where(mask_b, prof_bt[None, :] - phi_t - H.reshape(m, k), -np.inf)
    return defect_a, defect_b


def check_A2pp(phi, h=None, beta=1.0, xs=None, ts=None, rng=None, tol=1e-8):
    """Tail agreement up to scale beta and additive error h(x).

    Verifies on samples that phi(x, beta*t) <= phi_inf(t) + h(x) whenever
    phi_inf(t) is in [0, 1], and phi_inf(beta*t) <= phi(x, t) + h(x)
    whenever phi(x, t) is in [0, 1].  Raises ``NormalizationError`` when
    the tail profile cannot be resolved.
    """
    if not (0.0 < beta <= 1.0):
        raise ValueError("beta must lie in (0, 1], got %r" % (beta,))
    prof = _tail_profile(phi)
    rng = np.random.default_rng(rng if rng is not None else 0)
    if xs is None:
        xs = default_x_samples(phi.n, rng)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if ts is None:
        t_unit = float(prof.inverse(None, 1.0))
        if not np.isfinite(t_unit) or t_unit <= 0:
            t_unit = 1.0
        ts = np.geomspace(_T_EPS * t_unit, max(t_unit, 1.0) * 4.0, 72)
    ts = np.asarray(ts, dtype=float)
    if h is None:
        hx = np.zeros(xs.shape[0])
    else:
        hx = np.asarray(h(xs), dtype=float)
        if (hx < 0).any():
            raise ValueError("additive error field h must be nonnegative")

    defect_a, defect_b = _a2_defects(phi, prof, beta, xs, ts, hx)
    worst_a = float(defect_a.max())
    worst_b = float(defect_b.max())
    worst = max(worst_a, worst_b)
    holds = worst <= tol
    which = defect_a if worst_a >= worst_b else defect_b
    i, j = np.unravel_index(int(np.argmax(which)), which.shape)
    return ConditionReport(
        condition="A2'' (tail agreement)",
        holds=holds,
        beta=beta if holds else None,
        worst_sample={"x": xs[i].tolist(), "t": float(ts[j]),
                      "defect": worst,
                      "side": "scale-up" if worst_a >= worst_b else "scale-down"},
        counts={"points": int(xs.shape[0]), "scales": int(ts.size)},
        details={"max_defect_up": worst_a, "max_defect_down": worst_b,
                 "tolerance": tol},
    )


def a2_defect_profile(phi, beta=1.0, xs=None, ts=None, rng=None):
    """Pointwise additive error needed for tail agreement at each sample x.

    Returns (xs, defects) where defects[i] is the smallest h(x_i) making
    both tail-agreement inequalities hold on the scale grid -- i.e. the
    positive part of the worst defect.  Useful to exhibit decay of the
    required error for families whose spatial dependence fades at infinity.
    """
    prof = _tail_profile(phi)
    rng = np.random.default_rng(rng if rng is not None else 0)
    if xs is None:
        xs = default_x_samples(phi.n, rng)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if ts is None:
        t_unit = float(prof.inverse(None, 1.0))
        if not np.isfinite(t_unit) or t_unit <= 0:
            t_unit = 1.0
        ts = np.geomspace(_T_EPS * t_unit, max(t_unit, 1.0) * 4.0, 72)
    ts = np.asarray(ts, dtype=float)
    defect_a, defect_b = _a2_defects(phi, prof, beta, xs, ts,
                                     np.zeros(xs.shape[0]))
    per_x = np.maximum(defect_a.max(axis=1), defect_b.max(axis=1))
    return xs, np.maximum(per_x, 0.0)


def check_normalized(phi, rng=None, tol_cal=1e-6, tol_tail=1e-6,
                     beta_floor=BETA_FLOOR, radii=None,
                     centers=BALL_CENTERS, pairs=BALL_PAIRS, scales=BALL_SCALES):
    """Three-part check of the normalized form.

    1. exact unit calibration: phi^{-1}(x, 1) = 1 at every sampled x;
    2. ball comparability of inverses extended down to t = 0 (the scale
       grid marches to 0; t = 0 itself is trivial since both sides vanish);
    3. exact tail agreement: phi(x, t) = phi_inf(t) for t in [0, 1].
    """
    rng = np.random.default_rng(rng if rng is not None else 0)
    xs = default_x_samples(phi.n, rng)

    inv1 = phi.inverse_xt(xs, np.ones(xs.shape[0]))
    cal_defect = float(np.abs(inv1 - 1.0).max())
    cal_ok = cal_defect <= tol_cal

    beta_balls, worst_ball = _min_inverse_ratio(
        phi, rng, radii, centers, pairs, scales, include_zero_end=True)
    ball_ok = beta_balls >= beta_floor

    prof = _tail_profile(phi)
    ts = np.geomspace(_T_EPS, 1.0, 40)
    m, k = xs.shape[0], ts.size
    vals = phi.phi_xt(np.repeat(xs, k, axis=0), np.tile(ts, m)).reshape(m, k)
    ref = prof.phi_batch(None, ts)[None, :]
    scale = np.maximum(np.abs(ref), 1e-300)
    tail_defect = float((np.abs(vals - ref) / scale).max())
    tail_ok = tail_defect <= tol_tail

    holds = cal_ok and ball_ok and tail_ok
    return ConditionReport(
        condition="normalized form",
        holds=holds,
        beta=beta_balls if holds else None,
        worst_sample=worst_ball,
        counts={"points": int(xs.shape[0]), "scales_tail": int(ts.size),
                "centers": centers, "pairs": pairs},
        details={
            "unit_calibration_defect": cal_defect,
            "unit_calibration_ok": cal_ok,
            "ball_beta": beta_balls,
            "ball_ok": ball_ok,
            "tail_agreement_defect": tail_defect,
            "tail_agreement_ok": tail_ok,
        },
    )


def check_growth_condition(phi, alpha, octaves=60, ratio_cut=0.98):
    """Integrability of (t/phi_inf(t))^{alpha/(n-alpha)} near zero.

    Integrates octave by octave down from t = 1 with fixed Gauss panels in
    the log variable and inspects the ratio of consecutive octave
    contributions.  A geometric tail (mean ratio of the last octaves below
    ``ratio_cut``) is summed in closed form and the pair
    ``(True, integral over (0, 1])`` is returned; a flat or growing tail
    yields ``(False, inf)``.  The decision resolves tails up to exponent
    -1 + log2(1/ratio_cut) ~ -0.97; integrands flatter than that are
    declared divergent.
    """
    if not (0.0 < alpha < phi.n):
        raise ValueError("alpha must lie in (0, n), got %r" % (alpha,))
    prof = _tail_profile(phi)
    expo = alpha / (phi.n - alpha)

    def g(t):
        t = np.asarray(t, dtype=float)
        v = prof.phi_batch(None, t)
        out = np.zeros_like(t)
        pos = v > 0.0
        out[pos] = (t[pos] / v[pos]) ** expo
        out[~pos & (t > 0)] = np.inf
        return out

    u_edges = -math.log(2.0) * np.arange(octaves + 1)
    inc = _panel_values(g, u_edges[1:], u_edges[:-1])
    if not np.all(np.isfinite(inc)):
        return False, np.inf

    tail = inc[-8:]
    if tail.max() <= 0.0:
        return True, float(inc.sum())
    prev = inc[-9:-1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(prev > 0, tail / prev, 0.0)
    rho = float(ratios.mean())
    if rho >= ratio_cut:
        return False, np.inf
    closure = float(inc[-1]) * rho / (1.0 - rho) if rho > 0 else 0.0
    return True, float(inc.sum() + closure)


def check_grows_more_slowly(theta, phi, cs=(0.5, 1.0, 2.0, 8.0), xs=None,
                            rng=None, rungs=40, slope_cut=-0.01):
    """Decay of sup_x theta(x, c*t) / phi(x, t) along a dyadic t-ladder.

    For each c in the grid, takes the max ratio over the x-sample at
    t = 2^j (j = 0..rungs) and requires the tail of the ladder to decay:
    the log-log slope over the top half must be at most ``slope_cut`` and
    the last rung must sit below the first.  True only if every c passes.
    """
    rng = np.random.default_rng(rng if rng is not None else 0)
    if xs is None:
        xs = default_x_samples(max(theta.n, phi.n), rng)
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ts = 2.0 ** np.arange(rungs + 1)
    m, k = xs.shape[0], ts.size
    X = np.repeat(xs, k, axis=0)
    T = np.tile(ts, m)
    den = phi.phi_xt(X, T).reshape(m, k)

    for c in cs:
        num = theta.phi_xt(X, c * T).reshape(m, k)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(den > 0, num / den, np.inf)
        r = ratio.max(axis=0)
        if not np.all(np.isfinite(r)):
            return False
        half = k // 2
        if r[-1] >= r[0] and r[-1] > 0:
            return False
        lo = max(r[half], 1e-300)
        hi = max(r[-1], 1e-300)
        slope = math.log(hi / lo) / math.log(ts[-1] / ts[half])
        if r[-1] > 0 and slope > slope_cut:
            return False
    return True
