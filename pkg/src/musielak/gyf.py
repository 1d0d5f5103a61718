"""Generalized Young functions phi(x, t) and their calculus.

A generalized Young function is, for each point x in R^n, a convex
nondecreasing function of t in [0, inf) with phi(x, 0) = 0, values in
[0, +inf], and superlinear scaling s*phi(x,t) <= phi(x,st) for s >= 1.
Built-in families:

    power                  phi(x,t) = t^p
    orlicz                 phi(x,t) = A(t), one expression for every x
    variable-exponent      phi(x,t) = t^p(x)
    double-phase           phi(x,t) = t^p + a(x) t^q   (or max of the two)
    variable-double-phase  phi(x,t) = t^p(x) + a(x) t^q(x)
    tabulated              phi(x,t) read off a monotone table

Three numeric primitives live on the base class and work for every family:

    inverse    inf{tau >= 0 : phi(x,tau) >= t}   (left-continuous inverse,
               log-domain bisection, +inf past a finite supremum)
    conjugate  sup_{tau >= 0} (tau t - phi(x,tau))   (discrete Legendre
               transform on a 400-points-per-decade grid over [1e-8, 1e8]
               plus golden-section refinement; the value is declared +inf
               when the objective still increases over the last full decade)
    phi_inf    limsup_{|x| -> inf} phi(x,t), from declared field limits when
               available, otherwise from suprema over spheres |x| = 2^k,
               k <= 20, 64 directions

Everything is vectorized over (x, t) rows; `phi_xt` is the one method a
family must implement.
"""

import re

import numpy as np

from .errors import ConfigError, MusielakError
from .fields import SpatialField, compile_expression

CONJ_TAU_MIN = 1e-8
CONJ_TAU_MAX = 1e8
CONJ_PER_DECADE = 400

_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


class EquivalenceError(MusielakError, ArithmeticError):
    """Sampled equivalence constants are degenerate (zero or infinite)."""


def _conj_grid():
    decades = np.log10(CONJ_TAU_MAX / CONJ_TAU_MIN)
    m = int(round(decades * CONJ_PER_DECADE)) + 1
    return np.logspace(np.log10(CONJ_TAU_MIN), np.log10(CONJ_TAU_MAX), m)


_TAU_GRID = _conj_grid()


def _golden_max(fn, a, b, iters=60):
    """Vectorized golden-section max of a concave objective on [a, b] rows."""
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    for _ in range(iters):
        c = b - _GOLDEN * (b - a)
        d = a + _GOLDEN * (b - a)
        keep_left = fn(c) >= fn(d)
        b = np.where(keep_left, d, b)
        a = np.where(keep_left, a, c)
    x = 0.5 * (a + b)
    return fn(x), x


class GYF:
    """Base class: a generalized Young function on R^n."""

    family = "abstract"
    x_independent = False

    def __init__(self, n):
        self.n = int(n)

    # -- family primitive ----------------------------------------------------

    def phi_xt(self, X, T):
        """phi at paired rows: X of shape (m, n) (ignored when x-independent),
        T of shape (m,). Returns shape (m,), values in [0, +inf]."""
        raise NotImplementedError

    def log_phi_xt(self, X, U):
        """log phi(x, e^u) without forming e^u when it overflows.

        Default goes through phi_xt and is only valid for |u| < ~700;
        families with power-type growth override with the exact formula.
        """
        t = np.exp(np.minimum(U, 700.0))
        with np.errstate(divide="ignore"):
            return np.log(self.phi_xt(X, t))

    # -- conveniences ---------------------------------------------------------

    def _as_rows(self, x, m):
        if x is None:
            return np.zeros((m, self.n))
        x = np.asarray(x, dtype=float).reshape(1, -1)
        return np.broadcast_to(x, (m, x.shape[1]))

    def phi(self, x, t):
        return float(self.phi_xt(self._as_rows(x, 1), np.array([float(t)]))[0])

    def phi_batch(self, x, ts):
        ts = np.asarray(ts, dtype=float)
        return self.phi_xt(self._as_rows(x, ts.size), ts.ravel()).reshape(ts.shape)

    # -- left-continuous inverse ----------------------------------------------

    def inverse_xt(self, X, T):
        """inf{tau : phi(x,tau) >= t} by log-domain bisection, row-wise."""
        T = np.asarray(T, dtype=float)
        m = T.size
        X = None if self.x_independent else np.asarray(X, dtype=float)
        out = np.zeros(m)
        live = np.isfinite(T) & (T > 0.0)
        out[np.isinf(T)] = np.inf
        if not np.any(live):
            return out
        Xl = None if X is None else X[live]
        Tl = T[live]
        u_lo = np.full(Tl.shape, np.log(1e-300))
        u_hi = np.maximum(np.log(np.maximum(Tl, 1e-300)), 0.0) + 1.0
        step = np.full(Tl.shape, 1.0)
        rows = (lambda u: self.phi_xt(Xl, np.exp(u)))
        # the doubling scan may probe e^u past the float range when the
        # level is unreachable (bounded phi); inf is the right answer there
        with np.errstate(over="ignore"):
            for _ in range(14):
                need = rows(u_hi) < Tl
                if not np.any(need):
                    break
                u_hi = np.where(need, u_hi + step, u_hi)
                step = np.where(need, step * 2.0, step)
            for _ in range(90):
                u = 0.5 * (u_lo + u_hi)
                too_low = rows(u) < Tl
                u_lo = np.where(too_low, u, u_lo)
                u_hi = np.where(too_low, u_hi, u)
            out[live] = np.exp(0.5 * (u_lo + u_hi))
        return out

    def inverse(self, x, t):
        return float(self.inverse_xt(self._as_rows(x, 1), np.array([float(t)]))[0])

    def inverse_batch(self, x, ts):
        ts = np.asarray(ts, dtype=float)
        return self.inverse_xt(self._as_rows(x, ts.size), ts.ravel()).reshape(ts.shape)

    # -- Young conjugate --------------------------------------------------------

    def _extended_scan(self, x, t_need, tau, phi_g):
        """Grow the scan window by decades until phi(tau)/tau crosses t_need.

        The slope phi/tau is nondecreasing (convexity), so once it meets the
        target every objective tau*t - phi with t <= t_need has turned over.
        Capped at 60 extra decades; a still-rising objective past the cap is
        a genuine divergence (the conjugate is +inf there).
        """
        per = CONJ_PER_DECADE
        for _ in range(60):
            with np.errstate(invalid="ignore"):
                slope_end = phi_g[-1] / tau[-1]
            if not np.isfinite(phi_g[-1]) or slope_end >= t_need:
                break
            ext = tau[-1] * np.logspace(0.0, 1.0, per + 1)[1:]
            tau = np.concatenate([tau, ext])
            phi_g = np.concatenate([phi_g, self.phi_batch(x, ext)])
        return tau, phi_g

    def conjugate_batch(self, x, ts, tau_grid=None):
        """Conjugate at one x for many t: shared grid scan + golden refinement."""
        ts = np.asarray(ts, dtype=float)
        shape = ts.shape
        ts = np.atleast_1d(ts.ravel())
        tau = _TAU_GRID if tau_grid is None else tau_grid
        phi_g = self.phi_batch(x, tau)
        finite_ts = ts[np.isfinite(ts)]
        if finite_ts.size:
            tau, phi_g = self._extended_scan(x, float(np.max(finite_ts)), tau, phi_g)
        out = np.empty(ts.shape)
        decade = CONJ_PER_DECADE
        for lo in range(0, ts.size, 256):
            sl = slice(lo, min(lo + 256, ts.size))
            t_blk = ts[sl]
            obj = t_blk[:, None] * tau[None, :] - phi_g[None, :]
            tail_rise = obj[:, -1] > obj[:, -1 - decade]
            best = np.argmax(obj, axis=1)
            sup0 = np.maximum(obj[np.arange(t_blk.size), best], 0.0)
            a = tau[np.maximum(best - 1, 0)]
            b = tau[np.minimum(best + 1, tau.size - 1)]
            fn = (lambda tt, t_blk=t_blk:
                  t_blk * tt - self.phi_batch(x, tt))
            ref, _ = _golden_max(fn, a, b)
            vals = np.maximum(sup0, np.maximum(ref, 0.0))
            vals[tail_rise] = np.inf
            vals[~np.isfinite(t_blk)] = np.inf
            vals[t_blk <= 0.0] = 0.0
            out[sl] = vals
        return out.reshape(shape)

    def conjugate_xt(self, X, T, chunk=128):
        """Conjugate at paired rows; groups duplicate x rows automatically."""
        T = np.asarray(T, dtype=float)
        if self.x_independent:
            return self.conjugate_batch(None, T)
        X = np.asarray(X, dtype=float)
        key = np.round(X * 2.0 ** 20).astype(np.int64)
        _, inv_idx = np.unique(key, axis=0, return_inverse=True)
        out = np.empty(T.shape)
        for g in range(inv_idx.max() + 1):
            rows = inv_idx == g
            out[rows] = self.conjugate_batch(X[rows][0], T[rows])
        return out

    def conjugate(self, x, t):
        return float(self.conjugate_batch(x, np.array([float(t)]))[0])

    # -- limits -----------------------------------------------------------------

    def limit_profile(self):
        """x-independent GYF equal to limsup_{|x|->inf} phi, when declared."""
        if self.x_independent:
            return self
        return None

    def phi_inf(self, ts):
        return limit_function(self).phi_batch(None, ts)


def _sphere_directions(n, m=64):
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        th = np.linspace(0.0, 2.0 * np.pi, m, endpoint=False)
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if n == 3:
        # Fibonacci sphere
        i = np.arange(m) + 0.5
        z = 1.0 - 2.0 * i / m
        r = np.sqrt(np.maximum(1.0 - z * z, 0.0))
        th = np.pi * (1.0 + 5.0 ** 0.5) * i
        return np.stack([r * np.cos(th), r * np.sin(th), z], axis=1)
    raise ValueError("sphere sampling implemented for n <= 3")


class SphereLimitGYF(GYF):
    """limsup of phi over |x| -> inf, estimated on a dyadic radius ladder.

    The supremum over 64 directions is tabulated at R = 2^20 and compared
    against R = 2^19; `converged` records whether the two agree to 1e-6
    relative on the probe grid.
    """

    family = "limit"
    x_independent = True

    def __init__(self, base, k_max=20, t_lo=1e-8, t_hi=1e8, m_t=321):
        super().__init__(base.n)
        dirs = _sphere_directions(base.n)
        ts = np.logspace(np.log10(t_lo), np.log10(t_hi), m_t)
        sups = []
        for k in (k_max - 1, k_max):
            R = 2.0 ** k
            Xd = np.repeat(dirs * R, ts.size, axis=0)
            Td = np.tile(ts, dirs.shape[0])
            vals = base.phi_xt(Xd, Td).reshape(dirs.shape[0], ts.size)
            sups.append(np.max(vals, axis=0))
        prev, last = sups
        with np.errstate(invalid="ignore"):
            gap = np.abs(last - prev) / (1.0 + np.abs(last))
        gap[~np.isfinite(last) & ~np.isfinite(prev)] = 0.0
        self.converged = bool(np.all(gap[np.isfinite(gap)] <= 1e-6))
        self._ts = ts
        self._vals = np.maximum.accumulate(last)  # enforce monotonicity
        from .tab import MonotoneTab
        self._tab = MonotoneTab(ts, self._vals)

    def phi_xt(self, X, T):
        return np.asarray(self._tab(np.asarray(T, dtype=float)))


def limit_function(phi):
    """The limiting Young function phi_inf as an x-independent GYF."""
    declared = phi.limit_profile()
    if declared is not None:
        return declared
    return SphereLimitGYF(phi)


def phi_infinity(phi, t):
    """Scalar phi_inf(t)."""
    return float(limit_function(phi).phi_batch(None, np.array([float(t)]))[0])


# -- built-in families ---------------------------------------------------------


def _power_conjugate(p, ts):
    """Conjugate of t^p: ((p-1)/p^p') t^p' for p > 1, an indicator for p = 1."""
    ts = np.asarray(ts, dtype=float)
    if p == 1.0:
        return np.where(ts <= 1.0, 0.0, np.inf)
    pp = p / (p - 1.0)
    c = (p - 1.0) * p ** (-pp)
    return c * ts ** pp


class PowerGYF(GYF):
    family = "power"
    x_independent = True

    def __init__(self, p, n=2):
        super().__init__(n)
        if p < 1.0:
            raise ConfigError(f"power family needs p >= 1, got {p}")
        self.p = float(p)

    def phi_xt(self, X, T):
        return np.asarray(T, dtype=float) ** self.p

    def log_phi_xt(self, X, U):
        return self.p * np.asarray(U, dtype=float)

    def inverse_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        return np.where(T > 0, T ** (1.0 / self.p), 0.0)

    def conjugate_batch(self, x, ts, tau_grid=None):
        return _power_conjugate(self.p, ts)

    def conjugate_xt(self, X, T, chunk=128):
        return _power_conjugate(self.p, T)


class OrliczGYF(GYF):
    """x-independent Young function given by a closed-form expression A(t)."""

    family = "orlicz"
    x_independent = True

    def __init__(self, expr, n=2):
        super().__init__(n)
        if callable(expr):
            self._fn = lambda ts: np.asarray(expr(ts), dtype=float)
            self.expr = getattr(expr, "__name__", "<callable>")
        else:
            self.expr = str(expr)
            inner = compile_expression(re.sub(r"\bt\b", "x1", self.expr), 1)
            self._fn = lambda ts: inner(np.asarray(ts, dtype=float).reshape(-1, 1))

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        out = self._fn(T.ravel()).reshape(T.shape)
        return np.where(T == 0.0, 0.0, out)


class VariableExponentGYF(GYF):
    family = "variable-exponent"

    def __init__(self, p_field, n=None):
        super().__init__(p_field.n if n is None else n)
        if self.n != p_field.n:
            raise ValueError("exponent field lives on R^%d, not R^%d"
                             % (p_field.n, self.n))
        probes = p_field(default_x_samples(self.n, rng=3))
        if np.min(probes) < 1.0:
            raise ConfigError(
                "variable exponent dips below 1 (min sampled value %.6g); "
                "t^p(x) is convex only for p >= 1" % float(np.min(probes)))
        if p_field.limit is not None and p_field.limit < 1.0:
            raise ConfigError("variable exponent limit must be >= 1")
        self.p_field = p_field

    def phi_xt(self, X, T):
        P = self.p_field(X)
        return np.asarray(T, dtype=float) ** P

    def log_phi_xt(self, X, U):
        return self.p_field(X) * np.asarray(U, dtype=float)

    def inverse_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        P = self.p_field(X)
        return np.where(T > 0, T ** (1.0 / P), 0.0)

    def conjugate_xt(self, X, T, chunk=128):
        T = np.asarray(T, dtype=float)
        P = self.p_field(X)
        out = np.empty(T.shape)
        lin = P == 1.0
        out[lin] = np.where(T[lin] <= 1.0, 0.0, np.inf)
        pp = P[~lin] / (P[~lin] - 1.0)
        out[~lin] = (P[~lin] - 1.0) * P[~lin] ** (-pp) * T[~lin] ** pp
        return out

    def conjugate_batch(self, x, ts, tau_grid=None):
        ts = np.asarray(ts, dtype=float)
        X = self._as_rows(x, ts.size)
        return self.conjugate_xt(X, ts.ravel()).reshape(ts.shape)

    def limit_profile(self):
        if self.p_field.limit is not None:
            return PowerGYF(self.p_field.limit, self.n)
        return None


class DoublePhaseGYF(GYF):
    """t^p + a(x) t^q, or max(t^p, a(x) t^q) with combine='max'."""

    family = "double-phase"

    def __init__(self, p, q, a_field, n=None, combine="sum"):
        super().__init__(a_field.n if n is None else n)
        if self.n != a_field.n:
            raise ValueError("weight field lives on R^%d, not R^%d"
                             % (a_field.n, self.n))
        if combine not in ("sum", "max"):
            raise ConfigError("double-phase combine must be 'sum' or 'max'")
        if q < p:
            raise ConfigError("double-phase needs q >= p")
        self.p, self.q = float(p), float(q)
        self.a_field = a_field
        self.combine = combine

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        A = self.a_field(X)
        lo = T ** self.p
        hi = A * T ** self.q
        return lo + hi if self.combine == "sum" else np.maximum(lo, hi)

    def log_phi_xt(self, X, U):
        U = np.asarray(U, dtype=float)
        A = self.a_field(X)
        with np.errstate(divide="ignore"):
            la = np.where(A > 0, np.log(np.maximum(A, 1e-300)), -np.inf)
        lo = self.p * U
        hi = la + self.q * U
        return np.logaddexp(lo, hi) if self.combine == "sum" else np.maximum(lo, hi)

    def inverse_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        if self.combine == "max":
            A = self.a_field(X)
            inv_lo = np.where(T > 0, T ** (1.0 / self.p), 0.0)
            with np.errstate(divide="ignore"):
                inv_hi = np.where((T > 0) & (A > 0),
                                  (T / np.maximum(A, 1e-300)) ** (1.0 / self.q),
                                  np.inf)
            return np.minimum(inv_lo, inv_hi)
        return super().inverse_xt(X, T)

    def limit_profile(self):
        if self.a_field.limit is not None:
            a_inf = SpatialField.constant(self.a_field.limit, self.n, name="a_inf")
            return DoublePhaseGYF(self.p, self.q, a_inf, self.n, self.combine)
        return None


class VariableDoublePhaseGYF(GYF):
    family = "variable-double-phase"

    def __init__(self, p_field, q_field, a_field, n=None):
        super().__init__(p_field.n if n is None else n)
        for f in (p_field, q_field, a_field):
            if f.n != self.n:
                raise ValueError("field %r lives on R^%d, not R^%d"
                                 % (f, f.n, self.n))
        self.p_field, self.q_field, self.a_field = p_field, q_field, a_field

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        return T ** self.p_field(X) + self.a_field(X) * T ** self.q_field(X)

    def log_phi_xt(self, X, U):
        U = np.asarray(U, dtype=float)
        A = self.a_field(X)
        with np.errstate(divide="ignore"):
            la = np.where(A > 0, np.log(np.maximum(A, 1e-300)), -np.inf)
        return np.logaddexp(self.p_field(X) * U, la + self.q_field(X) * U)

    def limit_profile(self):
        lims = (self.p_field.limit, self.q_field.limit, self.a_field.limit)
        if any(v is None for v in lims):
            return None
        a_inf = SpatialField.constant(lims[2], self.n, name="a_inf")
        return DoublePhaseGYF(lims[0], lims[1], a_inf, self.n, "sum")


class TabulatedGYF(GYF):
    family = "tabulated"
    x_independent = True

    def __init__(self, tab, n=2):
        super().__init__(n)
        self.tab = tab

    def phi_xt(self, X, T):
        return np.asarray(self.tab(np.asarray(T, dtype=float)))

    def inverse_xt(self, X, T):
        return np.asarray(self.tab.inverse(np.asarray(T, dtype=float)))


class ConjugateGYF(GYF):
    """The Young conjugate of a base GYF, itself usable as a GYF.

    For x-independent bases the conjugate is tabulated once on the scan grid
    and interpolated; x-dependent bases fall through to the row-wise
    transform. Closed forms on the base (power families) short-circuit both.
    """

    family = "conjugate"

    def __init__(self, base):
        super().__init__(base.n)
        self.base = base
        self.x_independent = base.x_independent
        self._tab = None

    def _profile(self):
        if self._tab is None:
            from .tab import MonotoneTab
            vals = self.base.conjugate_batch(None, _TAU_GRID)
            vals = np.maximum.accumulate(vals)
            self._tab = MonotoneTab(_TAU_GRID, vals)
        return self._tab

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        if type(self.base).conjugate_xt is not GYF.conjugate_xt:
            X2 = self.base._as_rows(None, T.size) if X is None else X
            return self.base.conjugate_xt(X2, T)
        if self.x_independent:
            return np.asarray(self._profile()(T))
        return self.base.conjugate_xt(X, T)


class DilatedGYF(GYF):
    """phi_k(x, t) = phi(x, t / k); its conjugate is phi~(x, k t)."""

    family = "dilated"

    def __init__(self, base, k):
        super().__init__(base.n)
        self.base = base
        self.k = float(k)
        self.x_independent = base.x_independent

    def phi_xt(self, X, T):
        return self.base.phi_xt(X, np.asarray(T, dtype=float) / self.k)

    def log_phi_xt(self, X, U):
        return self.base.log_phi_xt(X, np.asarray(U, dtype=float) - np.log(self.k))

    def inverse_xt(self, X, T):
        return self.k * self.base.inverse_xt(X, T)


# -- sampled structure checks ----------------------------------------------------


def default_x_samples(n, rng=None, m_near=24, far_ladder=True):
    """Origin, scattered near points, and a dyadic far ladder along axes."""
    rng = np.random.default_rng(rng)
    pts = [np.zeros((1, n))]
    pts.append(rng.normal(size=(m_near, n)))
    if far_ladder:
        for k in range(1, 13, 2):
            e = np.zeros((n, n))
            np.fill_diagonal(e, 2.0 ** k)
            pts.append(e)
    return np.concatenate(pts, axis=0)


def check_delta2(phi, xs=None, ts=None, cap=1e12):
    """Estimate the doubling constant sup phi(x,2t)/phi(x,t) on a sample.

    Returns (holds, c): holds means the ratio stayed finite and stable when
    the t-grid was refined by 2x.
    """
    if xs is None:
        xs = default_x_samples(phi.n, rng=0)
    ratios = []
    for m_t in (96, 192):
        ts_k = np.logspace(-8.0, 8.0, m_t) if ts is None else np.asarray(ts)
        X = np.repeat(xs, ts_k.size, axis=0)
        T = np.tile(ts_k, xs.shape[0])
        lo = phi.phi_xt(X, T)
        hi = phi.phi_xt(X, 2.0 * T)
        ok = (lo > 0) & np.isfinite(lo)
        if not np.all(np.isfinite(hi[ok])):
            return False, np.inf
        ratios.append(float(np.max(hi[ok] / lo[ok])) if np.any(ok) else 1.0)
    c = max(ratios)
    holds = np.isfinite(c) and c < cap and abs(ratios[1] - ratios[0]) <= 0.05 * c
    return bool(holds), c


def estimate_equivalence(phi, psi, mode="approx", xs=None, ts=None):
    """Sampled equivalence constants between two GYFs.

    mode='approx':  largest c1, smallest c2 with c1 phi <= psi <= c2 phi.
    mode='simeq':   largest c1, smallest c2 with
                    phi(x, c1 t) <= psi(x, t) <= phi(x, c2 t).
    Raises EquivalenceError when the sampled constants degenerate.
    """
    if mode not in ("approx", "simeq"):
        raise ValueError(f"unknown equivalence mode {mode!r}")
    if xs is None:
        xs = default_x_samples(max(phi.n, 1), rng=1)
    if ts is None:
        ts = np.logspace(-6.0, 6.0, 121)
    xs = np.asarray(xs, dtype=float)
    ts = np.asarray(ts, dtype=float)
    if xs.size == 0 or ts.size == 0:
        raise ValueError("empty sample")
    X = np.repeat(xs, ts.size, axis=0)
    T = np.tile(ts, xs.shape[0])
    pv = phi.phi_xt(X, T)
    qv = psi.phi_xt(X, T)
    if mode == "approx":
        ok = (pv > 0) & np.isfinite(pv) & np.isfinite(qv)
        if not np.any(ok):
            raise EquivalenceError("no usable sample points")
        r = qv[ok] / pv[ok]
        c1, c2 = float(np.min(r)), float(np.max(r))
    else:
        ok = (qv > 0) & np.isfinite(qv) & (T > 0)
        if not np.any(ok):
            raise EquivalenceError("no usable sample points")
        tau = phi.inverse_xt(X[ok], qv[ok])
        r = tau / T[ok]
        c1, c2 = float(np.min(r)), float(np.max(r))
    if not (np.isfinite(c1) and np.isfinite(c2)) or c1 <= 0.0:
        raise EquivalenceError(f"degenerate constants ({c1}, {c2})")
    return c1, c2


# -- declarative construction ------------------------------------------------------


def _fields_by_name(doc, n, required, optional=()):
    out = {}
    for fdoc in doc.get("fields", []):
        f = SpatialField.from_config(fdoc, n)
        if not f.name:
            raise ConfigError("each field needs a 'name'")
        out[f.name] = f
    missing = [r for r in required if r not in out]
    if missing:
        raise ConfigError(f"family {doc['family']!r} needs fields {missing}")
    unknown = set(out) - set(required) - set(optional)
    if unknown:
        raise ConfigError(f"family {doc['family']!r} got unknown fields {sorted(unknown)}")
    return out


def gyf_from_config(doc):
    """Build a GYF from a declarative mapping (see README for the schema)."""
    allowed = {"family", "n", "params", "fields", "recipe", "base"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"config has unknown keys {sorted(unknown)}")
    family = doc.get("family")
    if family is None:
        raise ConfigError("config is missing 'family'")
    n = int(doc.get("n", 2))
    params = dict(doc.get("params", {}))

    def take(name, default=None, required=False):
        if required and name not in params:
            raise ConfigError(f"family {family!r} needs params.{name}")
        return params.pop(name, default)

    if family == "power":
        p = take("p", required=True)
        _reject_extras(family, params, doc, fields_ok=False)
        return PowerGYF(p, n)
    if family in ("orlicz", "orlicz-closed-form"):
        expr = take("expr", required=True)
        _reject_extras(family, params, doc, fields_ok=False)
        return OrliczGYF(expr, n)
    if family == "variable-exponent":
        _reject_extras(family, params, doc)
        fields = _fields_by_name(doc, n, required=("p",))
        return VariableExponentGYF(fields["p"], n)
    if family == "double-phase":
        p = take("p", required=True)
        q = take("q", required=True)
        combine = take("combine", "sum")
        _reject_extras(family, params, doc)
        fields = _fields_by_name(doc, n, required=("a",))
        return DoublePhaseGYF(p, q, fields["a"], n, combine)
    if family == "variable-double-phase":
        _reject_extras(family, params, doc)
        fields = _fields_by_name(doc, n, required=("p", "q", "a"))
        return VariableDoublePhaseGYF(fields["p"], fields["q"], fields["a"], n)
    if family == "tabulated":
        grid = take("grid", required=True)
        values = take("values", required=True)
        extend = take("extend_above", "power")
        _reject_extras(family, params, doc, fields_ok=False)
        from .tab import MonotoneTab
        return TabulatedGYF(MonotoneTab(grid, values, extend_above=extend), n)
    if family == "derived":
        recipe = doc.get("recipe")
        base_doc = doc.get("base")
        if recipe is None or base_doc is None:
            raise ConfigError("derived family needs 'recipe' and 'base'")
        _reject_extras(family, params, doc, fields_ok=False)
        from .normalize import derive
        return derive(gyf_from_config(base_doc), recipe)
    raise ConfigError(f"unknown family {family!r}")


def _reject_extras(family, params, doc, fields_ok=True):
    if params:
        raise ConfigError(f"family {family!r} got unknown params {sorted(params)}")
    if not fields_ok and doc.get("fields"):
        raise ConfigError(f"family {family!r} takes no fields")
    if family != "derived" and ("recipe" in doc or "base" in doc):
        raise ConfigError("'recipe'/'base' are only valid with family 'derived'")
