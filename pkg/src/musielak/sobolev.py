"""Conjugate-exponent transform of Young functions and its kernel companions.

For a generalized Young function phi on R^n and 0 < alpha < n, define

    H(x, t)   = ( int_0^t (tau / phi(x,tau))^(alpha/(n-alpha)) dtau )^((n-alpha)/n)
    phi_a(x,t) = phi(x, H^{-1}(x, t))          (+inf past a finite sup of H)

``SobolevConjugate`` tabulates H per x (cumulative Gauss panels on a log
grid, exact panel refinement between nodes) and exposes H, its
left-continuous inverse, and the transformed function phi_a, including a
log-domain evaluation path for arguments far beyond double range.  The
lower tail of the integral must converge -- precisely the growth condition
checked by ``conditions.check_growth_condition`` -- and the base must be
normalized (bar/hat recipes are accepted by construction).

Closed-form oracles for three families (constant power, variable exponent,
double phase) are provided for cross-checking the generic pipeline; the
double-phase forms hold up to equivalence constants rather than pointwise.

``KernelFns`` builds the companion kernels obtained from the Young
conjugate ct of the base:

    psi(x, t)   = sigma * t^m * int_0^t ct(x, k*tau) / tau^(1+m) dtau,
                  m = n/(n-alpha)
    lam(x, d)   = 1 / (d^(n-alpha) * psi^{-1}(x, d^{-n})),  with
                  lam(x, 0) = (sigma * int_0^inf ...)^(1/m)
    omega(x, t) = lam(x, phi(x,t)^{-1/n}) = phi(x,t)^(1/m) / psi^{-1}(x, phi(x,t))

and ``check_cistro`` verifies the two-sided comparison
c1 * k * H(x,t) <= omega(x,t) <= c2 * k * H(x,t) empirically.
"""

from __future__ import annotations

import math

import numpy as np

from .conditions import check_growth_condition, check_normalized, unit_ball_volume
from .errors import GrowthConditionError, KernelError
from .gyf import GYF, ConjugateGYF, default_x_samples
from .quadrature import CumulativeTab, adaptive_integral
from .reports import VerificationReport, Stopwatch, summarize

__all__ = [
    "SobolevConjugate",
    "H_transform",
    "H_inverse",
    "sobolev_conjugate",
    "sobolev_conjugate_domain",
    "oracle_constant_power",
    "oracle_variable_exponent",
    "oracle_double_phase",
    "KernelFns",
    "kernel_psi",
    "kernel_lambda",
    "kernel_omega",
    "check_cistro",
]

EPS_H = 1e-8          # relative tolerance of the adaptive H route
_QUANT = 2.0 ** 20    # spatial snap for per-x tabulation caches


def _quant_key(x):
    if x is None:
        return None
    x = np.asarray(x, dtype=float).ravel()
    return np.round(x * _QUANT).astype(np.int64).tobytes()


def _ratio_power(tau, v, expo):
    """(tau/v)^expo with the Young-function conventions: 0 where v = +inf,
    +inf where v = 0 at positive tau (a vanishing phi makes the lower tail
    divergent)."""
    tau = np.asarray(tau, dtype=float)
    v = np.asarray(v, dtype=float)
    out = np.zeros(tau.shape)
    ok = (v > 0.0) & np.isfinite(v)
    out[ok] = (tau[ok] / v[ok]) ** expo
    out[(v <= 0.0) & (tau > 0.0)] = np.inf
    return out


class SobolevConjugate:
    """Per-x tabulated transform H and the transformed function phi_a.

    Parameters
    ----------
    base : GYF
        Normalized generalized Young function (bar/hat recipes pass by
        construction; anything else is checked unless ``allow_equivalent``).
    alpha : float
        Order of the transform, 0 < alpha < n.
    n_nodes : int
        Nodes of the per-x cumulative tabulation (doubling this is the
        refinement knob used by stability checks).
    """

    def __init__(self, base, alpha=1.0, allow_equivalent=False, check=True,
                 n_nodes=512):
        self.base = base
        self.n = base.n
        self.alpha = float(alpha)
        if not (0.0 < self.alpha < self.n):
            raise ValueError("alpha must lie in (0, n), got %r" % (alpha,))
        self.expo = self.alpha / (self.n - self.alpha)
        self.outer = (self.n - self.alpha) / self.n
        self.n_nodes = int(n_nodes)
        if check:
            conv, _ = check_growth_condition(base, self.alpha)
            if not conv:
                raise GrowthConditionError(
                    "lower-tail integral of (t/phi_inf)^%g diverges; the "
                    "transform of order alpha=%g is undefined"
                    % (self.expo, self.alpha))
            if getattr(base, "recipe", None) not in ("bar", "hat") \
                    and not allow_equivalent:
                if base.x_independent:
                    cal = abs(base.inverse(None, 1.0) - 1.0)
                    ok = cal <= 1e-6
                else:
                    ok = check_normalized(base).holds
                if not ok:
                    raise ValueError(
                        "base %r is not normalized; apply the bar/hat recipe "
                        "or pass allow_equivalent=True" % (base,))
        self._tabs = {}

    # -- per-x machinery ------------------------------------------------------

    def _integrand(self, x):
        base, expo = self.base, self.expo
        if x is None or base.x_independent:
            def g(tau):
                tau = np.atleast_1d(np.asarray(tau, dtype=float))
                return _ratio_power(tau, base.phi_batch(None, tau), expo)
        else:
            row = np.asarray(x, dtype=float).ravel()

            def g(tau):
                tau = np.atleast_1d(np.asarray(tau, dtype=float))
                X = np.broadcast_to(row, (tau.size, row.size))
                return _ratio_power(tau, base.phi_xt(X, tau), expo)
        return g

    def _tab(self, x):
        key = _quant_key(None if self.base.x_independent else x)
        tab = self._tabs.get(key)
        if tab is None:
            tab = CumulativeTab(self._integrand(x), n_nodes=self.n_nodes,
                                label="transform integrand")
            self._tabs[key] = tab
        return tab

    # -- H and its inverse ----------------------------------------------------

    def H_batch(self, x, ts):
        ts = np.asarray(ts, dtype=float)
        tab = self._tab(x)
        out = np.zeros(ts.shape)
        pos = ts > 0.0
        out[pos] = tab.integral(ts[pos]) ** self.outer
        out[np.isinf(ts)] = tab.total ** self.outer if not tab.diverges_at_infinity else np.inf
        return out

    def H(self, x, t):
        return float(self.H_batch(x, np.array([float(t)]))[0])

    def H_limit(self, x):
        """sup_t H(x, t): finite exactly when the full integral converges."""
        tab = self._tab(x)
        return np.inf if tab.diverges_at_infinity else float(tab.total ** self.outer)

    def tail_tag(self, x):
        return "diverges" if self._tab(x).diverges_at_infinity else "finite-limit"

    def H_inverse_batch(self, x, ts):
        """Left-continuous inverse; +inf at and past a finite sup of H."""
        ts = np.asarray(ts, dtype=float)
        tab = self._tab(x)
        out = np.zeros(ts.shape)
        pos = ts > 0.0
        with np.errstate(over="ignore"):
            y = ts[pos] ** (1.0 / self.outer)
        out[pos] = np.exp(tab.inverse_log(y))
        return out

    def H_inverse(self, x, t):
        return float(self.H_inverse_batch(x, np.array([float(t)]))[0])

    def _H_inverse_log(self, x, ts):
        """log H^{-1}(x, t) (+inf propagates); for the log-domain value path."""
        ts = np.asarray(ts, dtype=float)
        tab = self._tab(x)
        out = np.full(ts.shape, -np.inf)
        pos = ts > 0.0
        with np.errstate(over="ignore"):
            y = ts[pos] ** (1.0 / self.outer)
        out[pos] = tab.inverse_log(y)
        return out

    # -- the transformed Young function ----------------------------------------

    def value_batch(self, x, ts):
        ts = np.asarray(ts, dtype=float)
        tau = self.H_inverse_batch(x, ts)
        out = np.zeros(ts.shape)
        inf_tau = np.isinf(tau)
        out[inf_tau] = np.inf
        live = ~inf_tau & (tau > 0.0)
        if live.any():
            out[live] = self.base.phi_xt(
                None if x is None or self.base.x_independent
                else np.broadcast_to(np.asarray(x, dtype=float).ravel(),
                                     (int(live.sum()), self.n)),
                tau[live])
        return out

    def value(self, x, t):
        return float(self.value_batch(x, np.array([float(t)]))[0])

    def value_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        if self.base.x_independent or X is None:
            return self.value_batch(None, T)
        X = np.asarray(X, dtype=float)
        key = np.round(X * _QUANT).astype(np.int64)
        _, inv_idx = np.unique(key, axis=0, return_inverse=True)
        out = np.empty(T.shape)
        for g in range(inv_idx.max() + 1):
            rows = inv_idx == g
            out[rows] = self.value_batch(X[rows][0], T[rows])
        return out

    def log_value_batch(self, x, ts):
        """log phi_a(x, t) evaluated without forming phi_a when it overflows.

        The argument t itself stays in double range (t^(n/(n-alpha)) must be
        representable); only the *value* may be astronomically large.
        """
        ts = np.asarray(ts, dtype=float)
        u = self._H_inverse_log(x, ts)
        out = np.full(ts.shape, -np.inf)
        inf_u = np.isinf(u) & (u > 0)
        out[inf_u] = np.inf
        live = np.isfinite(u)
        if live.any():
            rows = (None if x is None or self.base.x_independent
                    else np.broadcast_to(np.asarray(x, dtype=float).ravel(),
                                         (int(live.sum()), self.n)))
            out[live] = self.base.log_phi_xt(rows, u[live])
        return out

    def as_gyf(self):
        return _SobolevConjugateGYF(self)


class _SobolevConjugateGYF(GYF):
    """GYF facade over a SobolevConjugate (family "sobolev-conjugate")."""

    family = "sobolev-conjugate"
    recipe = "sobolev-conjugate"

    def __init__(self, sc):
        super().__init__(sc.n)
        self.sc = sc
        self.base = sc.base
        self.x_independent = sc.base.x_independent

    def phi_xt(self, X, T):
        return self.sc.value_xt(X, np.asarray(T, dtype=float))

    def inverse_xt(self, X, T):
        """Left-continuous inverse via the factorization H o base-inverse."""
        T = np.asarray(T, dtype=float)
        tau = self.base.inverse_xt(X, T)
        if self.x_independent or X is None:
            return self.sc.H_batch(None, tau)
        X = np.asarray(X, dtype=float)
        key = np.round(X * _QUANT).astype(np.int64)
        _, inv_idx = np.unique(key, axis=0, return_inverse=True)
        out = np.empty(T.shape)
        for g in range(inv_idx.max() + 1):
            rows = inv_idx == g
            out[rows] = self.sc.H_batch(X[rows][0], tau[rows])
        return out

    def log_phi_xt(self, X, U):
        U = np.asarray(U, dtype=float)
        if self.x_independent or X is None:
            return self.sc.log_value_batch(None, np.exp(np.minimum(U, 700.0)))
        X = np.asarray(X, dtype=float)
        key = np.round(X * _QUANT).astype(np.int64)
        _, inv_idx = np.unique(key, axis=0, return_inverse=True)
        out = np.empty(U.shape)
        for g in range(inv_idx.max() + 1):
            rows = inv_idx == g
            out[rows] = self.sc.log_value_batch(
                X[rows][0], np.exp(np.minimum(U[rows], 700.0)))
        return out


# -- free-function forms of the operations --------------------------------------


def H_transform(base, alpha, x, t, rtol=EPS_H):
    """One-off adaptive evaluation of H (independent of the tabulated route).

    Bisection-refined Gauss panels with a dyadic closure toward 0; a
    divergent lower tail raises ``GrowthConditionError``.
    """
    n = base.n
    if not (0.0 < alpha < n):
        raise ValueError("alpha must lie in (0, n), got %r" % (alpha,))
    t = float(t)
    if t <= 0.0:
        return 0.0
    expo = alpha / (n - alpha)
    if x is None or base.x_independent:
        def g(tau):
            tau = np.atleast_1d(np.asarray(tau, dtype=float))
            return _ratio_power(tau, base.phi_batch(None, tau), expo)
    else:
        row = np.asarray(x, dtype=float).ravel()

        def g(tau):
            tau = np.atleast_1d(np.asarray(tau, dtype=float))
            X = np.broadcast_to(row, (tau.size, row.size))
            return _ratio_power(tau, base.phi_xt(X, tau), expo)
    val = adaptive_integral(g, 0.0, t, rtol=rtol, label="transform integrand")
    return float(val ** ((n - alpha) / n))


def H_inverse(sc, x, t):
    return sc.H_inverse(x, t)


def sobolev_conjugate(sc, x, t):
    return sc.value(x, t)


def sobolev_conjugate_domain(phi, alpha=1.0, **kw):
    """Domain variant: the transform applied to the hat recipe of phi.

    The hat form is linear below its unit level, so the lower tail always
    converges and the result is suited to sets of finite measure.
    """
    from .normalize import make_hat

    return SobolevConjugate(make_hat(phi), alpha=alpha, **kw)


# -- closed-form oracles ---------------------------------------------------------


def oracle_constant_power(n, p, t):
    """Transform of t^p (p < n, order 1): t0^{-np/(n-p)} * t^{np/(n-p)},
    t0 = ((n-1)/(n-p))^{1/n'}."""
    if not p < n:
        raise ValueError("constant-power closed form requires p < n")
    t = np.asarray(t, dtype=float)
    nprime = n / (n - 1.0)
    t0 = ((n - 1.0) / (n - p)) ** (1.0 / nprime)
    e = n * p / (n - p)
    return t0 ** (-e) * t ** e


def oracle_variable_exponent(n, p_inf, p_x, t):
    """Piecewise closed form of the transform of t^{p(x)} at a point where
    p(x) = p_x, with spatial limit p_inf < n (order 1).

    Below the knee t0 = ((n-1)/(n-p_inf))^{1/n'} the limit exponent rules:
    t0^{-e} t^e with e = n*p_inf/(n-p_inf).  Above it the local exponent
    takes over, with three regimes: a power law for p_x < n, an exponential
    for p_x = n, and blow-up past t_inf(x) for p_x > n.
    """
    if not p_inf < n:
        raise ValueError("variable-exponent closed form requires p_inf < n")
    t = np.asarray(t, dtype=float)
    out = np.zeros(t.shape)
    nprime = n / (n - 1.0)
    t0 = ((n - 1.0) / (n - p_inf)) ** (1.0 / nprime)
    e_inf = n * p_inf / (n - p_inf)
    low = t < t0
    out[low] = t0 ** (-e_inf) * t[low] ** e_inf
    hi = ~low
    th = t[hi]
    if p_x < n:
        body = ((n - p_x) / (n - 1.0)) * th ** nprime \
            - (p_inf - p_x) / (n - p_inf)
        out[hi] = body ** ((n - 1.0) * p_x / (n - p_x))
    elif p_x == n:
        out[hi] = math.exp(n * (1.0 - n) / (n - p_inf)) * np.exp(n * th ** nprime)
    else:
        t_inf = ((p_x - p_inf) * (n - 1.0)
                 / ((n - p_inf) * (p_x - n))) ** (1.0 / nprime)
        blow = th >= t_inf
        body = ((p_x - n) / (n - 1.0)) * (t_inf ** nprime - th[~blow] ** nprime)
        vals = np.empty(th.shape)
        vals[blow] = np.inf
        vals[~blow] = body ** (-(n - 1.0) * p_x / (p_x - n))
        out[hi] = vals
    return out


_DP_TAIL_CACHE = {}


def _double_phase_tail_constant(n, p, q):
    """t_inf = (int_0^inf ds / (s^{p-1}+s^{q-1})^{1/(n-1)})^{1/n'} for q > n."""
    key = (n, p, q)
    if key not in _DP_TAIL_CACHE:
        e = 1.0 / (n - 1.0)

        def g(s):
            s = np.asarray(s, dtype=float)
            return (s ** (p - 1.0) + s ** (q - 1.0)) ** (-e)

        total = CumulativeTab(g, label="double-phase tail constant").total
        _DP_TAIL_CACHE[key] = float(total ** ((n - 1.0) / n))
    return _DP_TAIL_CACHE[key]


def oracle_double_phase(n, p, q, a_x, t):
    """Equivalent closed form of the transform of t^p + a(x) t^q (order 1).

    Valid up to equivalence constants depending on (n, p, q) only; compare
    with estimate_equivalence, not pointwise.  Requires p < n; the q-regime
    decides the shape:

        q < n : t^{np/(n-p)} + a^{n/(n-q)} t^{nq/(n-q)}
        q = n : exponential branch once t * a^{1/n} >= 1
        q > n : power times a blow-up factor, +inf past
                t_inf * a^{(n-p)/(n(p-q))}
    """
    if not p < n:
        raise ValueError("double-phase closed form requires p < n")
    if q < p:
        raise ValueError("double-phase requires q >= p")
    t = np.asarray(t, dtype=float)
    a = float(a_x)
    e_p = n * p / (n - p)
    if a == 0.0:
        return t ** e_p
    if q < n:
        e_q = n * q / (n - q)
        return t ** e_p + a ** (n / (n - q)) * t ** e_q
    nprime = n / (n - 1.0)
    if q == n:
        out = np.empty(t.shape)
        expb = t * a ** (1.0 / n) >= 1.0
        out[~expb] = t[~expb] ** e_p
        out[expb] = a ** (p / (p - n)) * np.exp(
            n * a ** (1.0 / (n - 1.0)) * t[expb] ** nprime)
        return out
    t_inf = _double_phase_tail_constant(n, p, q)
    scale = a ** ((n - p) / (n * (q - p)))
    out = np.empty(t.shape)
    blow = t * scale >= t_inf
    out[blow] = np.inf
    gap = t_inf - t[~blow] * scale
    out[~blow] = t[~blow] ** e_p * gap ** (-(n - 1.0) * q / (q - n))
    return out


# -- kernels ----------------------------------------------------------------------


class KernelFns:
    """psi / lam / omega kernels built from the Young conjugate of the base.

    ``k`` defaults to 4/beta and ``sigma`` to the smallest admissible value
    omega_n * max(2^{-n}, n/(n-alpha)); both may be enlarged.  A psi-integral
    divergent at 0 raises ``KernelError`` at first tabulation for that x.
    """

    def __init__(self, base, alpha=1.0, beta=1.0, k=None, sigma=None,
                 n_nodes=512):
        self.base = base
        self.n = base.n
        self.alpha = float(alpha)
        if not (0.0 < self.alpha < self.n):
            raise ValueError("alpha must lie in (0, n), got %r" % (alpha,))
        self.m = self.n / (self.n - self.alpha)
        k_min = 4.0 / beta
        self.k = float(k_min if k is None else k)
        if self.k < k_min - 1e-12:
            raise ValueError("k must be at least 4/beta = %g" % k_min)
        sigma_min = unit_ball_volume(self.n) * max(2.0 ** (-self.n), self.m)
        self.sigma = float(sigma_min if sigma is None else sigma)
        if self.sigma < sigma_min - 1e-12:
            raise ValueError("sigma must be at least %g" % sigma_min)
        self.conj = ConjugateGYF(base)
        self.n_nodes = int(n_nodes)
        self._tabs = {}

    def _integrand(self, x):
        conj, k, m = self.conj, self.k, self.m
        if x is None or self.base.x_independent:
            def g(tau):
                tau = np.atleast_1d(np.asarray(tau, dtype=float))
                return conj.phi_batch(None, k * tau) * tau ** (-1.0 - m)
        else:
            row = np.asarray(x, dtype=float).ravel()

            def g(tau):
                tau = np.atleast_1d(np.asarray(tau, dtype=float))
                X = np.broadcast_to(row, (tau.size, row.size))
                return conj.phi_xt(X, k * tau) * tau ** (-1.0 - m)
        return g

    def _tab(self, x):
        key = _quant_key(None if self.base.x_independent else x)
        tab = self._tabs.get(key)
        if tab is None:
            try:
                tab = CumulativeTab(self._integrand(x), n_nodes=self.n_nodes,
                                    label="kernel integrand")
            except GrowthConditionError as exc:
                raise KernelError(
                    "kernel integral diverges at 0 for x=%r: %s" % (x, exc)
                ) from exc
            self._tabs[key] = tab
        return tab

    def psi_batch(self, x, ts):
        ts = np.asarray(ts, dtype=float)
        tab = self._tab(x)
        out = np.zeros(ts.shape)
        pos = ts > 0.0
        out[pos] = self.sigma * ts[pos] ** self.m * tab.integral(ts[pos])
        out[np.isinf(ts)] = np.inf
        return out

    def psi(self, x, t):
        return float(self.psi_batch(x, np.array([float(t)]))[0])

    def psi_inverse_batch(self, x, ys):
        """Left inverse of psi(x, .) by bisection on log psi (90 rounds)."""
        ys = np.asarray(ys, dtype=float)
        tab = self._tab(x)
        log_sigma = math.log(self.sigma)

        def log_psi(u):
            with np.errstate(divide="ignore"):
                return log_sigma + self.m * u + np.log(tab.integral_log(u))

        out = np.zeros(ys.shape)
        live = np.isfinite(ys) & (ys > 0.0)
        out[np.isinf(ys)] = np.inf
        if not live.any():
            return out
        target = np.log(ys[live])
        u_lo = np.full(target.shape, -700.0)
        u_hi = np.full(target.shape, 700.0)
        for _ in range(90):
            u = 0.5 * (u_lo + u_hi)
            below = log_psi(u) < target
            u_lo = np.where(below, u, u_lo)
            u_hi = np.where(below, u_hi, u)
        out[live] = np.exp(0.5 * (u_lo + u_hi))
        return out

    def psi_inverse(self, x, y):
        return float(self.psi_inverse_batch(x, np.array([float(y)]))[0])

    def lam_batch(self, x, deltas):
        deltas = np.asarray(deltas, dtype=float)
        tab = self._tab(x)
        out = np.empty(deltas.shape)
        zero = deltas == 0.0
        if zero.any():
            out[zero] = (np.inf if tab.diverges_at_infinity
                         else (self.sigma * tab.total) ** (1.0 / self.m))
        pos = deltas > 0.0
        if pos.any():
            d = deltas[pos]
            inv = self.psi_inverse_batch(x, d ** (-self.n))
            with np.errstate(divide="ignore"):
                out[pos] = 1.0 / (d ** (self.n - self.alpha) * inv)
        return out

    def lam(self, x, delta):
        return float(self.lam_batch(x, np.array([float(delta)]))[0])

    def omega_batch(self, x, ts):
        """omega(x,t) = lam(x, phi(x,t)^{-1/n}) = phi^{1/m} / psi^{-1}(x, phi)."""
        ts = np.asarray(ts, dtype=float)
        rows = (None if x is None or self.base.x_independent
                else np.broadcast_to(np.asarray(x, dtype=float).ravel(),
                                     (ts.size, self.n)))
        phi_v = (self.base.phi_batch(None, ts) if rows is None
                 else self.base.phi_xt(rows, ts))
        out = np.zeros(ts.shape)
        inf_v = np.isinf(phi_v)
        if inf_v.any():
            out[inf_v] = self.lam(x, 0.0)
        live = (phi_v > 0.0) & ~inf_v
        if live.any():
            inv = self.psi_inverse_batch(x, phi_v[live])
            out[live] = phi_v[live] ** (1.0 / self.m) / inv
        return out

    def omega(self, x, t):
        return float(self.omega_batch(x, np.array([float(t)]))[0])


def kernel_psi(kf, x, t):
    return kf.psi(x, t)


def kernel_lambda(kf, x, delta):
    return kf.lam(x, delta)


def kernel_omega(kf, x, t):
    return kf.omega(x, t)


def check_cistro(kf, sc, xs=None, ts=None, rng=None, drift_tol=0.5,
                 refine=True):
    """Empirical constants of the comparison c1*k*H <= omega <= c2*k*H.

    Sweeps omega(x,t) / (k * H(x,t)) over an (x, t) sample, reports
    c1 = min and c2 = max, and (when ``refine``) rebuilds both tabulations
    at doubled resolution to measure drift.  Passes iff 0 < c1 <= c2 < inf
    and the drift of each constant stays within ``drift_tol`` relative.
    """
    if kf.base is not sc.base:
        raise ValueError("kernel and transform must share the same base")
    if abs(kf.alpha - sc.alpha) > 1e-12:
        raise ValueError("kernel and transform must share alpha")
    rng = np.random.default_rng(rng if rng is not None else 0)
    if xs is None:
        xs = ([None] if kf.base.x_independent
              else list(default_x_samples(kf.n, rng)[:8]))
    if ts is None:
        ts = np.geomspace(1e-3, 1e3, 24)
    ts = np.asarray(ts, dtype=float)

    def constants(kfun, scon):
        ratios = []
        for x in xs:
            om = kfun.omega_batch(x, ts)
            hh = kfun.k * scon.H_batch(x, ts)
            ok = np.isfinite(om) & np.isfinite(hh) & (hh > 0.0) & (om > 0.0)
            if ok.any():
                ratios.append(om[ok] / hh[ok])
        if not ratios:
            return np.nan, np.nan, np.array([])
        allr = np.concatenate(ratios)
        return float(allr.min()), float(allr.max()), allr

    with Stopwatch() as sw:
        c1, c2, allr = constants(kf, sc)
        drift = 0.0
        c1r = c2r = None
        if refine:
            kf2 = KernelFns(kf.base, kf.alpha, k=kf.k, sigma=kf.sigma,
                            n_nodes=2 * kf.n_nodes)
            sc2 = SobolevConjugate(sc.base, sc.alpha, check=False,
                                   n_nodes=2 * sc.n_nodes)
            c1r, c2r, _ = constants(kf2, sc2)
            drift = max(abs(c1r - c1) / c1 if c1 > 0 else np.inf,
                        abs(c2r - c2) / c2 if c2 > 0 else np.inf)
        good = (np.isfinite(c1) and np.isfinite(c2) and 0.0 < c1 <= c2
                and drift <= drift_tol)
    return VerificationReport(
        name="kernel-vs-transform comparability",
        samples=int(allr.size),
        lhs=summarize(allr),
        rhs={"k": kf.k, "sigma": kf.sigma, "alpha": kf.alpha},
        constant=(c2 / c1) if c1 and np.isfinite(c1) and c1 > 0 else None,
        max_violation=drift,
        tolerance=drift_tol,
        passed=bool(good),
        runtime_s=sw.seconds,
        details={"c1": c1, "c2": c2, "c1_refined": c1r, "c2_refined": c2r,
                 "drift": drift},
    )
