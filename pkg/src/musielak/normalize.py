"""Normalization ladder: derived Young functions with calibrated small scales.

Starting from a generalized Young function phi, the ladder builds:

    phi0     max(phi(x, c(x) t), 2t - 1) with c(x) = phi^{-1}(x, 1); the
             unit-calibrated form (phi0^{-1}(x, 1) = 1 exactly).
    bar      2*phi0 - 1 for t >= 1, the spatial tail profile of phi0 for
             t < 1.  A normalized generalized Young function.
    hat      2*phi0 - 1 for t >= 1, t for t < 1.  Also normalized.
    circ     phi itself for t >= 1, the tail profile of phi for t < 1.
    bullet   phi itself for t >= 1, t for t < 1.

circ/bullet splice without recalibration, may jump at t = 1, and are only
equivalent (not equal) to proper Young functions; they carry
``equivalent_only = True`` and require a doubling estimate plus unit
calibration up front.  Recipes phi0/bar/hat produce genuine Young
functions (convex, vanishing at 0).

``check_sandwiches`` verifies the two-sided comparison between phi and its
bar/hat forms at a declared comparability constant beta:

    bar:  phi(x, beta t) <= bar(x,t) <= phi(x, 4t/beta)    for t >= 1
          tail(beta t)   <= bar(x,t) <= tail(2t/beta)      for t < 1
    hat:  hat(x,t) <= phi(x, 4t/beta) + 1  and  phi(x,t) <= hat(x, t/beta) + 1

Caveat for hand-checking against closed forms: the affine floor 2t - 1
inside phi0 is active wherever phi(x, c(x) t) < 2t - 1, so e.g. the power
family gives bar = 2t^p - 1 above 1 only where t^p >= 2t - 1 (everywhere
when p = 2; on part of (1, inf) when p < 2).
"""

from __future__ import annotations

import numpy as np

from .errors import NormalizationError
from .gyf import GYF, check_delta2, limit_function, SphereLimitGYF
from .reports import VerificationReport, Stopwatch, summarize

__all__ = [
    "DerivedGYF",
    "UnitCalibrated",
    "TailNormalized",
    "LinearNormalized",
    "TailSpliced",
    "LinearSpliced",
    "make_phi0",
    "make_bar",
    "make_hat",
    "make_circ",
    "make_bullet",
    "derive",
    "RECIPES",
    "check_sandwiches",
]

_CAL_QUANT = 2.0 ** 30   # spatial snap for the calibration cache
_LN2 = float(np.log(2.0))


class DerivedGYF(GYF):
    """A generalized Young function built from another one by a recipe.

    Evaluation stays pure; anything per-x that is expensive (the unit
    calibration c(x)) is cached lazily, keyed by quantized coordinates.
    Caches are insert-only: a key always maps to the same value, so
    concurrent duplicate computation is harmless.
    """

    recipe = "derived"
    equivalent_only = False

    def __init__(self, base):
        super().__init__(base.n)
        self.base = base
        self.x_independent = base.x_independent

    def __repr__(self):
        return "%s(%r)" % (type(self).__name__, self.base)


class UnitCalibrated(DerivedGYF):
    """phi0(x,t) = max(phi(x, c(x) t), 2t - 1), c(x) = phi^{-1}(x, 1).

    The rescaling puts the unit level at t = 1 for every x
    (phi0(x, 1) = 1 and phi0^{-1}(x, 1) = 1), and the affine floor makes
    the function grow at least linearly with slope 2 past its unit level.
    """

    recipe = "phi0"
    family = "derived-phi0"

    def __init__(self, base):
        super().__init__(base)
        self._cache = {}
        self._c_const = None

    def calibration(self, X, m):
        """c(x) row-aligned with a length-m batch (cached per quantized x)."""
        if self.base.x_independent:
            if self._c_const is None:
                c = self.base.inverse(None, 1.0)
                if not np.isfinite(c) or c <= 1e-12 or c >= 1e12:
                    raise NormalizationError(
                        "unit level phi^{-1}(1) is degenerate (%r); "
                        "calibration undefined" % (c,))
                self._c_const = float(c)
            return np.full(m, self._c_const)
        X = np.asarray(X, dtype=float)
        keys = np.round(X * _CAL_QUANT).astype(np.int64)
        uniq, inv_idx = np.unique(keys, axis=0, return_inverse=True)
        c_u = np.empty(uniq.shape[0])
        missing = []
        for i in range(uniq.shape[0]):
            got = self._cache.get(uniq[i].tobytes())
            if got is None:
                missing.append(i)
            else:
                c_u[i] = got
        if missing:
            reps = uniq[np.array(missing)].astype(float) / _CAL_QUANT
            vals = self.base.inverse_xt(reps, np.ones(len(missing)))
            bad = ~np.isfinite(vals) | (vals <= 1e-12) | (vals >= 1e12)
            if np.any(bad):
                j = int(np.argmax(bad))
                raise NormalizationError(
                    "unit level phi^{-1}(x,1) is degenerate (%r) at x=%s; "
                    "calibration undefined" % (float(vals[j]), reps[j].tolist()))
            for i, v in zip(missing, vals):
                self._cache[uniq[i].tobytes()] = float(v)
                c_u[i] = v
        return c_u[inv_idx]

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        c = self.calibration(X, T.size)
        inner = self.base.phi_xt(X, c * T)
        return np.maximum(inner, 2.0 * T - 1.0)

    def log_phi_xt(self, X, U):
        U = np.asarray(U, dtype=float)
        c = self.calibration(X, U.size)
        body = self.base.log_phi_xt(X, U + np.log(c))
        eu = np.exp(np.minimum(U, 30.0))
        with np.errstate(divide="ignore"):
            floor = np.where(U >= 30.0, _LN2 + U,
                             np.log(np.maximum(2.0 * eu - 1.0, 0.0)))
        return np.maximum(body, floor)

    def inverse_xt(self, X, T):
        # left inverse of a max is the min of the left inverses
        T = np.asarray(T, dtype=float)
        c = self.calibration(X, T.size)
        return np.minimum(self.base.inverse_xt(X, T) / c, 0.5 * (T + 1.0))

    def limit_profile(self):
        if self.x_independent:
            return self
        prof = self.base.limit_profile()
        return None if prof is None else UnitCalibrated(prof)


class _SplicedProfile(GYF):
    """x-independent glue of two t-branches at t = 1 (limit-profile helper)."""

    family = "limit"
    x_independent = True

    def __init__(self, n, upper, lower):
        super().__init__(n)
        self._upper = upper
        self._lower = lower

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        hi = T >= 1.0
        out = np.empty(T.shape)
        out[hi] = self._upper(T[hi])
        out[~hi] = self._lower(T[~hi])
        return out


def _tail_of(phi, what):
    prof = limit_function(phi)
    if isinstance(prof, SphereLimitGYF) and not prof.converged:
        raise NormalizationError(
            "spatial tail of %s did not converge on the sampling spheres; "
            "cannot build the %s recipe" % (phi, what))
    return prof


class TailNormalized(DerivedGYF):
    """bar: 2*phi0 - 1 above t = 1, the spatial tail profile of phi0 below.

    The result is a normalized generalized Young function: unit-calibrated,
    ball-comparable down to t = 0, and equal to its own tail profile on
    [0, 1].
    """

    recipe = "bar"
    family = "derived-bar"

    def __init__(self, base):
        super().__init__(base)
        self.phi0 = UnitCalibrated(base)
        self.low = _tail_of(self.phi0, "bar")

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        out = np.empty(T.shape)
        hi = T >= 1.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            out[hi] = 2.0 * self.phi0.phi_xt(Xh, T[hi]) - 1.0
        if (~hi).any():
            out[~hi] = self.low.phi_batch(None, T[~hi])
        return out

    def log_phi_xt(self, X, U):
        U = np.asarray(U, dtype=float)
        out = np.empty(U.shape)
        hi = U >= 0.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            lp = self.phi0.log_phi_xt(Xh, U[hi])
            # log(2 e^lp - 1) = lp + log(2 - e^-lp), with phi0 >= 1 here
            out[hi] = lp + np.log(2.0 - np.exp(-np.maximum(lp, 0.0)))
        if (~hi).any():
            with np.errstate(divide="ignore"):
                out[~hi] = np.log(self.low.phi_batch(None, np.exp(U[~hi])))
        return out

    def inverse_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        out = np.empty(T.shape)
        hi = T >= 1.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            out[hi] = self.phi0.inverse_xt(Xh, 0.5 * (T[hi] + 1.0))
        if (~hi).any():
            out[~hi] = self.low.inverse_batch(None, T[~hi])
        return out

    def limit_profile(self):
        if self.x_independent:
            return self
        low = self.low
        return _SplicedProfile(
            self.n,
            lambda T: 2.0 * low.phi_batch(None, T) - 1.0,
            lambda T: low.phi_batch(None, T),
        )


class LinearNormalized(DerivedGYF):
    """hat: 2*phi0 - 1 above t = 1, the identity below.

    Agrees with bar for t >= 1; below 1 it is simply t, which keeps the
    function normalized while making small levels exactly linear.
    """

    recipe = "hat"
    family = "derived-hat"

    def __init__(self, base):
        super().__init__(base)
        self.phi0 = UnitCalibrated(base)

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        out = np.empty(T.shape)
        hi = T >= 1.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            out[hi] = 2.0 * self.phi0.phi_xt(Xh, T[hi]) - 1.0
        out[~hi] = np.maximum(T[~hi], 0.0)
        return out

    def log_phi_xt(self, X, U):
        U = np.asarray(U, dtype=float)
        out = np.empty(U.shape)
        hi = U >= 0.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            lp = self.phi0.log_phi_xt(Xh, U[hi])
            out[hi] = lp + np.log(2.0 - np.exp(-np.maximum(lp, 0.0)))
        out[~hi] = U[~hi]
        return out

    def inverse_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        out = np.empty(T.shape)
        hi = T >= 1.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            out[hi] = self.phi0.inverse_xt(Xh, 0.5 * (T[hi] + 1.0))
        lo = ~hi
        out[lo] = np.clip(T[lo], 0.0, None)
        out[~np.isfinite(T) & (T > 0)] = np.inf
        return out

    def limit_profile(self):
        if self.x_independent:
            return self
        prof = self.phi0.limit_profile()
        low = prof if prof is not None else _tail_of(self.phi0, "hat")
        return _SplicedProfile(
            self.n,
            lambda T: 2.0 * low.phi_batch(None, T) - 1.0,
            lambda T: np.maximum(T, 0.0),
        )


class TailSpliced(DerivedGYF):
    """circ: phi itself above t = 1, its spatial tail profile below.

    No recalibration happens, so the two branches may disagree at t = 1;
    the result is only equivalent to a Young function and is flagged
    ``equivalent_only``.
    """

    recipe = "circ"
    family = "derived-circ"
    equivalent_only = True

    def __init__(self, base):
        super().__init__(base)
        self.low = _tail_of(base, "circ")

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        out = np.empty(T.shape)
        hi = T >= 1.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            out[hi] = self.base.phi_xt(Xh, T[hi])
        if (~hi).any():
            out[~hi] = self.low.phi_batch(None, T[~hi])
        return out

    def log_phi_xt(self, X, U):
        U = np.asarray(U, dtype=float)
        out = np.empty(U.shape)
        hi = U >= 0.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            out[hi] = self.base.log_phi_xt(Xh, U[hi])
        if (~hi).any():
            with np.errstate(divide="ignore"):
                out[~hi] = np.log(self.low.phi_batch(None, np.exp(U[~hi])))
        return out

    def limit_profile(self):
        if self.x_independent:
            return self
        return self.low


class LinearSpliced(DerivedGYF):
    """bullet: phi itself above t = 1, the identity below (equivalent-only)."""

    recipe = "bullet"
    family = "derived-bullet"
    equivalent_only = True

    def phi_xt(self, X, T):
        T = np.asarray(T, dtype=float)
        out = np.empty(T.shape)
        hi = T >= 1.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            out[hi] = self.base.phi_xt(Xh, T[hi])
        out[~hi] = np.maximum(T[~hi], 0.0)
        return out

    def log_phi_xt(self, X, U):
        U = np.asarray(U, dtype=float)
        out = np.empty(U.shape)
        hi = U >= 0.0
        if hi.any():
            Xh = None if X is None else np.asarray(X, dtype=float)[hi]
            out[hi] = self.base.log_phi_xt(Xh, U[hi])
        out[~hi] = U[~hi]
        return out

    def limit_profile(self):
        if self.x_independent:
            return self
        prof = _tail_of(self.base, "bullet")
        return _SplicedProfile(
            self.n,
            lambda T: prof.phi_batch(None, T),
            lambda T: np.maximum(T, 0.0),
        )


def _require_doubling_and_calibration(phi, what):
    holds, c2 = check_delta2(phi)
    if not holds:
        raise NormalizationError(
            "doubling estimate failed for %r (empirical constant %r); the %s "
            "recipe requires it" % (phi, c2, what))
    # calibration degeneracy surfaces through UnitCalibrated's validator
    UnitCalibrated(phi).calibration(
        None if phi.x_independent else np.zeros((1, phi.n)), 1)


def make_phi0(phi):
    """Unit-calibrated form; raises ``NormalizationError`` when
    phi^{-1}(x,1) is 0 or infinite at a requested x (lazily, on first
    evaluation at that x)."""
    return UnitCalibrated(phi)


def make_bar(phi):
    """Normalized form: recalibrated above t = 1, tail profile below."""
    return TailNormalized(phi)


def make_hat(phi):
    """Normalized form with identity below t = 1."""
    return LinearNormalized(phi)


def make_circ(phi, skip_checks=False):
    """Equivalent-only splice of phi with its tail profile below t = 1.

    Requires a doubling estimate and finite unit calibration; pass
    ``skip_checks=True`` to skip the (sampled) preconditions.
    """
    if not skip_checks:
        _require_doubling_and_calibration(phi, "circ")
    return TailSpliced(phi)


def make_bullet(phi, skip_checks=False):
    """Equivalent-only splice of phi with the identity below t = 1."""
    if not skip_checks:
        _require_doubling_and_calibration(phi, "bullet")
    return LinearSpliced(phi)


RECIPES = {
    "phi0": make_phi0,
    "bar": make_bar,
    "hat": make_hat,
    "circ": make_circ,
    "bullet": make_bullet,
}


def derive(phi, recipe):
    """Apply a normalization recipe by name; "none" returns phi unchanged."""
    if recipe in (None, "none"):
        return phi
    try:
        maker = RECIPES[recipe]
    except KeyError:
        raise ValueError("unknown recipe %r; choose from %s or 'none'"
                         % (recipe, sorted(RECIPES))) from None
    return maker(phi)


def _sandwich_samples(n, rng, m):
    xs = rng.normal(size=(m, n)) * 3.0
    ts = np.exp(rng.uniform(np.log(1e-4), np.log(1e4), size=m))
    return xs, ts


def check_sandwiches(phi, derived, beta=None, rng=None, samples=10_000,
                     tol=1e-9):
    """Two-sided comparison of phi with its bar/hat form at constant beta.

    bar, t >= 1:  phi(x, beta t) <= bar(x,t) <= phi(x, 4t/beta)
    bar, t <  1:  tail(beta t)   <= bar(x,t) <= tail(2t/beta)
    hat, all t:   hat(x,t) <= phi(x, 4t/beta) + 1
                  phi(x,t) <= hat(x, t/beta) + 1

    ``beta`` defaults to the refined unit-calibration witness.  Defects are
    measured as lhs - rhs (positive = violation); entries where both sides
    are infinite are ignored.
    """
    from .conditions import check_A0

    rng = np.random.default_rng(rng if rng is not None else 0)
    if beta is None:
        rep = check_A0(phi)
        if not rep.holds:
            raise NormalizationError(
                "unit calibration fails for %r; no beta available" % (phi,))
        beta = rep.beta
    if derived.recipe not in ("bar", "hat"):
        raise ValueError("sandwich comparison is defined for the bar and hat "
                         "recipes, got %r" % (derived.recipe,))

    with Stopwatch() as sw:
        xs, ts = _sandwich_samples(phi.n, rng, samples)
        dv = derived.phi_xt(xs, ts)
        defects = []

        def defect(lhs, rhs):
            both_inf = np.isinf(lhs) & np.isinf(rhs)
            return np.where(both_inf, -np.inf, lhs - rhs)

        if derived.recipe == "bar":
            tail = derived.low
            hi = ts >= 1.0
            lo = ~hi
            if hi.any():
                lower = phi.phi_xt(xs[hi], beta * ts[hi])
                upper = phi.phi_xt(xs[hi], 4.0 * ts[hi] / beta)
                defects.append(defect(lower, dv[hi]))
                defects.append(defect(dv[hi], upper))
            if lo.any():
                lower = tail.phi_batch(None, beta * ts[lo])
                upper = tail.phi_batch(None, 2.0 * ts[lo] / beta)
                defects.append(defect(lower, dv[lo]))
                defects.append(defect(dv[lo], upper))
        else:
            upper = phi.phi_xt(xs, 4.0 * ts / beta) + 1.0
            defects.append(defect(dv, upper))
            scaled = derived.phi_xt(xs, ts / beta) + 1.0
            defects.append(defect(phi.phi_xt(xs, ts), scaled))
        worst = float(np.max([np.max(d) for d in defects]))
    all_d = np.concatenate([d[np.isfinite(d)] for d in defects])
    return VerificationReport(
        name="normalization-sandwich-%s" % derived.recipe,
        samples=int(samples),
        lhs=summarize(dv),
        rhs={"beta": float(beta)},
        constant=float(beta),
        max_violation=worst,
        tolerance=tol,
        passed=bool(worst <= tol),
        runtime_s=sw.seconds,
        details={"defect_summary": summarize(all_d)},
    )
