"""Radial test functions with closed-form gradients.

Every profile is radial, compactly supported, and pairs a value profile u(r)
with its analytic slope u'(r), so verification sweeps never conflate
finite-difference noise with genuine inequality defects.

    tent          u = h max(1 - r/R, 0)
    bump          u = exp(1 - 1/(1 - (r/R)^2)) inside R, 0 outside
    plateau       1 on [0, inner], cubic smoothstep skirt down to outer
    power_spike   u = max(1 - r/R, 0)^q with q in (0,1): unbounded slope
                  at the rim but integrable gradient modulars
    window_trial  the radial pair (u, |grad u|) generated by a power-shaped
                  profile g on a logarithmic window, via
                  u(x) = int_{omega_n |x|^n}^inf g(s) s^(-1/n') ds
"""

import numpy as np

from .conditions import unit_ball_volume

__all__ = [
    "RadialTestFunction",
    "tent",
    "bump",
    "plateau",
    "power_spike",
    "weak_type_family",
    "WindowTrial",
]


class RadialTestFunction(object):
    """A radial profile u(|x|) with analytic radial slope."""

    def __init__(self, name, profile, slope, support):
        self.name = str(name)
        self._profile = profile
        self._slope = slope
        self.support = float(support)

    def profile(self, r):
        return self._profile(np.asarray(r, dtype=float))

    def slope(self, r):
        return self._slope(np.asarray(r, dtype=float))

    def gradient_magnitude(self, r):
        return np.abs(self.slope(r))

    def values(self, points, center=None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if center is not None:
            pts = pts - np.asarray(center, dtype=float)
        return self.profile(np.linalg.norm(pts, axis=1))

    def gradients(self, points, center=None):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if center is not None:
            pts = pts - np.asarray(center, dtype=float)
        r = np.linalg.norm(pts, axis=1)
        s = self.slope(r)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r[:, None] > 0.0, pts / np.maximum(r, 1e-300)[:, None], 0.0)
        return s[:, None] * unit

    def __repr__(self):
        return "RadialTestFunction(%r, support=%g)" % (self.name, self.support)


def tent(radius=1.0, height=1.0):
    R, h = float(radius), float(height)

    def profile(r):
        return h * np.maximum(1.0 - r / R, 0.0)

    def slope(r):
        return np.where(r < R, -h / R, 0.0)

    return RadialTestFunction("tent", profile, slope, R)


def bump(radius=1.0):
    R = float(radius)

    def _inside(r):
        s = r / R
        out = np.zeros_like(s)
        m = s < 1.0
        out[m] = np.exp(1.0 - 1.0 / (1.0 - s[m] ** 2))
        return out, m

    def profile(r):
        return _inside(np.asarray(r, dtype=float))[0]

    def slope(r):
        r = np.asarray(r, dtype=float)
        u, m = _inside(r)
        s = r / R
        out = np.zeros_like(s)
        g = np.zeros_like(s)
        g[m] = 1.0 / (1.0 - s[m] ** 2)
        out[m] = -u[m] * 2.0 * s[m] * g[m] ** 2 / R
        return out

    return RadialTestFunction("bump", profile, slope, R)


def plateau(inner=0.5, outer=1.0):
    a, b = float(inner), float(outer)
    if not 0.0 < a < b:
        raise ValueError("plateau needs 0 < inner < outer")

    def profile(r):
        tau = np.clip((np.asarray(r, dtype=float) - a) / (b - a), 0.0, 1.0)
        return 1.0 - tau ** 2 * (3.0 - 2.0 * tau)

    def slope(r):
        r = np.asarray(r, dtype=float)
        tau = (r - a) / (b - a)
        inside = (tau > 0.0) & (tau < 1.0)
        out = np.zeros_like(tau)
        out[inside] = (-6.0 * tau[inside] + 6.0 * tau[inside] ** 2) / (b - a)
        return out

    return RadialTestFunction("plateau", profile, slope, b)


def power_spike(radius=1.0, exponent=0.6):
    R, q = float(radius), float(exponent)
    if not 0.0 < q < 1.0:
        raise ValueError("spike exponent must lie in (0, 1)")

    def profile(r):
        return np.maximum(1.0 - np.asarray(r, dtype=float) / R, 0.0) ** q

    def slope(r):
        r = np.asarray(r, dtype=float)
        inside = r < R
        out = np.zeros_like(r)
        out[inside] = -(q / R) * np.maximum(1.0 - r[inside] / R, 1e-300) ** (q - 1.0)
        return out

    return RadialTestFunction("power-spike", profile, slope, R)


def weak_type_family(scale=1.0):
    """Five radial profiles with distinct shapes, all supported in |x| <= scale."""
    s = float(scale)
    return [
        tent(s),
        bump(s),
        plateau(0.45 * s, s),
        bump(0.5 * s),
        power_spike(s, 0.6),
    ]


class WindowTrial(object):
    """Radial trial pair built from a power profile on a log window.

    g(s) = s^(-shape) on (omega_n, omega_n e^level), zero elsewhere, and

        u(x)         = int_{omega_n |x|^n}^inf g(s) s^(-1/n') ds,
        |grad u|(x)  = n omega_n^(1/n) g(omega_n |x|^n).

    The shape exponent defaults to the conjugate-adapted value
    p'/(n' p), which maximizes int g s^(-1/n') ds under a unit gradient
    modular for phi = t^p and reduces to s^(-1/n) at p = n.
    """

    def __init__(self, n, p, level, shape=None):
        self.n = int(n)
        self.p = float(p)
        self.level = float(level)
        self.nprime = self.n / (self.n - 1.0)
        pprime = self.p / (self.p - 1.0)
        self.shape = float(shape) if shape is not None else pprime / (self.nprime * self.p)
        self.omega_n = unit_ball_volume(self.n)
        self.window = (self.omega_n, self.omega_n * np.exp(self.level))

    def g(self, s):
        s = np.asarray(s, dtype=float)
        lo, hi = self.window
        inside = (s > lo) & (s < hi)
        out = np.zeros_like(s)
        out[inside] = s[inside] ** (-self.shape)
        return out

    def numerator_integrand(self, s):
        """g(s) s^(-1/n'), the integrand of the potential lower bound."""
        return self.g(s) * np.asarray(s, dtype=float) ** (-1.0 / self.nprime)

    def gradient_profile(self, r):
        m = self.omega_n * np.asarray(r, dtype=float) ** self.n
        return self.n * self.omega_n ** (1.0 / self.n) * self.g(m)
