"""Quadrature for integrands with power-law behaviour at 0 and infinity.

The integrands this package meets (ratios t/phi raised to fixed exponents,
conjugates divided by powers) are regularly varying at both endpoints. The
workhorse is a cumulative tabulation on log-spaced nodes:

    I(t) = integral_0^t f(tau) dtau

built from fixed Gauss-Legendre panels in u = log tau (node spacing is a few
hundredths of a decade, so panel error is far below 1e-12 for smooth f), with

- the tau -> 0 endpoint closed by a geometric fit on the last two dyadic
  panel integrals (exact for pure powers, raises when the fitted ratio says
  the integral diverges), and
- the large-tau side extended by a fitted power/log model so I and its
  inverse stay available in the log domain long after tau overflows a float.

`adaptive_integral` is the standalone route: bisection with an embedded
GL8/GL16 error estimate and a per-interval relative tolerance.
"""

from functools import lru_cache

import numpy as np

from .errors import GrowthConditionError


@lru_cache(maxsize=None)
def _leggauss(k):
    x, w = np.polynomial.legendre.leggauss(k)
    return x, w


def _panel_values(f, u_lo, u_hi, k=16):
    """Nodes and weights for integral of f(e^u) e^u du over [u_lo, u_hi] panels.

    u_lo/u_hi are arrays of panel edges; returns increments per panel.
    """
    x, w = _leggauss(k)
    u_lo = np.asarray(u_lo, dtype=float)
    u_hi = np.asarray(u_hi, dtype=float)
    half = 0.5 * (u_hi - u_lo)[:, None]
    mid = 0.5 * (u_hi + u_lo)[:, None]
    u = mid + half * x[None, :]
    tau = np.exp(u)
    vals = f(tau.ravel()).reshape(tau.shape)
    return np.sum(vals * tau * w[None, :], axis=1) * half[:, 0]


def _fit_geometric_ratio(inc_a, inc_b):
    """Ratio of consecutive equal-log-width panel integrals (b below a)."""
    if inc_a <= 0.0 or inc_b <= 0.0:
        return 0.0
    return inc_b / inc_a


class CumulativeTab:
    """Tabulated cumulative integral of a positive integrand on (0, inf).

    Parameters
    ----------
    f : callable
        Vectorized integrand, f(tau array) -> array of nonnegative values.
    tau_min, tau_max : float
        Tabulation window; outside it the fitted endpoint models take over.
    n_nodes : int
        Number of log-spaced tabulation nodes.
    label : str
        Used in error messages when the 0-endpoint diverges.
    """

    LOWER_OCTAVES = 16

    def __init__(self, f, tau_min=1e-6, tau_max=1e6, n_nodes=512, label="integrand"):
        self.f = f
        self.label = label
        self.u_nodes = np.linspace(np.log(tau_min), np.log(tau_max), n_nodes)
        self.nodes = np.exp(self.u_nodes)
        inc = _panel_values(f, self.u_nodes[:-1], self.u_nodes[1:])
        tail0 = self._close_lower_tail(tau_min)
        self.cum = tail0 + np.concatenate([[0.0], np.cumsum(inc)])
        self._upper = None  # (kind, coeff, s_plus_1) fitted lazily
        self._dens = None  # dI/du at the nodes, cached for the inverse
        self._low_dens = None

    # -- endpoint models ----------------------------------------------------

    def _close_lower_tail(self, tau_min):
        """Close the (0, tau_min] tail and freeze the below-range model.

        Stores the octave edges, the cumulative integral at each edge, and
        the geometric octave ratio rho; queries below the probed window use
        the pure power model I(u) = I(lowest edge) * rho^(octaves below),
        so the integrand is never evaluated at arguments more extreme than
        tau_min * 2^-LOWER_OCTAVES.
        """
        ln2 = np.log(2.0)
        edges = np.log(tau_min) - ln2 * np.arange(self.LOWER_OCTAVES + 1)
        inc = _panel_values(self.f, edges[1:], edges[:-1])  # descending octaves
        if inc[-1] == 0.0 and inc[-2] == 0.0:
            rho, geo = 0.0, 0.0
        else:
            rho = _fit_geometric_ratio(inc[-2], inc[-1])
            if rho >= 0.999:
                raise GrowthConditionError(
                    f"{self.label}: integral diverges at 0 "
                    f"(dyadic panel ratio {rho:.6f} does not contract)")
            geo = float(inc[-1] * rho / (1.0 - rho))
        self._low_edges = edges
        cum = np.empty(edges.size)
        cum[-1] = geo
        cum[:-1] = geo + np.cumsum(inc[::-1])[::-1]
        self._low_cum = cum
        self._low_rho = float(rho)
        return float(cum[0])

    def _upper_model(self):
        if self._upper is None:
            du = self.u_nodes[1] - self.u_nodes[0]
            # effective slope of log increments over the last decade of panels
            k = max(2, int(round(np.log(10.0) / du)))
            inc = np.diff(self.cum[-(k + 1):])
            pos = inc > 0.0
            if np.count_nonzero(pos) < 2:
                self._upper = ("finite", float(self.cum[-1]), -1.0)
                return self._upper
            idx = np.nonzero(pos)[0]
            sp1 = np.log(inc[idx[-1]] / inc[idx[0]]) / (du * (idx[-1] - idx[0]))
            tmax = self.nodes[-1]
            fmax = float(self.f(np.array([tmax]))[0])
            if sp1 < -1e-6:
                rho = np.exp(sp1 * du)
                rem = inc[-1] * rho / (1.0 - rho)
                self._upper = ("finite", float(self.cum[-1] + rem), sp1)
            elif sp1 <= 1e-6:
                self._upper = ("log", fmax * tmax, 0.0)
            else:
                self._upper = ("power", fmax / tmax ** (sp1 - 1.0), sp1)
        return self._upper

    @property
    def total(self):
        """integral_0^inf f, or +inf when the upper end does not converge."""
        kind, coeff, _ = self._upper_model()
        return coeff if kind == "finite" else np.inf

    @property
    def diverges_at_infinity(self):
        return self._upper_model()[0] != "finite"

    # -- evaluation ----------------------------------------------------------

    def integral_log(self, log_t):
        """I(e^{log_t}), valid for arbitrarily large log_t via the tail model."""
        log_t = np.asarray(log_t, dtype=float)
        out = np.empty(log_t.shape)
        lo = log_t <= self.u_nodes[0]
        hi = log_t >= self.u_nodes[-1]
        mid = ~(lo | hi)
        if np.any(lo):
            u = log_t[lo]
            e = self._low_edges  # descending from u_nodes[0]
            vals = np.empty(u.shape)
            deep = u < e[-1]
            if np.any(deep):
                if self._low_rho <= 0.0:
                    vals[deep] = 0.0
                else:
                    octs = (e[-1] - u[deep]) / np.log(2.0)
                    vals[deep] = self._low_cum[-1] * self._low_rho ** octs
            win = ~deep
            if np.any(win):
                uw = u[win]
                k = np.clip(np.searchsorted(-e, -uw, side="right") - 1,
                            0, e.size - 2)
                vals[win] = self._low_cum[k + 1] + _panel_values(
                    self.f, e[k + 1], uw)
            out[lo] = vals
        if np.any(mid):
            u = log_t[mid]
            k = np.clip(np.searchsorted(self.u_nodes, u) - 1, 0, len(self.u_nodes) - 2)
            out[mid] = self.cum[k] + _panel_values(self.f, self.u_nodes[k], u)
        if np.any(hi):
            kind, coeff, sp1 = self._upper_model()
            u = log_t[hi]
            umax = self.u_nodes[-1]
            if kind == "finite":
                # mass beyond u decays like exp(sp1 * u); approach the total
                out[hi] = coeff - (coeff - self.cum[-1]) * np.exp(
                    np.maximum(sp1 * (u - umax), -700.0))
            elif kind == "log":
                out[hi] = self.cum[-1] + coeff * (u - umax)
            else:
                out[hi] = self.cum[-1] + coeff / sp1 * (
                    np.exp(sp1 * u) - np.exp(sp1 * umax))
        return out

    def integral(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.zeros(t.shape)
        pos = t > 0.0
        with np.errstate(divide="ignore"):
            out[pos] = self.integral_log(np.log(t[pos]))
        return float(out[0]) if scalar else out

    def _densities(self):
        if self._dens is None:
            self._dens = self.f(self.nodes) * self.nodes
        return self._dens

    def _low_densities(self):
        if self._low_dens is None:
            tau = np.exp(self._low_edges)
            self._low_dens = self.f(tau) * tau
        return self._low_dens

    @staticmethod
    def _model_invert(u_left, du, i_left, d_left, d_right, y):
        """Solve I(u) = y inside one panel by the local exponential model.

        dI/du is modelled as d_left * exp(s (u - u_left)) with s fitted to
        the endpoint densities, which is exact for power-law integrands;
        degenerate densities fall back to a linear-in-u model.
        """
        gap = np.maximum(y - i_left, 0.0)
        ok = (d_left > 0.0) & (d_right > 0.0) & np.isfinite(d_left) \
            & np.isfinite(d_right)
        d_safe = np.where(d_left > 0.0, d_left, 1.0)
        ratio = np.where(ok, d_right, d_safe) / d_safe
        s = np.log(ratio) / du
        curved = ok & (np.abs(s * du) > 1e-12)
        s_safe = np.where(curved, s, 1.0)
        arg = np.maximum(s_safe * gap / d_safe, -1.0 + 1e-16)
        step = np.where(curved, np.log1p(arg) / s_safe,
                        gap / np.maximum(d_safe, 1e-300))
        return u_left + np.clip(step, 0.0, du)

    def inverse_log(self, y):
        """log of the left-continuous inverse of I; +inf past a finite total."""
        y = np.asarray(y, dtype=float)
        scalar = y.ndim == 0
        y = np.atleast_1d(y).astype(float)
        out = np.full(y.shape, -np.inf)
        kind, coeff, sp1 = self._upper_model()
        pos = y > 0.0
        if kind == "finite":
            out[pos & (y >= coeff)] = np.inf
            pos = pos & (y < coeff)
        below = pos & (y <= self.cum[0])
        above = pos & (y >= self.cum[-1])
        mid = pos & ~below & ~above
        if np.any(below):
            yb = y[below]
            e = self._low_edges
            res = np.empty(yb.shape)
            floor_val = self._low_cum[-1]
            deep = yb <= floor_val
            if np.any(deep):
                # invert the power model: I = floor * rho^((e[-1]-u)/ln2)
                octs = np.log(yb[deep] / floor_val) / np.log(self._low_rho)
                res[deep] = e[-1] - octs * np.log(2.0)
            shal = ~deep
            if np.any(shal):
                ys = yb[shal]
                dens = self._low_densities()
                # _low_cum descends with the edge index; bracket each y
                asc = self._low_cum[::-1]
                k_rev = np.clip(np.searchsorted(asc, ys, side="left"),
                                1, asc.size - 1)
                k = e.size - 1 - k_rev  # left edge (lower u) of the bracket
                res[shal] = self._model_invert(
                    e[k + 1], e[k] - e[k + 1], self._low_cum[k + 1],
                    dens[k + 1], dens[k], ys)
            out[below] = res
        if np.any(mid):
            ym = y[mid]
            dens = self._densities()
            k = np.clip(np.searchsorted(self.cum, ym) - 1, 0, len(self.cum) - 2)
            out[mid] = self._model_invert(
                self.u_nodes[k], self.u_nodes[1] - self.u_nodes[0],
                self.cum[k], dens[k], dens[k + 1], ym)
        if np.any(above):
            ya = y[above]
            umax = self.u_nodes[-1]
            if kind == "log":
                out[above] = umax + (ya - self.cum[-1]) / coeff
            elif kind == "power":
                arg = sp1 / coeff * (ya - self.cum[-1]) + np.exp(sp1 * umax)
                out[above] = np.log(arg) / sp1
            else:
                # invert coeff - (coeff - cum[-1]) exp(sp1 (u - umax)) = y
                gap = np.maximum(coeff - ya, 1e-300)
                out[above] = umax + np.log(gap / max(coeff - self.cum[-1], 1e-300)) / sp1
        return float(out[0]) if scalar else out

    def inverse(self, y):
        u = self.inverse_log(y)
        return np.exp(u)


def adaptive_integral(f, a, b, rtol=1e-8, singular_lower=True, label="integrand"):
    """integral_a^b f with bisection and an embedded GL8/GL16 estimate.

    With singular_lower and a == 0 the lower endpoint is closed by dyadic
    octaves below b * 2^-30 plus the geometric tail fit, mirroring
    CumulativeTab; f must then be regularly varying at 0.
    """
    total = 0.0
    if a <= 0.0:
        if not singular_lower:
            raise ValueError("a == 0 requires singular_lower")
        cut = b * 2.0 ** -30
        ln2 = np.log(2.0)
        edges = np.log(cut) - ln2 * np.arange(17)
        inc = _panel_values(f, edges[1:], edges[:-1])
        if not (inc[-1] == 0.0 and inc[-2] == 0.0):
            rho = _fit_geometric_ratio(inc[-2], inc[-1])
            if rho >= 0.999:
                raise GrowthConditionError(
                    f"{label}: integral diverges at 0 "
                    f"(dyadic panel ratio {rho:.6f} does not contract)")
            total += inc[-1] * rho / (1.0 - rho)
        total += float(np.sum(inc))
        a = cut
    stack = [(np.log(a), np.log(b))]
    while stack:
        u0, u1 = stack.pop()
        coarse = _panel_values(f, [u0], [u1], k=8)[0]
        fine = _panel_values(f, [u0], [u1], k=16)[0]
        if abs(fine - coarse) <= rtol * (abs(fine) + 1e-300):
            total += fine
        else:
            um = 0.5 * (u0 + u1)
            stack.append((u0, um))
            stack.append((um, u1))
    return total
