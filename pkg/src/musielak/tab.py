"""Tabulated nondecreasing functions of one variable.

Positive data interpolates linearly in log-log (exact on power laws); zeros
at the low end and +inf entries at the high end are kept as exact flat/jump
segments. The inverse is the left-continuous generalized inverse

    inverse(t) = inf{ tau >= 0 : f(tau) >= t },

which is +inf past a finite supremum; that convention is shared by every
inverse in this package.
"""

import numpy as np


class MonotoneTab:
    def __init__(self, grid, values, extend_above="power"):
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise ValueError("grid and values must be matching 1-d arrays, len >= 2")
        if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
            raise ValueError("grid must be positive and strictly increasing")
        with np.errstate(invalid="ignore"):  # inf - inf in diff is fine
            if np.any(np.diff(values) < 0) or np.any(values < 0):
                raise ValueError("values must be nonnegative and nondecreasing")
        if extend_above not in ("power", "inf", "flat"):
            raise ValueError("extend_above must be power, inf, or flat")
        self.grid = grid
        self.values = values
        self.extend_above = extend_above
        self._finite = np.isfinite(values)
        if not np.any(self._finite & (values > 0)):
            raise ValueError("need at least one positive finite value")

    @property
    def sup_value(self):
        if self.extend_above != "flat" or not self._finite[-1]:
            return np.inf
        return float(self.values[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty(t.shape)
        g, v = self.grid, self.values
        k = np.clip(np.searchsorted(g, t, side="right") - 1, 0, g.size - 2)
        lo_v, hi_v = v[k], v[k + 1]
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            slope = np.where(
                (lo_v > 0) & np.isfinite(hi_v),
                np.log(np.maximum(hi_v, 1e-300) / np.maximum(lo_v, 1e-300))
                / np.log(g[k + 1] / g[k]),
                0.0)
            out = np.where(lo_v > 0, lo_v * (t / g[k]) ** slope, 0.0)
        out = np.where(~np.isfinite(hi_v) & (t >= g[k + 1]), np.inf, out)
        out = np.where(lo_v == 0.0, np.where(t >= g[k + 1], hi_v, 0.0), out)
        # below the grid: power-extend from the first positive segment
        below = t < g[0]
        if np.any(below):
            out[below] = self._extrapolate(t[below], side="below")
        above = t > g[-1]
        if np.any(above):
            out[above] = self._extrapolate(t[above], side="above")
        out[t == 0.0] = 0.0
        return float(out[0]) if scalar else out

    def _extrapolate(self, t, side):
        g, v = self.grid, self.values
        if side == "below":
            if v[0] == 0.0:
                return np.zeros(t.shape)
            s = np.log(v[1] / v[0]) / np.log(g[1] / g[0]) if v[1] > v[0] else 0.0
            return v[0] * (t / g[0]) ** s
        if self.extend_above == "inf" or not self._finite[-1]:
            return np.full(t.shape, np.inf)
        if self.extend_above == "flat":
            return np.full(t.shape, v[-1])
        i = np.nonzero(self._finite)[0][-1]
        j = i - 1 if i > 0 else i
        s = (np.log(v[i] / v[j]) / np.log(g[i] / g[j])) if (v[i] > v[j] > 0) else 0.0
        return v[i] * (t / g[i]) ** s

    def inverse(self, t):
        """Left-continuous inverse; 0 at 0, +inf past a finite supremum."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t)
        out = np.empty(t.shape)
        g, v = self.grid, self.values
        vmax = v[-1] if self.extend_above != "flat" else self.sup_value
        for i, ti in enumerate(t):
            if ti <= 0.0:
                out[i] = 0.0
                continue
            if np.isfinite(vmax) and self.extend_above == "flat" and ti > vmax:
                out[i] = np.inf
                continue
            k = int(np.searchsorted(v, ti, side="left"))
            if k == 0:
                # target below the first tabulated value: invert the low tail
                if v[0] == 0.0 or ti <= 0:
                    out[i] = 0.0
                elif v[1] > v[0]:
                    s = np.log(v[1] / v[0]) / np.log(g[1] / g[0])
                    out[i] = g[0] * (ti / v[0]) ** (1.0 / s) if s > 0 else 0.0
                else:
                    out[i] = 0.0
                continue
            if k >= v.size:
                if self.extend_above in ("inf", "flat"):
                    out[i] = g[-1] if self.extend_above == "inf" else np.inf
                    continue
                fin = np.nonzero(self._finite)[0][-1]
                j = fin - 1 if fin > 0 else fin
                if v[fin] > v[j] > 0:
                    s = np.log(v[fin] / v[j]) / np.log(g[fin] / g[j])
                    out[i] = g[fin] * (ti / v[fin]) ** (1.0 / s)
                else:
                    out[i] = np.inf
                continue
            lo_v, hi_v = v[k - 1], v[k]
            if not np.isfinite(hi_v) or lo_v == 0.0:
                # jump segment: the crossing happens at its right-edge node
                out[i] = g[k]
                continue
            s = np.log(hi_v / lo_v) / np.log(g[k] / g[k - 1])
            out[i] = g[k - 1] * (ti / lo_v) ** (1.0 / s)
        return float(out[0]) if scalar else out
