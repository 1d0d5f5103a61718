"""Domains and weighted grid functions.

Geometry layer for the desk-scale experiments: boxes and balls with
closed-form measures, and sampled functions carrying quadrature weights.
Every layout is built so that the weights sum to the domain measure exactly
(up to roundoff):

  tensor     cell-centered boxes, weight = cell volume, n <= 3
  radial     concentric shells on a ball, weight_j = omega_n (e_{j+1}^n - e_j^n),
             values attached to shell midradii; any n
  polar      shells x uniform angles on a disk (n = 2)
  spherical  shells x uniform cos(colatitude) x uniform azimuth cells on a
             3-ball

Radial layouts store samples of radially symmetric functions; their points
are embedded on the positive first coordinate axis, which is exact whenever
the companion generalized Young function depends on x through |x| only.

CSV round-trip: one comment header declaring the dimension, domain, and
layout, one column-name row (coordinates..., weight, value), then
``%.17g``-formatted rows, so that writes are bit-reproducible.
"""

import io
import warnings

import numpy as np

from .conditions import unit_ball_volume
from .errors import ConfigError

__all__ = [
    "Domain",
    "GridFunction",
    "domain_from_config",
]

_WEIGHT_SUM_RTOL = 1e-10


def _as_point(x, n):
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.shape != (n,):
        raise ValueError("expected a point in R^%d, got shape %r" % (n, p.shape))
    return p


class Domain(object):
    """A box or a ball with closed-form Lebesgue measure."""

    def __init__(self, kind, center, half=None, radius=None):
        center = np.atleast_1d(np.asarray(center, dtype=float))
        self.kind = str(kind)
        self.center = center
        self.n = center.size
        if self.kind == "box":
            if half is None:
                raise ValueError("box domain needs half-widths")
            self.half = _as_point(half, self.n)
            if not np.all(self.half > 0.0):
                raise ValueError("box half-widths must be positive")
            self.radius = None
            self.measure = float(np.prod(2.0 * self.half))
        elif self.kind == "ball":
            if radius is None:
                raise ValueError("ball domain needs a radius")
            self.radius = float(radius)
            if not self.radius > 0.0:
                raise ValueError("ball radius must be positive")
            self.half = None
            self.measure = unit_ball_volume(self.n) * self.radius ** self.n
        else:
            raise ValueError("unknown domain kind %r" % (kind,))
        if not (np.isfinite(self.measure) and self.measure > 0.0):
            raise ValueError("domain measure must be positive and finite")

    @classmethod
    def box(cls, center, half):
        return cls("box", center, half=half)

    @classmethod
    def ball(cls, center, radius):
        return cls("ball", center, radius=radius)

    def contains(self, points):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = pts - self.center
        if self.kind == "box":
            return np.all(np.abs(d) <= self.half + 0.0, axis=1)
        return np.einsum("ij,ij->i", d, d) <= self.radius ** 2

    def diameter(self):
        if self.kind == "box":
            return 2.0 * float(np.linalg.norm(self.half))
        return 2.0 * self.radius

    def interior_mask(self, points, margin):
        """Points at distance >= margin from the boundary."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        d = pts - self.center
        if self.kind == "box":
            return np.all(np.abs(d) <= self.half - margin, axis=1)
        return np.sqrt(np.einsum("ij,ij->i", d, d)) <= self.radius - margin

    def header_tokens(self):
        toks = ["domain=%s" % self.kind,
                "center=%s" % ",".join("%.17g" % c for c in self.center)]
        if self.kind == "box":
            toks.append("half=%s" % ",".join("%.17g" % h for h in self.half))
        else:
            toks.append("radius=%.17g" % self.radius)
        return toks

    def __repr__(self):
        if self.kind == "box":
            return "Domain.box(center=%s, half=%s)" % (list(self.center), list(self.half))
        return "Domain.ball(center=%s, radius=%g)" % (list(self.center), self.radius)


def domain_from_config(doc):
    """Build a Domain from a mapping with keys kind, center, half|radius."""
    if not isinstance(doc, dict):
        raise ConfigError("domain config must be a table/object")
    allowed = {"kind", "center", "half", "radius"}
    for key in doc:
        if key not in allowed:
            raise ConfigError("unknown key %r in domain config; expected one of %s"
                              % (key, sorted(allowed)))
    try:
        kind = doc["kind"]
        center = doc["center"]
    except KeyError as exc:
        raise ConfigError("domain config missing key %s" % (exc,))
    try:
        return Domain(kind, center, half=doc.get("half"), radius=doc.get("radius"))
    except ValueError as exc:
        raise ConfigError(str(exc))


def _cell_axes(domain, shape):
    axes, steps = [], []
    for k in range(domain.n):
        m = int(shape[k])
        if m < 1:
            raise ValueError("tensor grid needs at least one cell per axis")
        lo = domain.center[k] - domain.half[k]
        dx = 2.0 * domain.half[k] / m
        axes.append(lo + dx * (np.arange(m) + 0.5))
        steps.append(dx)
    return axes, np.asarray(steps)


class GridFunction(object):
    """Samples of a function with quadrature weights on a Domain.

    Immutable by convention: derived objects are produced by ``with_values``.
    """

    def __init__(self, domain, points, weights, values, layout="custom",
                 meta=None, check=True):
        self.domain = domain
        self.points = np.atleast_2d(np.asarray(points, dtype=float))
        self.weights = np.asarray(weights, dtype=float)
        self.values = np.asarray(values, dtype=float)
        self.layout = str(layout)
        self.meta = dict(meta or {})
        n = domain.n
        if self.points.shape != (self.weights.size, n):
            raise ValueError("points must have shape (N, %d)" % n)
        if self.values.shape != self.weights.shape:
            raise ValueError("values and weights must have matching shapes")
        if check:
            if not np.all(self.weights > 0.0):
                raise ValueError("quadrature weights must be positive")
            total = float(self.weights.sum())
            if abs(total - domain.measure) > _WEIGHT_SUM_RTOL * domain.measure:
                raise ValueError(
                    "weights sum to %.17g but the domain measure is %.17g"
                    % (total, domain.measure))

    # ---------------------------------------------------------------- layouts

    @classmethod
    def tensor(cls, domain, shape, fn=None, values=None):
        """Cell-centered tensor grid on a box, n <= 3; weight = cell volume."""
        if domain.kind != "box":
            raise ValueError("tensor layout requires a box domain")
        if domain.n > 3:
            raise ValueError("tensor layout is capped at n <= 3")
        if np.isscalar(shape):
            shape = (int(shape),) * domain.n
        shape = tuple(int(m) for m in shape)
        if len(shape) != domain.n:
            raise ValueError("shape must give one cell count per axis")
        axes, steps = _cell_axes(domain, shape)
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.column_stack([m.reshape(-1) for m in mesh])
        w = np.full(pts.shape[0], float(np.prod(steps)))
        vals = cls._fill_values(fn, values, pts, pts.shape[0])
        meta = {"shape": shape, "steps": steps, "axes": axes}
        return cls(domain, pts, w, vals, layout="tensor", meta=meta)

    @classmethod
    def radial(cls, domain, m, fn=None, values=None):
        """Concentric shells on a ball; exact shell-volume weights.

        The weight of shell j is omega_n (e_{j+1}^n - e_j^n), the exact
        integral of the surface factor n omega_n r^{n-1} across the shell.
        Values are attached to shell midradii and the points are embedded on
        the positive first coordinate axis.
        """
        if domain.kind != "ball":
            raise ValueError("radial layout requires a ball domain")
        m = int(m)
        edges = np.linspace(0.0, domain.radius, m + 1)
        radii = 0.5 * (edges[:-1] + edges[1:])
        wn = unit_ball_volume(domain.n)
        w = wn * np.diff(edges ** domain.n)
        pts = np.zeros((m, domain.n))
        pts[:, 0] = radii
        pts += domain.center
        if fn is not None:
            vals = np.asarray(fn(radii), dtype=float)
        elif values is not None:
            vals = np.asarray(values, dtype=float)
        else:
            vals = np.zeros(m)
        meta = {"m": m, "edges": edges, "radii": radii, "steps": np.array([edges[1] - edges[0]])}
        return cls(domain, pts, w, vals, layout="radial", meta=meta)

    @classmethod
    def polar(cls, domain, m_r, m_theta, fn=None, values=None):
        """Shells x uniform angles on a disk (n = 2); weight = shell/angles."""
        if domain.kind != "ball" or domain.n != 2:
            raise ValueError("polar layout requires a 2-dimensional ball")
        m_r, m_theta = int(m_r), int(m_theta)
        edges = np.linspace(0.0, domain.radius, m_r + 1)
        radii = 0.5 * (edges[:-1] + edges[1:])
        shell_w = np.pi * np.diff(edges ** 2)
        theta = (np.arange(m_theta) + 0.5) * (2.0 * np.pi / m_theta)
        rr = np.repeat(radii, m_theta)
        tt = np.tile(theta, m_r)
        pts = domain.center + np.column_stack([rr * np.cos(tt), rr * np.sin(tt)])
        w = np.repeat(shell_w / m_theta, m_theta)
        vals = cls._fill_values(fn, values, pts, pts.shape[0])
        meta = {"m": (m_r, m_theta), "edges": edges, "radii": radii,
                "steps": np.array([edges[1] - edges[0]])}
        return cls(domain, pts, w, vals, layout="polar", meta=meta)

    @classmethod
    def spherical(cls, domain, m_r, m_u, m_phi, fn=None, values=None):
        """Shells x uniform cos(colatitude) x uniform azimuth on a 3-ball."""
        if domain.kind != "ball" or domain.n != 3:
            raise ValueError("spherical layout requires a 3-dimensional ball")
        m_r, m_u, m_phi = int(m_r), int(m_u), int(m_phi)
        edges = np.linspace(0.0, domain.radius, m_r + 1)
        radii = 0.5 * (edges[:-1] + edges[1:])
        shell_w = unit_ball_volume(3) * np.diff(edges ** 3)
        u_edges = np.linspace(-1.0, 1.0, m_u + 1)
        u = 0.5 * (u_edges[:-1] + u_edges[1:])
        phi = (np.arange(m_phi) + 0.5) * (2.0 * np.pi / m_phi)
        uu, pp = np.meshgrid(u, phi, indexing="ij")
        s = np.sqrt(np.maximum(0.0, 1.0 - uu ** 2))
        dirs = np.column_stack([(s * np.cos(pp)).ravel(),
                                (s * np.sin(pp)).ravel(),
                                uu.ravel()])
        pts = domain.center + (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
        w = np.repeat(shell_w / (m_u * m_phi), m_u * m_phi)
        vals = cls._fill_values(fn, values, pts, pts.shape[0])
        meta = {"m": (m_r, m_u, m_phi), "edges": edges, "radii": radii,
                "steps": np.array([edges[1] - edges[0]])}
        return cls(domain, pts, w, vals, layout="spherical", meta=meta)

    @staticmethod
    def _fill_values(fn, values, pts, count):
        if fn is not None:
            return np.asarray(fn(pts), dtype=float)
        if values is not None:
            return np.asarray(values, dtype=float)
        return np.zeros(count)

    # ------------------------------------------------------------- accessors

    @property
    def size(self):
        return self.values.size

    @property
    def spacing(self):
        """Representative linear cell size (largest axis step)."""
        steps = self.meta.get("steps")
        if steps is None:
            return float(self.weights.max() ** (1.0 / self.domain.n))
        return float(np.max(steps))

    @property
    def radii(self):
        r = self.meta.get("radii")
        if r is None:
            raise AttributeError("layout %r has no radial structure" % self.layout)
        return r

    @property
    def shell_edges(self):
        e = self.meta.get("edges")
        if e is None:
            raise AttributeError("layout %r has no radial structure" % self.layout)
        return e

    def with_values(self, values):
        return GridFunction(self.domain, self.points, self.weights,
                            values, layout=self.layout, meta=self.meta, check=False)

    def map_values(self, fn):
        return self.with_values(np.asarray(fn(self.values), dtype=float))

    def scaled(self, c):
        return self.with_values(self.values * float(c))

    def abs(self):
        return self.with_values(np.abs(self.values))

    def integrate(self):
        return float(np.dot(self.weights, self.values))

    def measure_above(self, t):
        """Weighted measure of the level set {value > t}."""
        return float(self.weights[self.values > t].sum())

    def snap(self, points):
        """Map arbitrary points to the nearest sample points."""
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.empty(pts.shape[0], dtype=int)
        for i, p in enumerate(pts):
            d2 = np.einsum("ij,ij->i", self.points - p, self.points - p)
            out[i] = int(np.argmin(d2))
        return self.points[out], out

    # ------------------------------------------------------------------- I/O

    def write_csv(self, path):
        """Write the grid function as CSV to a path or an open file object."""
        n = self.domain.n
        toks = ["# musielak-grid", "n=%d" % n] + self.domain.header_tokens()
        toks.append("layout=%s" % self.layout)
        if self.layout == "tensor":
            toks.append("m=%s" % ",".join(str(s) for s in self.meta["shape"]))
        elif self.layout == "radial":
            toks.append("m=%d" % self.meta["m"])
        elif self.layout in ("polar", "spherical"):
            toks.append("m=%s" % ",".join(str(s) for s in self.meta["m"]))
        cols = ["x%d" % (k + 1) for k in range(n)] + ["weight", "value"]
        buf = io.StringIO()
        buf.write(" ".join(toks) + "\n")
        buf.write(",".join(cols) + "\n")
        data = np.column_stack([self.points, self.weights, self.values])
        for row in data:
            buf.write(",".join("%.17g" % v for v in row) + "\n")
        if hasattr(path, "write"):
            path.write(buf.getvalue())
        else:
            with open(path, "w") as fh:
                fh.write(buf.getvalue())

    @classmethod
    def read_csv(cls, path):
        with open(path, "r") as fh:
            header = fh.readline().strip()
            fh.readline()  # column names
            body = fh.read()
        if not header.startswith("# musielak-grid"):
            raise ConfigError("not a grid-function CSV: missing header line")
        tok = {}
        for piece in header.split()[2:]:
            key, _, val = piece.partition("=")
            tok[key] = val
        try:
            n = int(tok["n"])
            center = [float(c) for c in tok["center"].split(",")]
            if tok["domain"] == "box":
                dom = Domain.box(center, [float(h) for h in tok["half"].split(",")])
            elif tok["domain"] == "ball":
                dom = Domain.ball(center, float(tok["radius"]))
            else:
                raise ValueError("unknown domain kind %r" % (tok["domain"],))
            layout = tok["layout"]
        except (KeyError, ValueError) as exc:
            raise ConfigError("malformed grid-function header: %s" % (exc,))
        if dom.n != n:
            raise ConfigError("header dimension n=%d does not match the domain" % n)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")  # empty body is reported below
            raw = np.loadtxt(io.StringIO(body), delimiter=",", ndmin=2)
        if raw.size == 0 or raw.shape[1] != n + 2:
            raise ConfigError(
                "grid-function CSV needs %d columns (x1..x%d, weight, value) "
                "and at least one row" % (n + 2, n))
        pts, w, vals = raw[:, :n], raw[:, n], raw[:, n + 1]
        if layout in ("tensor", "radial", "polar", "spherical"):
            m = [int(s) for s in tok["m"].split(",")]
            if layout == "tensor":
                gf = cls.tensor(dom, tuple(m), values=vals)
            elif layout == "radial":
                gf = cls.radial(dom, m[0], values=vals)
            elif layout == "polar":
                gf = cls.polar(dom, m[0], m[1], values=vals)
            else:
                gf = cls.spherical(dom, m[0], m[1], m[2], values=vals)
            scale = max(1.0, float(np.abs(gf.points).max()))
            if gf.points.shape != pts.shape or np.abs(gf.points - pts).max() > 1e-9 * scale:
                raise ConfigError("grid-function rows do not match the declared layout")
            return gf
        return cls(dom, pts, w, vals, layout=layout or "custom")

    def __repr__(self):
        return "GridFunction(%s, layout=%r, size=%d)" % (
            self.domain, self.layout, self.size)
