"""Modulars, Luxemburg norms, and potential-theoretic sweeps on grids.

The operations here connect the generalized-Young-function layer to sampled
functions: the modular int phi(x,|u|) dx, the Luxemburg norm
inf{lam > 0 : modular(u/lam) <= 1}, the two-norm Hoelder bound, norm bounds
for ball indicators, the Riesz potential I_alpha f, the centered maximal
function, the ball-averaging (Jensen-type) inequality, and the gradient
representation formula.

Singular kernels are handled with the host-cell disk correction: the cell
containing the evaluation point contributes its value times the exact
integral of |y|^(alpha-n) over the disk of equal volume,
(n/alpha) omega_n rho^alpha with omega_n rho^n = cell volume.  Radial inputs
use the one-dimensional shell reduction with angular means that exclude the
host patch; the excluded patch gets the same disk correction.
"""

import numpy as np

from . import accel
from .conditions import unit_ball_volume
from .errors import NoFiniteNormError
from .gyf import ConjugateGYF
from .grids import Domain, GridFunction
from .reports import Stopwatch, VerificationReport, summarize

__all__ = [
    "EPS_NORM",
    "EPS_REP",
    "modular",
    "luxemburg_norm",
    "check_holder",
    "char_ball_norm_bounds",
    "riesz_potential",
    "maximal_function",
    "ball_averages",
    "check_average_jensen",
    "check_ball_kernel_bound",
    "representation_formula_check",
]

EPS_NORM = 1e-6        # relative bisection tolerance for Luxemburg norms
EPS_REP = 1e-3         # relative tolerance of the representation formula
_LADDER_EXP = 60       # modular probes at lam = 2^k, |k| <= _LADDER_EXP
_THETA_FLOOR = 1e-9    # smallest angle probed by the circle-mean quadrature
_GAMMA_FLOOR = 1.0 / 256.0


def _points_and_scales(phi, u):
    if phi.n != u.domain.n:
        raise ValueError("phi lives on R^%d but the grid is in R^%d"
                         % (phi.n, u.domain.n))
    if not np.all(np.isfinite(u.values)):
        raise ValueError("grid function has non-finite values")
    return u.points, np.abs(u.values)


def modular(phi, u):
    """int_Omega phi(x, |u(x)|) dx with the grid weights; +inf propagates."""
    X, T = _points_and_scales(phi, u)
    vals = phi.phi_xt(X, T)
    if np.any(np.isinf(vals)):
        return float("inf")
    return float(np.dot(u.weights, vals))


def luxemburg_norm(phi, u, eps=EPS_NORM):
    """inf{lam > 0 : modular(phi, u/lam) <= 1} by monotone bisection.

    Returns the certified-feasible upper end of the final bracket, so
    modular(u / norm) <= 1 always holds for the returned value.
    """
    X, T = _points_and_scales(phi, u)
    if not np.any(T > 0.0):
        return 0.0
    w = u.weights

    def g(lam):
        vals = phi.phi_xt(X, T / lam)
        if np.any(np.isinf(vals)):
            return float("inf")
        return float(np.dot(w, vals))

    hi = None
    lo = 0.0
    if g(1.0) <= 1.0:
        # walk the dyadic ladder down to the first infeasible scale
        hi = 1.0
        for k in range(-1, -_LADDER_EXP - 1, -1):
            lam = 2.0 ** k
            if g(lam) <= 1.0:
                hi = lam
            else:
                lo = lam
                break
    else:
        lo = 1.0
        for k in range(1, _LADDER_EXP + 1):
            lam = 2.0 ** k
            if g(lam) <= 1.0:
                hi = lam
                break
            lo = lam
        if hi is None:
            raise NoFiniteNormError(
                "modular exceeded 1 for every probed scale up to 2^%d"
                % _LADDER_EXP)
    for _ in range(80):
        if hi - lo <= eps * hi:
            break
        mid = 0.5 * (lo + hi) if lo == 0.0 else float(np.sqrt(lo * hi))
        if g(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return hi


def check_holder(phi, u, v, phi_conj=None, tol=1e-12):
    """int |u v| <= 2 ||u||_phi ||v||_(conjugate phi) on the shared grid."""
    if u.points.shape != v.points.shape or np.abs(u.points - v.points).max() > 0.0:
        raise ValueError("the two grid functions must share one grid")
    conj = ConjugateGYF(phi) if phi_conj is None else phi_conj
    with Stopwatch() as sw:
        lhs = float(np.dot(u.weights, np.abs(u.values) * np.abs(v.values)))
        nu = luxemburg_norm(phi, u)
        nv = luxemburg_norm(conj, v)
        rhs = 2.0 * nu * nv
    violation = lhs - rhs
    scale = max(rhs, 1e-300)
    return VerificationReport(
        name="holder-two-norm",
        samples=u.size,
        lhs={"integral": lhs},
        rhs={"bound": rhs, "norm_u": nu, "norm_v": nv},
        constant=lhs / scale if rhs > 0.0 else 0.0,
        max_violation=violation / scale,
        tolerance=tol,
        passed=bool(violation <= tol * scale),
        runtime_s=sw.seconds,
    )


def _indicator_grid(phi, ball, resolution):
    if ball.kind != "ball":
        raise ValueError("char_ball_norm_bounds needs a ball domain")
    if phi.x_independent:
        return GridFunction.radial(ball, resolution, fn=lambda r: np.ones_like(r))
    if ball.n == 2:
        return GridFunction.polar(ball, resolution, 2 * resolution,
                                  fn=lambda p: np.ones(p.shape[0]))
    if ball.n == 3:
        return GridFunction.spherical(ball, resolution, 8, 16,
                                      fn=lambda p: np.ones(p.shape[0]))
    raise ValueError("x-dependent indicator norms support n <= 3")


def char_ball_norm_bounds(phi, ball, x, beta, resolution=64, tol=3.0 * EPS_NORM):
    """Norm bounds for a ball indicator against the inverse at scale 1/|B|.

    Checks  ||chi_B||_phi <= 1/(beta phi^{-1}(x, |B|^{-1}))  and
    ||chi_B||_(conjugate) <= 2/(beta conj^{-1}(x, |B|^{-1})) at the given
    x in B, with the comparability constant beta supplied by the caller.
    The default tolerance covers the norm bisection resolution: power
    families attain the first bound with equality at beta = 1.
    """
    x = np.asarray(x, dtype=float)
    if not ball.contains(x[None, :])[0]:
        raise ValueError("the evaluation point must lie in the ball")
    gf = _indicator_grid(phi, ball, resolution)
    conj = ConjugateGYF(phi)
    inv_scale = 1.0 / ball.measure
    with Stopwatch() as sw:
        norm_phi = luxemburg_norm(phi, gf)
        norm_conj = luxemburg_norm(conj, gf)
        inv_phi = float(phi.inverse_xt(x[None, :], np.array([inv_scale]))[0])
        inv_conj = float(conj.inverse_xt(x[None, :], np.array([inv_scale]))[0])
    bound_phi = 1.0 / (beta * inv_phi)
    bound_conj = 2.0 / (beta * inv_conj)
    v1 = norm_phi / bound_phi - 1.0
    v2 = norm_conj / bound_conj - 1.0
    worst = max(v1, v2)
    return VerificationReport(
        name="indicator-norm-bounds",
        samples=gf.size,
        lhs={"norm": norm_phi, "norm_conjugate": norm_conj},
        rhs={"bound": bound_phi, "bound_conjugate": bound_conj},
        constant=beta,
        max_violation=worst,
        tolerance=tol,
        passed=bool(worst <= tol),
        runtime_s=sw.seconds,
        details={"ball_measure": ball.measure, "ratios": [1.0 + v1, 1.0 + v2]},
    )


# --------------------------------------------------------------------------
# Riesz potential
# --------------------------------------------------------------------------

def _circle_mean(s, radii, alpha, caps, nodes=96):
    """Mean of |s e1 - r theta|^(alpha-2) over the unit circle, cap excluded.

    (1/pi) int_cap^pi (s^2 + r^2 - 2 s r cos th)^((alpha-2)/2) dth, computed
    with Gauss-Legendre nodes in log(theta) so the near-origin boundary layer
    of width ~|s-r|/s is resolved for every shell.
    """
    radii = np.asarray(radii, dtype=float)
    caps = np.maximum(np.asarray(caps, dtype=float), _THETA_FLOOR)
    gl_x, gl_w = np.polynomial.legendre.leggauss(nodes)
    lo = np.log(caps)[:, None]
    hi = np.log(np.pi)
    mid, rad = 0.5 * (hi + lo), 0.5 * (hi - lo)
    theta = np.exp(mid + rad * gl_x[None, :])
    d2 = s * s + radii[:, None] ** 2 - 2.0 * s * radii[:, None] * np.cos(theta)
    integrand = np.maximum(d2, 1e-300) ** (0.5 * (alpha - 2.0)) * theta
    return (integrand * gl_w[None, :]).sum(axis=1) * rad.ravel() / np.pi


def _sphere_mean(s, radii, alpha, u_max):
    """Mean of |s e1 - r theta|^(alpha-3) over the unit sphere, cap excluded.

    Closed form of (1/2) int_{-1}^{u_max} (A - B u)^((alpha-3)/2) du with
    A = s^2 + r^2, B = 2 s r; the log branch covers alpha = 1.
    """
    radii = np.asarray(radii, dtype=float)
    u_max = np.asarray(u_max, dtype=float)
    A = s * s + radii ** 2
    B = 2.0 * s * radii
    near = np.maximum(A - B * u_max, 1e-300)
    far = A + B
    if abs(alpha - 1.0) < 1e-12:
        return np.log(far / near) / (2.0 * B)
    e = 0.5 * (alpha - 1.0)
    return (far ** e - near ** e) / (B * (alpha - 1.0))


def _riesz_at_origin(f, alpha):
    n = f.domain.n
    edges = f.shell_edges
    return float(unit_ball_volume(n) * n / alpha
                 * np.dot(f.values, np.diff(edges ** alpha)))


def _riesz_radial(f, alpha, s_values, angular_nodes):
    n = f.domain.n
    wn = unit_ball_volume(n)
    edges, radii = f.shell_edges, f.radii
    widths = np.diff(edges)
    out = np.empty(len(s_values))
    for i, s in enumerate(s_values):
        if s <= 0.0:
            out[i] = _riesz_at_origin(f, alpha)
            continue
        if n not in (2, 3):
            raise ValueError("off-center radial evaluation supports n in {2, 3}")
        host = min(int(np.searchsorted(edges, s, side="right")) - 1, len(radii) - 1)
        caps = np.full(len(radii), _THETA_FLOOR)
        correction = 0.0
        if 0 <= host < len(radii):
            theta_c = min(widths[host] / (2.0 * s), 0.5 * np.pi)
            caps[host] = theta_c
            if n == 2:
                patch = f.weights[host] * theta_c / np.pi
            else:
                patch = f.weights[host] * 0.5 * (1.0 - np.cos(theta_c))
            rho = (patch / wn) ** (1.0 / n)
            correction = f.values[host] * (n / alpha) * wn * rho ** alpha
        if n == 2:
            means = _circle_mean(s, radii, alpha, caps, nodes=angular_nodes)
        else:
            means = _sphere_mean(s, radii, alpha, np.cos(caps))
        out[i] = float(np.dot(f.weights * f.values, means)) + correction
    return out


def riesz_potential(f, alpha, evals=None, angular_nodes=96):
    """I_alpha f(x) = int f(y) |x - y|^(alpha - n) dy on the grid.

    With evals=None the potential is evaluated at the grid's own sample
    points and returned as a GridFunction (so level-set measures reuse the
    grid weights); an explicit (P, n) point array returns a plain array.
    Radial layouts use the shell reduction; the evaluation at the center is
    the exact per-shell integral of r^(alpha-1).
    """
    n = f.domain.n
    if not 0.0 < alpha < n:
        raise ValueError("alpha must lie in (0, n)")
    as_grid = evals is None
    if f.layout == "radial":
        if as_grid:
            s_values = f.radii
        else:
            pts = np.atleast_2d(np.asarray(evals, dtype=float))
            s_values = np.linalg.norm(pts - f.domain.center, axis=1)
        vals = _riesz_radial(f, alpha, s_values, angular_nodes)
        return f.with_values(vals) if as_grid else vals

    pts = f.points if as_grid else np.atleast_2d(np.asarray(evals, dtype=float))
    wn = unit_ball_volume(n)
    vals = accel.kernel_power_sum(f.points, f.weights, f.values, pts, n - alpha)
    scale = max(f.spacing, 1e-300)
    for i, p in enumerate(pts):
        d2 = np.einsum("ij,ij->i", f.points - p, f.points - p)
        j = int(np.argmin(d2))
        if np.sqrt(d2[j]) <= 1e-9 * scale:
            rho = (f.weights[j] / wn) ** (1.0 / n)
            vals[i] += f.values[j] * (n / alpha) * wn * rho ** alpha
    return f.with_values(vals) if as_grid else vals


# --------------------------------------------------------------------------
# maximal function and ball averages
# --------------------------------------------------------------------------

def default_radius_ladder(f):
    """Dyadic radii from the grid spacing up to the domain diameter."""
    h = f.spacing
    diam = f.domain.diameter()
    ladder = [h]
    while ladder[-1] < diam:
        ladder.append(2.0 * ladder[-1])
    return np.asarray(ladder)


def ball_averages(f, centers, radii):
    """Weighted means of |f| over the balls B(center, r).

    Balls inside the domain are normalized by the quadrature mass they
    enclose (a genuine probability average over the sampled cells); balls
    reaching past the boundary are normalized by max(omega_n r^n, enclosed
    mass), treating the function as zero outside the domain.
    """
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    radii = np.asarray(radii, dtype=float)
    wv, w = accel.ball_sums(f.points, f.weights, np.abs(f.values), centers, radii)
    wn = unit_ball_volume(f.domain.n)
    full = wn * radii[None, :] ** f.domain.n
    inside = np.stack([f.domain.interior_mask(centers, r) for r in radii], axis=1)
    denom = np.where(inside, w, np.maximum(full, w))
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(denom > 0.0, wv / denom, 0.0)
    return means, inside


def maximal_function(f, radii=None, evals=None):
    """Centered maximal function over a dyadic radius ladder.

    Mf(x) is the largest ball average of |f| over the ladder; with
    evals=None it is evaluated at the grid's own points and returned as a
    GridFunction.
    """
    if radii is None:
        radii = default_radius_ladder(f)
    as_grid = evals is None
    pts = f.points if as_grid else np.atleast_2d(np.asarray(evals, dtype=float))
    means, _ = ball_averages(f, pts, radii)
    out = means.max(axis=1)
    return f.with_values(out) if as_grid else out


def check_ball_kernel_bound(f, evals, deltas, alpha=1.0, tol=0.02):
    """Local singular-kernel mass against the maximal function.

    Checks int_{B(x,delta)} |f(y)| |x-y|^(alpha-n) dy
    <= (n/alpha) omega_n delta^alpha Mf(x) on the sampled (x, delta) pairs;
    f === 1 attains equality in the continuum, so the pass tolerance is a
    small quadrature slack.
    """
    n = f.domain.n
    wn = unit_ball_volume(n)
    evals = np.atleast_2d(np.asarray(evals, dtype=float))
    deltas = np.asarray(deltas, dtype=float)
    ladder = np.unique(np.concatenate([default_radius_ladder(f), deltas]))
    means, _ = ball_averages(f, evals, ladder)
    maximal = means.max(axis=1)
    absf = f.abs()
    worst = -np.inf
    rows = []
    with Stopwatch() as sw:
        for i, x in enumerate(evals):
            d2 = np.einsum("ij,ij->i", f.points - x, f.points - x)
            d = np.sqrt(d2)
            for delta in deltas:
                sel = (d > 0.0) & (d <= delta)
                lhs = float(np.dot(absf.weights[sel],
                                   absf.values[sel] * d[sel] ** (alpha - n)))
                j = int(np.argmin(d2))
                if d[j] <= 1e-9 * f.spacing:
                    rho = (f.weights[j] / wn) ** (1.0 / n)
                    lhs += absf.values[j] * (n / alpha) * wn * rho ** alpha
                rhs = (n / alpha) * wn * delta ** alpha * maximal[i]
                rel = lhs / rhs - 1.0 if rhs > 0.0 else (0.0 if lhs == 0.0 else np.inf)
                worst = max(worst, rel)
                rows.append((lhs, rhs))
    rows = np.asarray(rows)
    return VerificationReport(
        name="ball-kernel-maximal-bound",
        samples=rows.shape[0],
        lhs=summarize(rows[:, 0]),
        rhs=summarize(rows[:, 1]),
        constant=float(np.max(rows[:, 0] / np.maximum(rows[:, 1], 1e-300))),
        max_violation=float(worst),
        tolerance=tol,
        passed=bool(worst <= tol),
        runtime_s=sw.seconds,
    )


def check_average_jensen(phi, f, centers=None, radii=None, gammas=None,
                         gamma_floor=_GAMMA_FLOOR, tol=1e-11):
    """Largest gamma with phi(x, gamma.avg_B |f|) <= avg_B phi(.,|f|) on balls.

    Only balls contained in the domain are sampled, so each average is a
    probability average of the sampled cells and the x-independent convex
    case passes at gamma = 1 by Jensen's inequality exactly.  The norm of f
    is clamped to 1 first.
    """
    nrm = luxemburg_norm(phi, f)
    if nrm > 1.0:
        f = f.scaled(1.0 / nrm)
    if centers is None:
        inner = f.points[f.domain.interior_mask(f.points, 0.25 * f.domain.diameter())]
        step = max(1, inner.shape[0] // 12)
        centers = inner[::step][:12]
    centers = np.atleast_2d(np.asarray(centers, dtype=float))
    if radii is None:
        h = f.spacing
        lim = 0.2 * f.domain.diameter()
        radii = [4.0 * h]
        while radii[-1] * 2.0 <= lim:
            radii.append(2.0 * radii[-1])
    radii = np.asarray(radii, dtype=float)
    if gammas is None:
        gammas = np.geomspace(gamma_floor, 1.0, 25)
    gammas = np.sort(np.asarray(gammas, dtype=float))[::-1]

    phivals = phi.phi_xt(f.points, np.abs(f.values))
    fbar = f.with_values(phivals)
    mean_f, inside = ball_averages(f, centers, radii)
    mean_phi, _ = ball_averages(fbar, centers, radii)

    with Stopwatch() as sw:
        gamma_star = None
        worst_at_star = np.inf
        checked = 0
        for gamma in gammas:
            worst = -np.inf
            for i, x in enumerate(centers):
                for k, r in enumerate(radii):
                    if not inside[i, k]:
                        continue
                    checked += 1
                    sel = np.linalg.norm(f.points - x, axis=1) <= r
                    lhs = phi.phi_xt(f.points[sel],
                                     np.full(sel.sum(), gamma * mean_f[i, k]))
                    defect = float(lhs.max()) - mean_phi[i, k]
                    worst = max(worst, defect / max(1.0, mean_phi[i, k]))
            if worst <= tol:
                gamma_star = float(gamma)
                worst_at_star = worst
                break
    passed = gamma_star is not None and gamma_star >= gamma_floor
    return VerificationReport(
        name="ball-average-jensen",
        samples=checked,
        lhs=summarize(mean_f),
        rhs=summarize(mean_phi),
        constant=gamma_star,
        max_violation=worst_at_star if gamma_star is not None else np.inf,
        tolerance=tol,
        passed=bool(passed),
        runtime_s=sw.seconds,
        details={"gamma_floor": gamma_floor, "norm": min(nrm, 1.0)},
    )


# --------------------------------------------------------------------------
# gradient representation formula
# --------------------------------------------------------------------------

def representation_formula_check(u, grad_fn, evals, theta_nodes=64,
                                 rho_nodes=8, tol=EPS_REP):
    """u(x) = (1/(n omega_n)) int grad u(y).(x-y) |x-y|^(-n) dy at eval points.

    Far field: midpoint sums over all cells except the host cell.  Host
    cell: exact polar integration over the square patch around x — in polar
    coordinates centered at x the kernel cancels to grad u(x - rho e(th)).e(th),
    which is bounded, and the patch boundary is rmax(th) = a/max(|cos th|,
    |sin th|) with a the half cell width.  Evaluation points are snapped to
    cell centers; the gradient callable supplies off-grid values.
    """
    if u.layout != "tensor" or u.domain.n != 2:
        raise ValueError("the representation check runs on tensor grids in n=2")
    n = 2
    wn = unit_ball_volume(n)
    pts, idx = u.snap(evals)
    grad = np.asarray(grad_fn(u.points), dtype=float)
    far = accel.dot_kernel_sum(u.points, u.weights, grad, pts, float(n)) / (n * wn)

    a = 0.5 * float(np.min(u.meta["steps"]))
    theta = (np.arange(theta_nodes) + 0.5) * (2.0 * np.pi / theta_nodes)
    ex, ey = np.cos(theta), np.sin(theta)
    rmax = a / np.maximum(np.abs(ex), np.abs(ey))
    gl_x, gl_w = np.polynomial.legendre.leggauss(rho_nodes)
    rho = 0.5 * rmax[:, None] * (gl_x[None, :] + 1.0)   # (Q, R)
    rho_w = 0.5 * rmax[:, None] * gl_w[None, :]

    with Stopwatch() as sw:
        patch = np.empty(pts.shape[0])
        for i, x in enumerate(pts):
            ys = np.stack([x[0] - rho * ex[:, None], x[1] - rho * ey[:, None]],
                          axis=-1).reshape(-1, 2)
            g = np.asarray(grad_fn(ys), dtype=float).reshape(theta_nodes, -1, 2)
            dots = g[..., 0] * ex[:, None] + g[..., 1] * ey[:, None]
            patch[i] = (dots * rho_w).sum() * (2.0 * np.pi / theta_nodes) / (n * wn)
        values = far + patch
        exact = u.values[idx]
        rel = np.abs(values - exact) / np.maximum(np.abs(exact), 1e-300)
    return VerificationReport(
        name="gradient-representation",
        samples=pts.shape[0],
        lhs=summarize(values),
        rhs=summarize(exact),
        constant=float(np.max(values / np.where(exact != 0.0, exact, 1.0))),
        max_violation=float(rel.max()),
        tolerance=tol,
        passed=bool(rel.max() <= tol),
        runtime_s=sw.seconds,
        details={"values": values, "exact": exact},
    )
