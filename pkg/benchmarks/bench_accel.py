"""Benchmark the accelerated kernels against the pure-numpy fallback.

The backend is chosen at import time from MUSIELAK_NUMBA, so this script
re-invokes itself in a subprocess once per backend and prints a comparison
table.  Timings cover the three hot kernels (power-law sums, ball ladders,
dot-kernel sums) plus one end-to-end Riesz potential on a radial grid.

Usage:  python3 benchmarks/bench_accel.py [--points N] [--evals M]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np


def _timed(fn, *args, repeats=3):
    fn(*args)  # warm-up (includes JIT compilation when numba is active)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def run_worker(n_points, n_evals):
    from musielak import accel
    from musielak.analysis import riesz_potential
    from musielak.grids import Domain, GridFunction

    rng = np.random.default_rng(42)
    src = rng.uniform(-1.0, 1.0, size=(n_points, 2))
    w = rng.uniform(0.5, 1.5, size=n_points)
    v = rng.uniform(0.0, 2.0, size=n_points)
    vec = rng.normal(size=(n_points, 2))
    evals = rng.uniform(-0.5, 0.5, size=(n_evals, 2))
    radii = np.geomspace(0.05, 2.0, 24)

    dom = Domain.ball(np.zeros(2), 1.0)
    gf = GridFunction.radial(dom, 192, fn=lambda r: np.exp(-r * r))

    results = {
        "backend": accel.backend_name(),
        "power_sum": _timed(accel.kernel_power_sum, src, w, v, evals, 1.0),
        "ball_sums": _timed(accel.ball_sums, src, w, v, evals, radii),
        "dot_kernel_sum": _timed(accel.dot_kernel_sum, src, w, vec, evals, 2.0),
        "riesz_radial_192": _timed(lambda: riesz_potential(gf, 1.0)),
    }
    checks = {
        "power_sum": float(accel.kernel_power_sum(src, w, v, evals, 1.0).sum()),
        "ball_sums": float(accel.ball_sums(src, w, v, evals, radii)[0].sum()),
        "dot_kernel_sum": float(
            accel.dot_kernel_sum(src, w, vec, evals, 2.0).sum()),
    }
    results["checksums"] = checks
    print(json.dumps(results))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=20000)
    ap.add_argument("--evals", type=int, default=2000)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()

    if args.worker:
        run_worker(args.points, args.evals)
        return

    rows = {}
    for flag in ("1", "0"):
        env = dict(os.environ, MUSIELAK_NUMBA=flag)
        out = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker",
             "--points", str(args.points), "--evals", str(args.evals)],
            env=env, capture_output=True, text=True, check=True)
        rows[flag] = json.loads(out.stdout.strip().splitlines()[-1])

    fast, slow = rows["1"], rows["0"]
    print("kernel benchmark: %d source points, %d evaluation points"
          % (args.points, args.evals))
    print("%-18s %12s %12s %9s" % ("kernel", fast["backend"] + " [s]",
                                   slow["backend"] + " [s]", "speedup"))
    for key in ("power_sum", "ball_sums", "dot_kernel_sum",
                "riesz_radial_192"):
        print("%-18s %12.5f %12.5f %8.1fx"
              % (key, fast[key], slow[key], slow[key] / fast[key]))
    for key, a in fast["checksums"].items():
        b = slow["checksums"][key]
        rel = abs(a - b) / max(abs(a), abs(b), 1e-300)
        status = "ok" if rel < 1e-9 else "MISMATCH"
        print("agreement %-14s rel=%.2e %s" % (key, rel, status))


if __name__ == "__main__":
    main()
