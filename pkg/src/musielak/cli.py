"""Command-line interface: config ingestion, dispatch, result emission.

Subcommands
-----------
conjugate     tabulate the Sobolev-conjugate transform (H, its inverse, the
              transformed function, and the family oracle when one exists)
norm          Luxemburg norm of a grid function read from CSV
riesz         Riesz potential of a grid function, written back as CSV
maximal       centered maximal function of a grid function
conditions    structural condition checks on a configured function
verify        one named experiment (weak-type | modular-sobolev |
              poincare-zero | necessity) or 'all'
oracle-suite  the closed-form oracle comparison suite

Exit codes: 0 pass, 1 inequality violation / failed check, 2 usage error.
Every flag has an environment-variable default with the MUSIELAK_ prefix
(e.g. MUSIELAK_ALPHA for --alpha); explicit flags win over the environment,
which wins over the config file.  Diagnostics go to stderr; data goes to
--out files or stdout.
"""

import argparse
import json
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from .analysis import luxemburg_norm, maximal_function, riesz_potential
from .conditions import check_A0, check_A1, check_A2pp, check_growth_condition
from .errors import ConfigError, MusielakError, NoFiniteNormError
from .experiments import (run_modular_sobolev, run_necessity_demo,
                          run_oracle_suite, run_poincare_zero, run_weak_type)
from .grids import GridFunction
from .gyf import gyf_from_config
from .normalize import derive
from .reports import Experiment
from .sobolev import (SobolevConjugate, oracle_constant_power,
                      oracle_double_phase, oracle_variable_exponent)

ENV_PREFIX = "MUSIELAK_"
NORMALIZE_CHOICES = ("bar", "hat", "circ", "bullet", "none")
EXPERIMENTS = {
    "weak-type": run_weak_type,
    "modular-sobolev": run_modular_sobolev,
    "poincare-zero": run_poincare_zero,
    "necessity": run_necessity_demo,
}

# config key -> (accepted types, human description used in error messages)
_SCHEMA = {
    "phi": (dict, "mapping (an inline function document)"),
    "phi_path": (str, "string path to a function document"),
    "alpha": ((int, float), "number"),
    "n": (int, "integer"),
    "normalize": (str, "string, one of %s" % "|".join(NORMALIZE_CHOICES)),
    "seed": (int, "integer"),
    "resolution": (int, "integer"),
    "out": (str, "string path"),
    "threads": (int, "integer"),
    "tolerances": (dict, "mapping of tolerance name to number"),
    "experiment": (dict, "mapping with optional keys name/extras"),
    "data": (str, "string path to a grid-function CSV"),
}


@dataclass
class RunConfig:
    """Validated run parameters; create via parse_config or flag merging."""

    command: str | None = None
    phi_doc: dict | None = None
    alpha: float = 1.0
    n: int | None = None
    normalize: str = "bar"
    seed: int = 0
    resolution: int = 256
    out: str | None = None
    threads: int | None = None
    tolerances: dict = field(default_factory=dict)
    experiment: dict = field(default_factory=dict)
    data: str | None = None
    x: list | None = None
    t_grid: tuple | None = None
    exp: str | None = None

    def build_phi(self):
        if self.phi_doc is None:
            raise ConfigError(
                "this command needs a function document (--phi or the "
                "'phi' config key)")
        return gyf_from_config(self.phi_doc)


def load_document(path):
    """Read a JSON (.json) or TOML (.toml) mapping from disk."""
    if not os.path.exists(path):
        raise ConfigError("config file not found: %s" % path)
    if path.endswith(".toml"):
        import tomli
        with open(path, "rb") as fh:
            try:
                doc = tomli.load(fh)
            except tomli.TOMLDecodeError as exc:
                raise ConfigError("invalid TOML in %s: %s" % (path, exc))
    else:
        with open(path, "r") as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ConfigError("invalid JSON in %s: %s" % (path, exc))
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a mapping, got %s"
                          % type(doc).__name__)
    return doc


def _check_types(doc):
    for key, value in doc.items():
        if key not in _SCHEMA:
            raise ConfigError(
                "unknown config key %r; allowed keys: %s"
                % (key, ", ".join(sorted(_SCHEMA))))
        types, desc = _SCHEMA[key]
        if isinstance(value, bool) or not isinstance(value, types):
            raise ConfigError(
                "config key %r: expected %s, got %s"
                % (key, desc, type(value).__name__))


def parse_config(path):
    """Load, validate, and default-fill a run config document."""
    doc = load_document(path)
    _check_types(doc)
    if "phi" in doc and "phi_path" in doc:
        raise ConfigError("config keys 'phi' and 'phi_path' are exclusive")
    phi_doc = doc.get("phi")
    if "phi_path" in doc:
        phi_doc = load_document(doc["phi_path"])
    cfg = RunConfig(
        phi_doc=phi_doc,
        alpha=float(doc.get("alpha", 1.0)),
        n=doc.get("n"),
        normalize=doc.get("normalize", "bar"),
        seed=int(doc.get("seed", 0)),
        resolution=int(doc.get("resolution", 256)),
        out=doc.get("out"),
        threads=doc.get("threads"),
        tolerances=dict(doc.get("tolerances", {})),
        experiment=dict(doc.get("experiment", {})),
        data=doc.get("data"),
    )
    if cfg.normalize not in NORMALIZE_CHOICES:
        raise ConfigError(
            "config key 'normalize': expected one of %s, got %r"
            % ("|".join(NORMALIZE_CHOICES), cfg.normalize))
    for name, val in cfg.tolerances.items():
        if isinstance(val, bool) or not isinstance(val, (int, float)):
            raise ConfigError(
                "config key 'tolerances.%s': expected number, got %s"
                % (name, type(val).__name__))
    if cfg.phi_doc is not None:
        cfg.build_phi()  # reject invalid function documents at parse time
    return cfg


# -- flag / environment merging ----------------------------------------------------

_FLAG_CASTS = {
    "alpha": float,
    "n": int,
    "normalize": str,
    "seed": int,
    "resolution": int,
    "out": str,
    "threads": int,
    "data": str,
    "x": str,
    "t_grid": str,
    "exp": str,
    "phi": str,
}


def _env_value(name, cast):
    raw = os.environ.get(ENV_PREFIX + name.upper())
    if raw is None:
        return None
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(
            "environment variable %s%s: expected %s, got %r"
            % (ENV_PREFIX, name.upper(), cast.__name__, raw))


def _parse_point(text, n=None):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise ConfigError("--x expects comma-separated floats, got %r" % text)
    if n is not None and len(vals) != n:
        raise ConfigError("--x has %d coordinates but n=%d" % (len(vals), n))
    return vals


def _parse_t_grid(text):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError("--t-grid expects lo:hi:count, got %r" % text)
    try:
        lo, hi, k = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError("--t-grid expects lo:hi:count, got %r" % text)
    if not (0.0 < lo < hi) or k < 2:
        raise ConfigError("--t-grid needs 0 < lo < hi and count >= 2")
    return lo, hi, k


def merge(args):
    """Config file < environment < explicit flags."""
    cfg = parse_config(args.config) if args.config else RunConfig()
    cfg.command = args.command
    for name in ("alpha", "n", "normalize", "seed", "resolution", "out",
                 "threads", "data", "exp"):
        val = getattr(args, name, None)
        if val is None:
            val = _env_value(name, _FLAG_CASTS[name])
        if val is not None:
            setattr(cfg, name, val)
    if cfg.normalize not in NORMALIZE_CHOICES:
        raise ConfigError("normalize must be one of %s, got %r"
                          % ("|".join(NORMALIZE_CHOICES), cfg.normalize))
    phi_path = getattr(args, "phi", None) or _env_value("phi", str)
    if phi_path is not None:
        doc = load_document(phi_path)
        cfg.phi_doc = doc
        cfg.build_phi()
    for tol in ("rel", "norm", "rep"):
        val = getattr(args, "tol_" + tol, None)
        if val is None:
            val = _env_value("tol_" + tol, float)
        if val is not None:
            cfg.tolerances[tol] = val
    x_text = getattr(args, "x", None) or _env_value("x", str)
    if x_text is not None:
        cfg.x = _parse_point(x_text, cfg.n)
    tg = getattr(args, "t_grid", None) or _env_value("t_grid", str)
    if tg is not None:
        cfg.t_grid = _parse_t_grid(tg)
    return cfg


# -- subcommands --------------------------------------------------------------------

def _emit_text(cfg, text):
    if cfg.out:
        parent = os.path.dirname(cfg.out)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(cfg.out, "w") as fh:
            fh.write(text)
        print("wrote %s" % cfg.out, file=sys.stderr)
    else:
        sys.stdout.write(text)


def _conjugate_oracle(phi, n, x, ts):
    """Closed-form transform for the family, or NaNs when none applies."""
    nan = np.full(ts.shape, np.nan)
    try:
        if phi.family == "power":
            return oracle_constant_power(n, phi.p, ts)
        if phi.family == "variable-exponent":
            p_inf = phi.p_field.limit
            if p_inf is None:
                return nan
            p_x = float(phi.p_field(np.asarray([x], dtype=float))[0])
            return oracle_variable_exponent(n, p_inf, p_x, ts)
        if phi.family == "double-phase":
            a_x = float(phi.a_field(np.asarray([x], dtype=float))[0])
            return oracle_double_phase(n, phi.p, phi.q, a_x, ts)
    except ValueError:
        return nan
    return nan


def _cmd_conjugate(cfg):
    phi = cfg.build_phi()
    n = phi.n
    base = phi if cfg.normalize == "none" else derive(phi, cfg.normalize)
    try:
        sc = SobolevConjugate(base, alpha=cfg.alpha, n_nodes=cfg.resolution)
    except ValueError as exc:
        raise ConfigError(str(exc))
    x = cfg.x if cfg.x is not None else [0.0] * n
    if len(x) != n:
        raise ConfigError("--x has %d coordinates but n=%d" % (len(x), n))
    lo, hi, k = cfg.t_grid if cfg.t_grid else (1e-2, 1e2, 121)
    ts = np.geomspace(lo, hi, k)
    xv = None if phi.x_independent else np.asarray(x, dtype=float)
    H = sc.H_batch(xv, ts)
    H_inv = sc.H_inverse_batch(xv, ts)
    val = sc.value_batch(xv, ts)
    # closed forms describe the raw families; a normalization recipe edits
    # the function, so the comparison column only applies without one
    if cfg.normalize == "none":
        oracle = _conjugate_oracle(phi, n, x, ts)
    else:
        oracle = np.full(ts.shape, np.nan)
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = val / oracle
    x_label = ";".join("%g" % v for v in x)
    lines = ["x,t,H,H_inv,phi_conj,oracle,ratio"]
    for i in range(ts.size):
        lines.append("%s,%s" % (x_label, ",".join(
            "%.17g" % v for v in (ts[i], H[i], H_inv[i], val[i],
                                  oracle[i], ratio[i]))))
    _emit_text(cfg, "\n".join(lines) + "\n")
    return 0


def _read_data(cfg):
    if cfg.data is None:
        raise ConfigError("this command needs --data (a grid-function CSV)")
    if not os.path.exists(cfg.data):
        raise ConfigError("data file not found: %s" % cfg.data)
    return GridFunction.read_csv(cfg.data)


def _cmd_norm(cfg):
    gf = _read_data(cfg)
    phi = cfg.build_phi()
    if phi.n != gf.points.shape[1]:
        raise ConfigError(
            "function document is %d-dimensional but the grid is "
            "%d-dimensional" % (phi.n, gf.points.shape[1]))
    base = phi if cfg.normalize == "none" else derive(phi, cfg.normalize)
    try:
        norm = luxemburg_norm(base, gf)
    except NoFiniteNormError as exc:
        print("no finite norm: %s" % exc, file=sys.stderr)
        return 1
    _emit_text(cfg, "%.17g\n" % norm)
    return 0


def _cmd_riesz(cfg):
    gf = _read_data(cfg)
    pot = riesz_potential(gf, cfg.alpha)
    if cfg.out:
        pot.write_csv(cfg.out)
        print("wrote %s" % cfg.out, file=sys.stderr)
    else:
        pot.write_csv(sys.stdout)
    return 0


def _cmd_maximal(cfg):
    gf = _read_data(cfg)
    mf = maximal_function(gf)
    if cfg.out:
        mf.write_csv(cfg.out)
        print("wrote %s" % cfg.out, file=sys.stderr)
    else:
        mf.write_csv(sys.stdout)
    return 0


def _cmd_conditions(cfg):
    phi = cfg.build_phi()
    rng = np.random.default_rng(cfg.seed)
    lines = []
    ok = True
    a0 = check_A0(phi, rng=rng)
    lines.append("A0: %s (beta=%s)"
                 % ("holds" if a0.holds else "fails",
                    "%.6g" % a0.beta if a0.beta is not None else "-"))
    a1 = check_A1(phi, rng=rng)
    lines.append("A1: %s (beta=%s)"
                 % ("holds" if a1.holds else "fails",
                    "%.6g" % a1.beta if a1.beta is not None else "-"))
    a2 = check_A2pp(phi, beta=a0.beta if a0.holds else 1.0, rng=rng)
    lines.append("A2'': %s" % ("holds" if a2.holds else "fails"))
    conv, detail = check_growth_condition(phi, cfg.alpha)
    lines.append("growth condition (alpha=%g): %s"
                 % (cfg.alpha, "converges" if conv else "diverges"))
    ok = a0.holds and a1.holds and a2.holds and conv
    _emit_text(cfg, "\n".join(lines) + "\n")
    return 0 if ok else 1


def _experiment_from_config(cfg, name):
    extras = dict(cfg.experiment.get("extras", {}))
    return Experiment(
        name=cfg.experiment.get("name", name),
        phi_config=cfg.phi_doc or {},
        alpha=cfg.alpha,
        n=cfg.n if cfg.n is not None else int((cfg.phi_doc or {}).get("n", 2)),
        normalize=cfg.normalize,
        seed=cfg.seed,
        resolution=cfg.resolution,
        tolerances=dict(cfg.tolerances),
        out=cfg.out,
        extras=extras,
    )


def _run_one(cfg, name):
    if name == "oracle-suite":
        exp = _experiment_from_config(cfg, name)
        report = run_oracle_suite(exp, resolution=cfg.resolution)
    else:
        runner = EXPERIMENTS[name]
        report = runner(_experiment_from_config(cfg, name))
    status = "pass" if report.passed else "FAIL"
    const = "%.6g" % report.constant if report.constant is not None else "-"
    print("%s: %s (constant=%s, max_violation=%.3g, %.2fs)"
          % (report.name, status, const, report.max_violation,
             report.runtime_s), file=sys.stderr)
    if not cfg.out:
        sys.stdout.write(report.to_json() + "\n")
    return report


def _cmd_verify(cfg):
    name = cfg.exp
    if name is None:
        raise ConfigError("verify needs --exp (one of %s, oracle-suite, all)"
                          % ", ".join(EXPERIMENTS))
    if name == "all":
        names = list(EXPERIMENTS) + ["oracle-suite"]
    elif name in EXPERIMENTS or name == "oracle-suite":
        names = [name]
    else:
        raise ConfigError("unknown experiment %r; expected one of %s, "
                          "oracle-suite, all" % (name, ", ".join(EXPERIMENTS)))
    all_pass = True
    for nm in names:
        report = _run_one(cfg, nm)
        all_pass = all_pass and bool(report.passed)
    return 0 if all_pass else 1


def _cmd_oracle_suite(cfg):
    report = _run_one(cfg, "oracle-suite")
    return 0 if report.passed else 1


_COMMANDS = {
    "conjugate": _cmd_conjugate,
    "norm": _cmd_norm,
    "riesz": _cmd_riesz,
    "maximal": _cmd_maximal,
    "conditions": _cmd_conditions,
    "verify": _cmd_verify,
    "oracle-suite": _cmd_oracle_suite,
}


def dispatch(cfg):
    """Run the configured subcommand; returns the process exit status."""
    if cfg.threads is not None:
        try:
            import numba
            numba.set_num_threads(max(1, int(cfg.threads)))
        except (ImportError, ValueError):
            pass
    np.random.seed(cfg.seed % (2 ** 32))
    try:
        return _COMMANDS[cfg.command](cfg)
    except ConfigError:
        raise
    except MusielakError as exc:
        print("%s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return 1


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--phi", help="path to a function document (JSON/TOML)")
    common.add_argument("--config", help="path to a run config (JSON/TOML)")
    common.add_argument("--alpha", type=float, help="order of the transform")
    common.add_argument("--n", type=int, help="ambient dimension")
    common.add_argument("--normalize", choices=NORMALIZE_CHOICES,
                        help="normalization recipe applied before transforms")
    common.add_argument("--seed", type=int, help="seed for randomized sweeps")
    common.add_argument("--resolution", type=int,
                        help="grid/tabulation resolution knob")
    common.add_argument("--out", help="output file or directory")
    common.add_argument("--threads", type=int,
                        help="worker threads for accelerated kernels")
    common.add_argument("--tol-rel", dest="tol_rel", type=float,
                        help="relative comparison tolerance override")
    common.add_argument("--tol-norm", dest="tol_norm", type=float,
                        help="Luxemburg norm tolerance override")
    common.add_argument("--tol-rep", dest="tol_rep", type=float,
                        help="representation-formula tolerance override")
    p = argparse.ArgumentParser(
        prog="musielak",
        description="generalized Young function machinery: conjugates, "
                    "norms, potentials, and verification experiments")
    sub = p.add_subparsers(dest="command", required=True)
    pc = sub.add_parser("conjugate", parents=[common],
                        help="tabulate the Sobolev-conjugate transform")
    pc.add_argument("--x", help="evaluation point, comma-separated")
    pc.add_argument("--t-grid", dest="t_grid",
                    help="geometric t grid as lo:hi:count")
    for name in ("norm", "riesz", "maximal"):
        ps = sub.add_parser(name, parents=[common],
                            help="%s of a grid function" % name)
        ps.add_argument("--data", help="grid-function CSV")
    sub.add_parser("conditions", parents=[common],
                   help="structural condition checks")
    pv = sub.add_parser("verify", parents=[common],
                        help="run a named verification experiment")
    pv.add_argument("--exp", help="experiment name or 'all'")
    sub.add_parser("oracle-suite", parents=[common],
                   help="closed-form oracle comparison suite")
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code else 0
    try:
        cfg = merge(args)
        return dispatch(cfg)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
