"""Structured result objects shared by the checking and verification routines.

Two report shapes cover everything the library emits:

* ``ConditionReport`` -- outcome of a structural check on a generalized
  Young function (calibration, comparability on balls, tail agreement,
  growth of the integrand near zero, ...).  Serializes with the fixed
  field names ``condition``, ``holds``, ``beta``, ``worst_sample``,
  ``counts`` so downstream tooling can diff runs.

* ``VerificationReport`` -- outcome of an empirical inequality sweep.
  Carries summaries of both sides, the fitted constant, the largest
  violation seen, and a pass flag tied to an explicit tolerance.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "ConditionReport",
    "VerificationReport",
    "Experiment",
    "summarize",
    "json_ready",
    "Stopwatch",
]


def json_ready(obj):
    """Recursively convert numpy scalars/arrays so ``json.dumps`` accepts them."""
    if isinstance(obj, dict):
        return {str(k): json_ready(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [json_ready(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [json_ready(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        if np.isnan(v):
            return "nan"
        if np.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def summarize(values):
    """Five-number summary of an array, ignoring non-finite entries.

    Returns a dict with ``min/max/mean/median/count`` plus the number of
    non-finite entries, so a report stays small no matter the sweep size.
    """
    arr = np.asarray(values, dtype=float).ravel()
    finite = arr[np.isfinite(arr)]
    out = {
        "count": int(arr.size),
        "nonfinite": int(arr.size - finite.size),
    }
    if finite.size:
        out.update(
            min=float(finite.min()),
            max=float(finite.max()),
            mean=float(finite.mean()),
            median=float(np.median(finite)),
        )
    else:
        out.update(min=None, max=None, mean=None, median=None)
    return out


class Stopwatch:
    """Tiny context manager used to stamp runtimes onto reports."""

    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.t0
        return False


@dataclass
class ConditionReport:
    """Outcome of a structural check.

    Attributes
    ----------
    condition : str
        Short identifier of the property checked (e.g. ``"unit-calibration"``).
    holds : bool
        Whether the property held over the sampled sweep.
    beta : float or None
        The comparability constant produced by the check, when one exists.
    worst_sample : dict
        The sample point realizing the worst margin (coordinates, scale,
        observed values) -- enough to reproduce the failure by hand.
    counts : dict
        Sizes of the sweep (points, scales, balls, ...).
    details : dict
        Free-form extras: secondary estimates, per-stage constants.
    """

    condition: str
    holds: bool
    beta: float | None
    worst_sample: dict = field(default_factory=dict)
    counts: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return json_ready(
            {
                "condition": self.condition,
                "holds": bool(self.holds),
                "beta": self.beta,
                "worst_sample": self.worst_sample,
                "counts": self.counts,
                "details": self.details,
            }
        )

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def __bool__(self):
        return bool(self.holds)


@dataclass
class VerificationReport:
    """Outcome of an empirical inequality sweep.

    ``passed`` is tied to ``tolerance``: the report passes only when
    ``max_violation <= tolerance`` (and any extra flags recorded by the
    producing routine are satisfied).
    """

    name: str
    samples: int
    lhs: dict = field(default_factory=dict)
    rhs: dict = field(default_factory=dict)
    constant: float | None = None
    max_violation: float = 0.0
    tolerance: float = 0.0
    passed: bool = False
    runtime_s: float = 0.0
    details: dict = field(default_factory=dict)

    def to_dict(self):
        return json_ready(
            {
                "name": self.name,
                "samples": int(self.samples),
                "lhs": self.lhs,
                "rhs": self.rhs,
                "constant": self.constant,
                "max_violation": self.max_violation,
                "tolerance": self.tolerance,
                "passed": bool(self.passed),
                "runtime_s": self.runtime_s,
                "details": self.details,
            }
        )

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent)

    def __bool__(self):
        return bool(self.passed)


@dataclass
class Experiment:
    """Bundle of inputs for one verification run (CLI and scripting front door).

    Only ``name`` is required; everything else has a usable default so tests
    can build minimal instances.
    """

    name: str
    phi_config: dict = field(default_factory=dict)
    alpha: float = 1.0
    n: int = 2
    normalize: str = "bar"
    seed: int = 0
    resolution: int = 256
    tolerances: dict = field(default_factory=dict)
    out: str | None = None
    extras: dict = field(default_factory=dict)

    def to_dict(self):
        return json_ready(
            {
                "name": self.name,
                "phi_config": self.phi_config,
                "alpha": self.alpha,
                "n": self.n,
                "normalize": self.normalize,
                "seed": self.seed,
                "resolution": self.resolution,
                "tolerances": self.tolerances,
                "out": self.out,
                "extras": self.extras,
            }
        )
