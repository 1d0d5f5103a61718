"""Generalized Young function machinery on Euclidean domains.

Core objects: spatially varying Young functions and their conjugates
(:mod:`.gyf`), normalization recipes (:mod:`.normalize`), the
Sobolev-conjugate transform (:mod:`.sobolev`), Luxemburg norms, Riesz
potentials and maximal functions on desk-scale grids (:mod:`.analysis`),
structural condition checks (:mod:`.conditions`), and end-to-end
verification experiments with closed-form oracles (:mod:`.experiments`).
"""

from .analysis import (check_holder, luxemburg_norm, maximal_function,
                       modular, riesz_potential)
from .conditions import (check_A0, check_A1, check_A2pp,
                         check_growth_condition, check_grows_more_slowly,
                         check_normalized, unit_ball_volume)
from .errors import (ConfigError, FieldDomainError, GrowthConditionError,
                     KernelError, MusielakError, NoFiniteNormError,
                     NormalizationError)
from .fields import SpatialField
from .grids import Domain, GridFunction
from .gyf import (GYF, ConjugateGYF, DoublePhaseGYF, OrliczGYF, PowerGYF,
                  VariableExponentGYF, estimate_equivalence, gyf_from_config)
from .normalize import DerivedGYF, derive, make_bar, make_hat
from .reports import ConditionReport, Experiment, VerificationReport
from .sobolev import (SobolevConjugate, oracle_constant_power,
                      oracle_double_phase, oracle_variable_exponent,
                      sobolev_conjugate_domain)

__version__ = "0.1.0"

__all__ = [
    "GYF", "ConjugateGYF", "PowerGYF", "OrliczGYF", "VariableExponentGYF",
    "DoublePhaseGYF", "gyf_from_config", "estimate_equivalence",
    "SpatialField", "Domain", "GridFunction",
    "DerivedGYF", "derive", "make_bar", "make_hat",
    "SobolevConjugate", "sobolev_conjugate_domain",
    "oracle_constant_power", "oracle_variable_exponent",
    "oracle_double_phase",
    "modular", "luxemburg_norm", "check_holder", "riesz_potential",
    "maximal_function",
    "check_A0", "check_A1", "check_A2pp", "check_normalized",
    "check_growth_condition", "check_grows_more_slowly", "unit_ball_volume",
    "ConditionReport", "VerificationReport", "Experiment",
    "MusielakError", "ConfigError", "FieldDomainError", "NormalizationError",
    "GrowthConditionError", "KernelError", "NoFiniteNormError",
]
