"""Default-logic reasoning about norms and anomalies in crash scenarios."""

from .diagnosis import Diagnosis, RunResult, diagnose
from .engine import (
    Extension, InconsistencyReport, check_extension, compute_extension, derive_provenance,
    strict_closure,
)
from .errors import (
    CompletionError, DslError, GroundingError, InconsistentFacts, NoExtension, NormkitError,
    NotFound, ResourceLimitError, SortError,
)
from .grounder import GroundDefault, GroundProgram, GroundRule, ground_theory
from .oracle import enumerate_extensions
from .pipeline import Options, __version__, load_scenario, run_scenario, solve
from .rulebase import load_rulebase, validate_stratification, validate_uniqueness
from .terms import Atom, Combine, Const, Literal, Neg, State, Var, complement, match, normalize
from .theory import DefaultRule, StrictRule, Theory

__all__ = [
    "Atom", "Combine", "CompletionError", "Const", "DefaultRule", "Diagnosis", "DslError",
    "Extension", "GroundDefault", "GroundProgram", "GroundRule", "GroundingError",
    "InconsistencyReport", "InconsistentFacts", "Literal", "Neg", "NoExtension", "NormkitError",
    "NotFound", "Options", "ResourceLimitError", "RunResult", "SortError", "State", "StrictRule",
    "Theory", "Var", "__version__", "check_extension", "complement", "compute_extension",
    "derive_provenance", "diagnose", "enumerate_extensions", "ground_theory", "load_rulebase",
    "load_scenario", "match", "normalize", "run_scenario", "solve", "strict_closure",
    "validate_stratification", "validate_uniqueness",
]
