"""Load, validate, ground and solve one scenario."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .diagnosis import ANOMALY, RunResult, diagnose, summarize
from .dsl import read_source, load_source
from .engine import compute_extension
from .errors import NormkitError
from .grounder import GroundProgram, ground_theory
from .oracle import enumerate_extensions
from .rulebase import validate_stratification, validate_uniqueness
from .theory import Theory

__version__ = "1.0.0"


class ValidationError(NormkitError):
    def __init__(self, messages):
        self.messages = list(messages)
        super().__init__("; ".join(self.messages))


class OracleMismatch(NormkitError):
    pass


@dataclass
class Options:
    first_anomaly: bool = False
    max_ground: int | None = None
    allow_scenario_rules: bool = False
    oracle: bool = False
    oracle_cap: int = 20


def load_scenario(rulebase: Theory, path: str | Path, allow_scenario_rules: bool = False) -> Theory:
    theory = load_source(read_source(path, "scenario"), rulebase,
                         allow_scenario_rules=allow_scenario_rules)
    problems = validate_uniqueness(theory).violations + validate_stratification(theory).violations
    if problems:
        raise ValidationError(problems)
    return theory


def solve(theory: Theory, options: Options | None = None) -> RunResult:
    """Ground and solve a validated theory.

    Exceptions from the grounder and the engine propagate; callers map
    them onto statuses and exit codes.
    """
    options = options or Options()
    program: GroundProgram = ground_theory(theory, options.max_ground)
    ext = compute_extension(program, stop_when=ANOMALY if options.first_anomaly else None)
    if options.oracle:
        extensions = enumerate_extensions(program, options.oracle_cap)
        if extensions and ext.complete and ext.literals not in extensions:
            raise OracleMismatch("the computed extension is not among the enumerated extensions")
        stats_extra = {"extensions": len(extensions)}
    else:
        stats_extra = {}
    return RunResult(
        "ok", diagnose(program, ext), summarize(ext), {**ext.stats, **stats_extra},
        __version__, ext, program,
    )


def run_scenario(rulebase: Theory, path: str | Path, options: Options | None = None) -> RunResult:
    options = options or Options()
    return solve(load_scenario(rulebase, path, options.allow_scenario_rules), options)
