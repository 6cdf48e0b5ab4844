"""Anomaly verdicts read off an extension."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .engine import Extension
from .grounder import GroundProgram
from .terms import Literal

ANOMALY = Literal("Anomaly")
DERIVED_ANOMALY = Literal("Derived_Anomaly")
BASIC_RULES = ("anomaly_basic", "anomaly_disruptive")


@dataclass(frozen=True)
class Diagnosis:
    kind: str  # basic | derived
    agent: str | None
    state: int | None
    rule_id: str
    support: tuple[Literal, ...]
    ground_id: str = ""

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "agent": self.agent,
            "state": self.state,
            "rule_id": self.rule_id,
            "support": [str(l) for l in self.support],
        }


def diagnose(program: GroundProgram, ext: Extension) -> list[Diagnosis]:
    """One diagnosis per anomaly rule instance whose body holds in ``ext``.

    Diagnoses are ordered by the step at which the instance became
    applicable, so the first one is the first anomaly the forward pass
    reaches.
    """
    found = []
    for rule in program.rules:
        if rule.head not in (ANOMALY, DERIVED_ANOMALY):
            continue
        if not all(b in ext.literals for b in rule.body):
            continue
        step = max((ext.provenance[b].step for b in rule.body if b in ext.provenance), default=-1)
        kind = "derived" if rule.head == DERIVED_ANOMALY else "basic"
        if rule.source in BASIC_RULES:
            kind = "basic"
        agent = rule.binding("X")
        state = rule.binding("t")
        found.append((step, rule.id, Diagnosis(
            kind,
            None if agent is None else str(agent),
            None if state is None else state.value,
            rule.source,
            rule.body,
            rule.id,
        )))
    found.sort(key=lambda item: (item[0], item[1]))
    return [d for _, _, d in found]


@dataclass
class RunResult:
    status: str  # ok | no_extension | inconsistent | error
    diagnoses: list[Diagnosis] = field(default_factory=list)
    summary: dict[str, int] = field(default_factory=dict)
    stats: dict = field(default_factory=dict)
    version: str = ""
    extension: Extension | None = None
    program: GroundProgram | None = None
    message: str = ""

    def to_json(self) -> dict:
        out = {
            "status": self.status,
            "diagnoses": [d.to_json() for d in self.diagnoses],
            "stats": {k: self.stats.get(k, 0) for k in ("ground_defaults", "applied", "backtracks")},
            "extension": self.summary,
            "version": self.version,
        }
        if self.message:
            out["message"] = self.message
        return out


def summarize(ext: Extension) -> dict[str, int]:
    """Literal counts per predicate, negative literals counted separately."""
    counts = Counter(l.pred if l.positive else "not " + l.pred for l in ext.literals)
    return dict(sorted(counts.items()))
