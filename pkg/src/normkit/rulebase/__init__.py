"""The bundled driving-domain rulebase and its structural validators."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable

from ..dsl import SourceFile, load_source
from ..errors import NormkitError
from ..grounder import EXPANDERS, completion_facts, uniqueness_violations
from ..theory import Theory

MANIFEST_VERSION = 1


class ConfigurationError(NormkitError):
    """A predicate used by a rule carries no layer index."""


@dataclass(frozen=True)
class RulebaseManifest:
    files: tuple[str, ...]
    version: str
    format_version: int = MANIFEST_VERSION
    root: Path | None = None

    @property
    def paths(self) -> list[Path]:
        root = self.root or Path(".")
        return [root / f for f in self.files]

    @classmethod
    def read(cls, path: str | Path) -> "RulebaseManifest":
        path = Path(path)
        data = json.loads(path.read_text(encoding="utf-8"))
        if data.get("format_version") != MANIFEST_VERSION:
            raise NormkitError(f"{path}: unsupported manifest format {data.get('format_version')!r}")
        return cls(tuple(data["files"]), str(data.get("version", "")), MANIFEST_VERSION, path.parent)


def bundled_manifest() -> RulebaseManifest:
    root = resources.files(__name__) / "v1"
    return RulebaseManifest.read(Path(str(root)) / "manifest.json")


def load_rulebase(paths: Iterable[str | Path] | None = None) -> Theory:
    """Load rulebase files in order and merge them into one fragment.

    With ``paths=None`` the bundled files listed in the manifest are used;
    a path ending in ``.json`` is read as a manifest.
    """
    if paths is None:
        files = bundled_manifest().paths
    else:
        files = []
        for p in paths:
            p = Path(p)
            files.extend(RulebaseManifest.read(p).paths if p.suffix == ".json" else [p])
    theory = Theory()
    for f in files:
        source = SourceFile(str(f), Path(f).read_text(encoding="utf-8"), "rulebase")
        theory = load_source(source, theory)
    return theory


def layer_counts(theory: Theory) -> dict[int, int]:
    """Number of rules and defaults per layer of their head predicate."""
    counts: Counter = Counter()
    for r in theory.rules:
        for h in r.head[:1]:
            counts[theory.predicates[h.pred].layer] += 1
    for d in theory.defaults:
        counts[theory.predicates[d.consequent.pred].layer] += 1
    return dict(sorted(counts.items(), key=lambda kv: (kv[0] is None, kv[0] or 0)))


@dataclass
class Report:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "ok" if self.ok else "\n".join(self.violations)


def validate_uniqueness(theory: Theory) -> Report:
    """At most one action produces each effect (keep-state actions excepted)."""
    bad = uniqueness_violations(theory, completion_facts(theory))
    report = Report()
    for effect, acts in sorted(bad.items(), key=lambda kv: str(kv[0])):
        report.violations.append(
            f"effect {effect} has {len(acts)} producing actions: " + ", ".join(str(a) for a in acts)
        )
    return report


def validate_stratification(theory: Theory) -> Report:
    """Every rule concludes at a layer no more external than its premises."""
    report = Report()

    def layer(pred: str, rid: str) -> int:
        decl = theory.predicates.get(pred)
        if decl is None or decl.layer is None:
            raise ConfigurationError(f"predicate {pred} used by {rid} has no layer")
        return decl.layer

    items = [(r.id, r.head, r.body) for r in theory.rules if r.head]
    for d in theory.defaults:
        premises = d.prerequisite + d.justifications
        items.append((d.id, (d.consequent,), premises))
    for rid, heads, body in items:
        if not body:
            continue
        low = min(layer(b.pred, rid) for b in body)
        for h in heads:
            hl = layer(h.pred, rid)
            if hl > low:
                report.violations.append(
                    f"{rid}: head {h.pred} is in layer {hl}, above body layer {low}"
                )
    return report


__all__ = [
    "ConfigurationError", "EXPANDERS", "Report", "RulebaseManifest", "bundled_manifest",
    "layer_counts", "load_rulebase", "validate_stratification", "validate_uniqueness",
]
