"""Acceptance gate: one PASS/FAIL line per criterion.

Run ``pytest tests/test_acceptance.py -v``; the verdicts are repeated in
the terminal summary.
"""

import json
import random
import time

import pytest

from normkit.cli import main
from normkit.diagnosis import ANOMALY, diagnose
from normkit.dsl import SourceFile, load_source, parse, print_document
from normkit.engine import BLOCKED, check_extension, compute_extension
from normkit.errors import DslError, InconsistentFacts, NoExtension
from normkit.grounder import ground_theory
from normkit.oracle import enumerate_extensions
from normkit.pipeline import load_scenario
from normkit.rulebase import bundled_manifest, validate_stratification, validate_uniqueness
from normkit.theory import Theory

from helpers import SCENARIOS, random_program
from test_dsl import mutate

VERDICTS: list[str] = []

GOLDEN = [
    "Must(On_Normal_Lane, A, 0)",
    "Holds(On_Normal_Lane, A, 1)",
    "Must(Stop, A, 1)",
    "Must(Stop, B, 1)",
    "¬Available(Brake, Stop, B, 1)",
    "¬Able_To(Stop, B, 1)",
    "Derived_Anomaly",
    "Must(Drive_Fairly_Slow, B, 0)",
    "Available(Brake, Drive_Fairly_Slow, B, 0)",
    "Able_To(Drive_Fairly_Slow, B, 0)",
    "Anomaly",
]


def verdict(number: int, title: str, failures: list[str]) -> None:
    line = f"criterion {number} ({title}): " + ("PASS" if not failures else "FAIL: " + "; ".join(failures[:5]))
    VERDICTS.append(line)
    print(line)
    assert not failures, line


def run_json(capsys, *argv):
    code = main(["run", *argv, "--json"])
    return code, json.loads(capsys.readouterr().out)


def test_criterion_1_golden_trace(rulebase):
    failures = []
    start = time.perf_counter()
    theory = load_scenario(rulebase, SCENARIOS / "crash_report.nk")
    ext = compute_extension(ground_theory(theory))
    elapsed = time.perf_counter() - start
    present = {str(l) for l in ext.literals}
    failures += [f"missing {g}" for g in GOLDEN if g not in present]
    status = ext.status.get("normal_lane[X=B,t=1]")
    if status != BLOCKED:
        failures.append(f"normal_lane[X=B,t=1] is {status}")
    if elapsed >= 1.0:
        failures.append(f"took {elapsed:.2f}s")
    verdict(1, "golden trace", failures)


def test_criterion_2_diagnosis_classification(capsys):
    failures = []
    path = str(SCENARIOS / "crash_report.nk")
    code, full = run_json(capsys, path)
    got = sorted((d["kind"], d["agent"], d["state"]) for d in full["diagnoses"])
    if code != 0 or got != [("basic", "B", 0), ("derived", "B", 1)]:
        failures.append(f"full run gave exit {code} with {got}")
    code, first = run_json(capsys, path, "--first-anomaly")
    order = [(d["kind"], d["agent"], d["state"]) for d in first["diagnoses"]]
    if code != 0 or not order or order[0] != ("derived", "B", 1):
        failures.append(f"first-anomaly order {order}")
    verdict(2, "diagnosis classification", failures)


def test_criterion_3_oracle_equivalence():
    failures = []
    start = time.perf_counter()
    checked = with_extension = 0
    for seed in range(300):
        rng = random.Random(seed)
        program = random_program(rng, semi_normal=0.3)
        normal_only = all(d.is_normal for d in program.defaults)
        try:
            expected = enumerate_extensions(program)
        except InconsistentFacts:
            continue
        checked += 1
        try:
            ext = compute_extension(program)
        except NoExtension:
            if normal_only:
                failures.append(f"seed {seed}: NoExtension on a normal theory")
            if expected:
                failures.append(f"seed {seed}: NoExtension but the oracle found {len(expected)}")
            continue
        with_extension += 1
        ok, report = check_extension(ext.literals, program)
        if not ok:
            failures.append(f"seed {seed}: check_extension rejected: {report}")
        if ext.literals not in expected:
            failures.append(f"seed {seed}: not among enumerated extensions")
    for seed in range(100):
        program = random_program(random.Random(10_000 + seed), semi_normal=0.0)
        try:
            compute_extension(program)
        except InconsistentFacts:
            continue
        except NoExtension:
            failures.append(f"normal seed {seed}: NoExtension")
    elapsed = time.perf_counter() - start
    if checked < 200:
        failures.append(f"only {checked} programs checked")
    if elapsed >= 60:
        failures.append(f"took {elapsed:.1f}s")
    verdict(3, f"oracle equivalence over {checked} programs, {with_extension} with an extension", failures)


MICRO = [
    # (facts, horizon, literals that must hold, literals that must not)
    ("fact not holds(stop, A) @ 0;", 2, ["¬Holds(Stop, A, 1)", "¬Holds(Stop, A, 2)"], []),
    ("fact holds(stop, A) @ 1;", 2, ["¬Holds(Stop, A, 0)", "Holds(Stop, A, 1)"], ["¬Holds(Stop, A, 1)"]),
    ("", 4, ["Holds(Control, A, 4)", "¬Holds(Stop, A, 4)"], []),
    ("fact not holds(control, A) @ 1;", 2, [], ["Holds(Control, A, 2)", "¬Holds(Control, A, 2)"]),
    ("fact holds(drive_fairly_slow, A) @ 0;", 2, [], ["Holds(Drive_Fairly_Slow, A, 1)"]),
    ("fact holds(is_overtaking, A) @ 2;", 2, ["Holds(Is_Overtaking, A, 1)", "Holds(Is_Overtaking, A, 0)"], []),
    ("fact holds(is_overtaking, A) @ 2;\nfact not holds(is_overtaking, A) @ 1;", 2, [],
     ["Holds(Is_Overtaking, A, 0)"]),
    ("", 1, ["¬Holds(Stop, A, 1)"], ["¬Holds(Stop, A, 2)"]),
]


def test_criterion_4_persistence(rulebase):
    failures = []
    for i, (facts, horizon, yes, no) in enumerate(MICRO):
        text = f"nk 1;\nkind scenario;\nconst A : agent;\nhorizon {horizon};\n{facts}\n"
        ext = compute_extension(ground_theory(load_source(SourceFile(f"micro{i}.nk", text, "scenario"), rulebase)))
        got = {str(l) for l in ext.literals}
        failures += [f"micro {i}: missing {l}" for l in yes if l not in got]
        failures += [f"micro {i}: unexpected {l}" for l in no if l in got]
    theory = load_scenario(rulebase, SCENARIOS / "crash_report.nk")
    program = ground_theory(theory)
    ext = compute_extension(program)
    if "Holds(Is_Overtaking, B, 0)" not in {str(l) for l in ext.literals}:
        failures.append("Is_Overtaking not carried back to state 0")
    found = [(d.kind, d.agent, d.state) for d in diagnose(program, ext)]
    if sorted(found) != [("basic", "B", 0), ("derived", "B", 1)]:
        failures.append(f"crash report diagnoses {found}")
    verdict(4, f"persistence suite ({len(MICRO) + 2} scenarios)", failures)


@pytest.mark.parametrize("name", ["icy_patch", "tech_problem"])
def test_criterion_5_disruptive_factors(rulebase, name):
    failures = []
    program = ground_theory(load_scenario(rulebase, SCENARIOS / f"{name}.nk"))
    found = diagnose(program, compute_extension(program))
    if [(d.kind, d.agent, d.rule_id) for d in found] != [("basic", "A", "anomaly_disruptive")]:
        failures.append(f"diagnoses {[(d.kind, d.agent, d.rule_id) for d in found]}")
    extensions = enumerate_extensions(program, cap=60)
    if not extensions:
        failures.append("no extension enumerated")
    if not all(ANOMALY in e for e in extensions):
        failures.append("an enumerated extension lacks Anomaly")
    verdict(5, f"disruptive factor, {name}, {len(extensions)} extension(s)", failures)


def _bases():
    """Each bundled file paired with the fragment it is compiled against."""
    out = []
    base = Theory()
    for path in bundled_manifest().paths:
        out.append((path, base))
        base = load_source(SourceFile(str(path), path.read_text(), "rulebase"), base)
    out += [(p, base) for p in sorted(SCENARIOS.glob("*.nk"))]
    return out


def test_criterion_6_dsl_robustness():
    failures = []
    bases = _bases()
    for path, _ in bases:
        doc, diags = parse(SourceFile(str(path), path.read_text()))
        printed = print_document(doc)
        again, diags2 = parse(printed)
        if diags or diags2 or again != doc or print_document(again) != printed:
            failures.append(f"round trip failed for {path.name}")
    rng = random.Random(2024)
    for n in range(10_000):
        path, base = bases[rng.randrange(len(bases))]
        text = mutate(path.read_text(), rng)
        lines = text.split("\n")
        try:
            _, diags = parse(text)
            for d in diags:
                if not (1 <= d.line <= len(lines) and 1 <= d.column <= max(1, len(lines[d.line - 1]))):
                    failures.append(f"mutant {n}: diagnostic outside the text: {d}")
            kind = "scenario" if path.parent == SCENARIOS else "rulebase"
            load_source(SourceFile("mutant.nk", text, kind), base)
        except DslError as e:
            if not e.diagnostics or any(d.line < 1 or d.column < 1 for d in e.diagnostics):
                failures.append(f"mutant {n}: unpositioned error")
        except Exception as e:  # noqa: BLE001 - any other exception is a crash
            failures.append(f"mutant {n}: {type(e).__name__}: {e}")
    verdict(6, "DSL round trip and 10,000 mutants", failures)


def test_criterion_7_validators(rulebase):
    failures = []
    if not validate_uniqueness(rulebase).ok or not validate_stratification(rulebase).ok:
        failures.append("bundled rulebase does not validate")
    dup = load_source(SourceFile("dup.nk", "nk 1;\nconst Pull_Handbrake : name;\nfact action(pull_handbrake);\n"
                                 "fact pcb(stop, pull_handbrake);\n", "rulebase"), rulebase)
    if validate_uniqueness(dup).ok:
        failures.append("duplicate producer not detected")
    inverted = load_source(SourceFile("inv.nk", "nk 1;\nconst Q : agent;\n"
                                      "rule inward_out: holds(stop, Q) @ 0 -> vehicle(Q);\n", "rulebase"), rulebase)
    if validate_stratification(inverted).ok:
        failures.append("inverted-layer rule not detected")
    verdict(7, "validators", failures)
