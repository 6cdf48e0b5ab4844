"""Inertia of persistent fluents across states, forwards and backwards."""

from hypothesis import given, settings, strategies as st

from normkit.diagnosis import diagnose
from normkit.dsl import SourceFile, load_source
from normkit.engine import BLOCKED, compute_extension
from normkit.grounder import ground_theory
from normkit.terms import Atom, Const, Literal, State

A, B = Const("A", "agent"), Const("B", "agent")


def holds(name, agent, t, positive=True):
    return Literal("Holds", (Atom(name), agent, State(t)), positive)


def solve(rulebase, body, horizon=2):
    text = f"nk 1;\nkind scenario;\nconst A, B : agent;\nhorizon {horizon};\n{body}"
    program = ground_theory(load_source(SourceFile("micro.nk", text, "scenario"), rulebase))
    return program, compute_extension(program)


def test_forward_persistence(rulebase):
    _, ext = solve(rulebase, "fact not holds(stop, A) @ 0;\n")
    assert holds("Stop", A, 1, False) in ext.literals
    assert ext.provenance[holds("Stop", A, 1, False)].source == "persistence_fwd[P=Neg(Stop),X=A,t=0]"


def test_contrary_fact_blocks_persistence(rulebase):
    _, ext = solve(rulebase, "fact holds(stop, A) @ 1;\n")
    assert holds("Stop", A, 0, False) in ext.literals
    assert holds("Stop", A, 1, False) not in ext.literals
    assert ext.status["persistence_fwd[P=Neg(Stop),X=A,t=0]"] == BLOCKED


def test_persistence_over_many_states(rulebase):
    _, ext = solve(rulebase, "", horizon=5)
    for t in range(6):
        assert holds("Stop", A, t, False) in ext.literals
        assert holds("Control", B, t) in ext.literals


def test_lost_control_is_not_restored(rulebase):
    _, ext = solve(rulebase, "fact not holds(control, A) @ 1;\n")
    assert holds("Control", A, 0) in ext.literals
    assert holds("Control", A, 2) not in ext.literals
    # Neg(Control) is not declared persistent either.
    assert holds("Control", A, 2, False) not in ext.literals


def test_non_persistent_fluent_does_not_persist(rulebase):
    _, ext = solve(rulebase, "fact holds(drive_fairly_slow, A) @ 0;\n")
    assert holds("Drive_Fairly_Slow", A, 1) not in ext.literals
    assert holds("Drive_Fairly_Slow", A, 1, False) not in ext.literals


def test_backward_persistence(rulebase):
    _, ext = solve(rulebase, "fact holds(is_overtaking, B) @ 2;\n")
    assert holds("Is_Overtaking", B, 1) in ext.literals
    assert holds("Is_Overtaking", B, 0) in ext.literals
    assert holds("Is_Overtaking", A, 0) not in ext.literals


def test_backward_persistence_blocked(rulebase):
    _, ext = solve(rulebase, "fact holds(is_overtaking, B) @ 2;\nfact not holds(is_overtaking, B) @ 1;\n")
    assert holds("Is_Overtaking", B, 1) not in ext.literals
    assert holds("Is_Overtaking", B, 0) not in ext.literals


def test_horizon_edge(rulebase):
    program, ext = solve(rulebase, "", horizon=1)
    assert holds("Stop", A, 1, False) in ext.literals
    states = {a.value for l in ext.literals for a in l.args if isinstance(a, State)}
    assert states == {0, 1}
    assert not any("t=1]" in d.id for d in program.defaults if d.source == "persistence_fwd")


def test_crash_report_has_no_spurious_derived_anomaly(scenario_program):
    program = scenario_program("crash_report")
    ext = compute_extension(program)
    found = diagnose(program, ext)
    assert len(found) == 2
    assert ("derived", "B", 0) not in {(d.kind, d.agent, d.state) for d in found}
    assert {(d.kind, d.agent, d.state) for d in found} == {("basic", "B", 0), ("derived", "B", 1)}


def test_crash_report_keeps_b_moving(scenario_program):
    ext = compute_extension(scenario_program("crash_report"))
    assert holds("Stop", B, 0, False) in ext.literals
    assert holds("Stop", B, 1, False) in ext.literals
    assert holds("Is_Overtaking", B, 0) in ext.literals


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 4).flatmap(lambda h: st.tuples(st.just(h), st.integers(0, h))))
def test_not_stopped_until_the_stop(rulebase, case):
    horizon, k = case
    _, ext = solve(rulebase, f"fact holds(stop, A) @ {k};\n", horizon)
    for t in range(horizon + 1):
        assert (holds("Stop", A, t, False) in ext.literals) == (t < k)
        assert (holds("Stop", A, t) in ext.literals) == (t == k)
