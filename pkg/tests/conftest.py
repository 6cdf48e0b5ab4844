import pytest

from normkit.rulebase import load_rulebase
from normkit.pipeline import load_scenario
from normkit.grounder import ground_theory

from helpers import SCENARIOS


@pytest.fixture(scope="session")
def rulebase():
    return load_rulebase()


@pytest.fixture(scope="session")
def scenario_theory(rulebase):
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = load_scenario(rulebase, SCENARIOS / f"{name}.nk")
        return cache[name]

    return get


@pytest.fixture(scope="session")
def scenario_program(scenario_theory):
    cache = {}

    def get(name):
        if name not in cache:
            cache[name] = ground_theory(scenario_theory(name))
        return cache[name]

    return get


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import VERDICTS

    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in VERDICTS:
            terminalreporter.write_line(line)
