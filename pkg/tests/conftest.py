import json
from pathlib import Path

import pytest
from gmpy2 import mpc, mpfr

from quartic_foliation.algebra.numbers import working_precision
from quartic_foliation.algebra.poly import BiPoly
from quartic_foliation.fixtures import scenario_from_dict

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
ORACLES = json.loads((Path(__file__).parent / "data" / "oracles.json").read_text())


def load_fixture(name: str) -> dict:
    return json.loads((FIXTURES / name).read_text())


def oracle_point(pair) -> tuple:
    return tuple(mpc(mpfr(re), mpfr(im)) for re, im in pair)


@pytest.fixture(autouse=True)
def _precision():
    with working_precision(256):
        yield


@pytest.fixture(scope="session")
def fixture_quartic() -> BiPoly:
    return BiPoly.parse(load_fixture("neeman.json")["quartic"])


@pytest.fixture(scope="session")
def pencil_pair() -> tuple:
    obj = load_fixture("pencil.json")
    return BiPoly.parse(obj["quartic"]), BiPoly.parse(obj["second"])


@pytest.fixture(scope="session")
def scenario():
    with working_precision(256):
        return scenario_from_dict(load_fixture("neeman.json"))


@pytest.fixture(scope="session")
def theorem_report(scenario):
    from quartic_foliation.preregularity import refute_theorem

    return refute_theorem(scenario)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(mod.RESULTS, key=str):
        passed, detail = mod.RESULTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if passed else 'FAIL'}: {detail}")
