import json
import subprocess
import sys

import pytest

from conftest import FIXTURES
from quartic_foliation.cli import main, run


def fx(name):
    return str(FIXTURES / name)


def test_validate_inline():
    status, rep = run(["validate", "X^4 + Y^4 - 1"])
    assert status == 0 and rep["verdict"] == "VALID" and rep["result"]["quartic"]["smooth"] and rep["inputs"][0]["path"] == "<inline>"


def test_parse_error_exits_1():
    status, rep = run(["validate", "X + 2Y"])
    assert status == 1 and rep["error"]["error"] == "ParseError"


def test_precision_floor():
    status, rep = run(["validate", "X^4 + Y^4 - 1", "--precision", "32"])
    assert status == 1 and rep["error"]["error"] == "ValueError"


def test_intersect_counts():
    status, rep = run(["intersect", "X^4 + Y^4 - 1", "X - Y"])
    assert status == 0
    assert sum(p["m"] for p in rep["result"]["records"]) == 4


@pytest.mark.parametrize(
    "name, command, status, verdict",
    [
        ("neeman-points.json", "divisor", 0, "NOT_PRINCIPAL"),
        ("neeman-2d.json", "divisor", 0, "PRINCIPAL"),
        ("pencil.json", "check-prereg", 0, "PREREGULAR"),
        ("neeman.json", "neeman-build", 0, "BUILT"),
    ],
)
def test_fixture_verdicts(name, command, status, verdict):
    got, rep = run([command, fx(name)])
    assert got == status and rep["verdict"] == verdict and rep["match"] is True


@pytest.mark.parametrize(
    "name, error",
    [
        ("fermat.json", "NonTransverseC"),
        ("adversarial-genericity.json", "GenericityFails"),
        ("adversarial-infinity.json", "NormalizationBreaksTransversality"),
    ],
)
def test_expected_failures_are_recorded(name, error):
    status, rep = run(["neeman-build", fx(name)])
    assert status == 1 and rep["error"]["error"] == error and rep["match"] is True


def test_expect_override_mismatch():
    status, rep = run(["divisor", fx("neeman-points.json"), "--expect", "PRINCIPAL"])
    assert status == 1 and rep["match"] is False


def test_reports_are_byte_identical(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert main(["divisor", fx("neeman-points.json"), "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["exit_status"] == 0


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "quartic_foliation.cli", "validate", "X^4 + Y^4 - 1"],
        capture_output=True,
        text=True,
        timeout=120,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "VALID"
