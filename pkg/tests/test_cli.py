import io
import json
import random

import pytest

from brstkit.algebra import GeneratorTable, random_element
from brstkit.cli import COMMANDS, FENCE, run
from brstkit.textform import parse_polynomial
from oracles import invariant_monomial_count

SO3 = {"phaseSpace": {"n": 3},
       "constraints": ["x2*p3 - x3*p2", "x3*p1 - x1*p3", "x1*p2 - x2*p1"],
       "run": {"maxOrder": 3}}
ABELIAN = {"phaseSpace": {"n": 4}, "constraints": ["p1"], "run": {"zDegreeBound": 3}}
WRONG_C = {"phaseSpace": {"n": 2}, "constraints": ["p1", "p2"],
           "structureFunctions": [[["0", "0"], ["1", "0"]], [["-1", "0"], ["0", "0"]]]}
REDUCIBLE = {"phaseSpace": {"n": 2}, "constraints": ["p1", "p2", "p1 + p2"],
             "reducibility": {"Z": [[["1", "1", "-1"], ["p2", "-p1", "0"]], [["p1", "0"]]],
                              "C": {"2": [[["1", "0", "0"], ["1", "0", "0"], ["-1", "0", "0"]]]}}}


def write(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data))
    return str(path)


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("command", [c for c in COMMANDS if c != "reducible"])
def test_commands_pass_on_so3(tmp_path, command):
    code, out, err = call(command, "--input", write(tmp_path, "so3.json", SO3))
    assert code == 0, out
    assert "result: PASS" in out and FENCE in out
    assert err.startswith("elapsed ")
    payload = json.loads(out.split(FENCE, 1)[1])
    assert payload["command"] == command and payload["passed"] and payload["exitCode"] == 0


def test_reducible_command(tmp_path):
    code, out, _ = call("reducible", "--input", write(tmp_path, "red.json", REDUCIBLE))
    assert code == 0
    payload = json.loads(out.split(FENCE, 1)[1])
    assert payload["results"]["delta"]["eta1_1"] == "p1*eta2_1"
    assert payload["results"]["levels"] == 2


def test_reducible_corrupted_fails(tmp_path):
    bad = json.loads(json.dumps(REDUCIBLE))
    bad["reducibility"]["Z"][1][0][0] = "x1"
    code, out, _ = call("reducible", "--input", write(tmp_path, "bad.json", bad))
    assert code == 1 and "result: FAIL" in out


def test_abelian_cohomology_dims(tmp_path):
    path = write(tmp_path, "ab.json", ABELIAN)
    code, out, _ = call("cohomology", "--input", path, "--json-only")
    assert code == 0
    coh = json.loads(out)["results"]["cohomology"]
    assert coh["0"]["dimension"] == invariant_monomial_count(4, 1, 3) and coh["0"]["stable"]


def test_check_failure_exits_1(tmp_path):
    code, out, _ = call("verify", "--input", write(tmp_path, "c.json", WRONG_C))
    assert code == 1 and "[FAIL] constraints are first class" in out


@pytest.mark.parametrize("text", [
    "{not json",
    json.dumps({"phaseSpace": {"n": 1}}),
    json.dumps({"phaseSpace": {"n": 1}, "constraints": ["p1 +"]}),
    json.dumps({"phaseSpace": {"n": 1}, "constraints": ["q7"]}),
    json.dumps({"phaseSpace": {"n": 1}, "constraints": ["p1"], "run": {"maxOrder": -1}}),
])
def test_input_errors_exit_2(tmp_path, text):
    code, out, _ = call("verify", "--input", write(tmp_path, "bad.json", text))
    assert code == 2 and "result: FAIL" in out


def test_missing_file_and_bad_arguments_exit_2(tmp_path):
    assert call("verify", "--input", str(tmp_path / "missing.json"))[0] == 2
    assert run(["nonsense", "--input", "x"], io.StringIO(), io.StringIO()) == 2


def test_bound_exceeded_exits_3(tmp_path):
    path = write(tmp_path, "so3.json", SO3)
    code, out, _ = call("charge", "--input", path, "--max-order", "0")
    assert code == 3 and "[FAIL] solver bound" in out
    second = write(tmp_path, "second.json", {"phaseSpace": {"n": 1}, "constraints": ["p1", "x1"]})
    assert call("verify", "--input", second)[0] == 3


def test_report_bytes_deterministic(tmp_path):
    path = write(tmp_path, "so3.json", SO3)
    for command in ("expand", "mc"):
        a = call(command, "--input", path, "--seed", "7")[1]
        b = call(command, "--input", path, "--seed", "7")[1]
        assert a == b


def test_json_only_is_pure_json(tmp_path):
    code, out, _ = call("charge", "--input", write(tmp_path, "so3.json", SO3), "--json-only")
    payload = json.loads(out)
    assert payload["exitCode"] == code == 0


def test_printed_elements_reparse(tmp_path):
    code, out, _ = call("charge", "--input", write(tmp_path, "so3.json", SO3), "--json-only")
    table = GeneratorTable.standard(3, 3)
    for v in json.loads(out)["results"].get("terms", []):
        assert str(parse_polynomial(v, table)) == v


def test_parse_print_parse_identity():
    table = GeneratorTable.standard(2, 2)
    rng = random.Random(0)
    for _ in range(100):
        e = random_element(table, rng)
        again = parse_polynomial(str(e), table)
        assert again == e and str(again) == str(e)
