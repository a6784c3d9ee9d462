"""
Integration tests for the command-line entry point
"""

import json

import pytest
from pydantic import ValidationError

from run_hochschild import EXIT_FAILED, EXIT_OK, EXIT_USAGE, CommandSpec, HochschildRunner, build_parser, main


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out) if out else None


class TestCommandSpec:
    """Argument validation"""

    def test_requires_m(self):
        with pytest.raises(ValidationError):
            CommandSpec(command="hh")

    def test_requires_expressions(self):
        with pytest.raises(ValidationError):
            CommandSpec(command="cup", m=3, x="1")

    @pytest.mark.parametrize("field,value", [("ring", "R7"), ("target", "X"), ("suite", "everything")])
    def test_rejects_unknown_values(self, field, value):
        with pytest.raises(ValidationError):
            CommandSpec(command="verify", **{field: value})

    def test_params(self):
        spec = CommandSpec(command="hh", m=3, ring="Fp:5")
        assert spec.params() == {"m": 3, "target": "N", "ring": "Fp:5", "max_n": 6, "model": "koszul"}
        assert spec.coeff_ring.characteristic == 5

    def test_runner_records_timing(self):
        runner = HochschildRunner()
        output, code = runner.run(CommandSpec(command="tangent", m=3))
        assert code == EXIT_OK
        assert json.loads(output)["result"]["tangent_dimension"] == 5
        assert "tangent_time" in runner.execution_metrics


class TestCommands:
    """End-to-end invocations"""

    def test_phi(self, capsys):
        code, payload = run_json(capsys, ["phi", "--m", "3", "--max-n", "6"])
        assert code == EXIT_OK
        assert payload["command"] == "phi"
        assert payload["params"] == {"m": 3, "max_n": 6, "method": "recursion"}
        assert payload["result"] == [1, 2, 3, 4, 5, 6, 7]
        assert "timestamp" in payload

    def test_hh(self, capsys):
        code, payload = run_json(capsys, ["hh", "--m", "3", "--target", "N", "--ring", "Q", "--max-n", "4"])
        assert code == EXIT_OK
        assert payload["result"]["ranks"] == [2, 2, 3, 5, 7]

    def test_hh_bar_model_torsion(self, capsys):
        code, payload = run_json(capsys, ["hh", "--m", "2", "--ring", "Z", "--max-n", "3", "--model", "bar"])
        assert code == EXIT_OK
        groups = payload["result"]["groups"]
        assert groups[2] == {"n": 2, "free_rank": 1, "torsion": [2]}

    def test_e2(self, capsys):
        code, payload = run_json(capsys, ["e2", "--m", "3", "--target", "N", "--ring", "Z", "--max-n", "3"])
        assert code == EXIT_OK
        assert payload["result"]["d1_agreement"] is True
        assert payload["result"]["ring"] == "Z"

    def test_cup_vanishes(self, capsys):
        code, payload = run_json(capsys, ["cup", "--m", "3", "--x", "a(1,[1,1])", "--y", "a(1,[2,1])"])
        assert code == EXIT_OK
        assert payload["result"]["value"] == "0"
        assert payload["result"]["certificate"]["found"] is True

    def test_cup_degree_one_certificate(self, capsys):
        code, payload = run_json(capsys, ["cup", "--m", "3", "--x", "a(1,[])", "--y", "a(2,[])", "--ring", "Q"])
        assert code == EXIT_OK
        certificate = payload["result"]["certificate"]
        assert certificate["found"] is True
        assert certificate["degrees"] == [2]
        assert certificate["primitive_terms"] > 0

    def test_bracket_witness(self, capsys):
        code, payload = run_json(capsys, ["bracket", "--m", "3", "--x", "a(1,[1,1])", "--y", "a(1,[2,1])"])
        assert code == EXIT_OK
        assert payload["result"]["method"] == "cochain"
        assert payload["result"]["value"] == "a(1,[2,1,1,1])"

    def test_tangent(self, capsys):
        code, payload = run_json(capsys, ["tangent", "--m", "3"])
        assert code == EXIT_OK
        assert payload["result"] == {"m": 3, "tangent_dimension": 5, "formula": 5}

    def test_verify(self, capsys):
        code, payload = run_json(capsys, ["verify", "--suite", "tangent", "--m", "3", "--workers", "1"])
        assert code == EXIT_OK
        assert payload["result"]["pass"] is True
        assert {r["suite"] for r in payload["result"]["records"]} == {"tangent"}

    def test_n2(self, capsys):
        code, payload = run_json(capsys, ["n2", "--ring", "Fp:2", "--max-n", "3"])
        assert code == EXIT_OK
        assert payload["result"]["passed"] is True


class TestFormats:
    """CSV and LaTeX renderings"""

    def test_csv(self, capsys):
        assert main(["--format", "csv", "phi", "--m", "3", "--max-n", "2"]) == EXIT_OK
        assert capsys.readouterr().out == "index,value\n0,1\n1,2\n2,3\n"

    def test_latex(self, capsys):
        assert main(["--format", "latex", "tangent", "--m", "4"]) == EXIT_OK
        out = capsys.readouterr().out
        assert r"tangent\_dimension" in out
        assert r"\end{tabular}" in out


class TestErrors:
    """Exit codes for bad input"""

    def test_bad_ring(self, capsys):
        assert main(["hh", "--m", "3", "--ring", "R7"]) == EXIT_USAGE
        assert capsys.readouterr().out == ""

    def test_missing_m(self):
        assert main(["phi"]) == EXIT_USAGE

    def test_bad_expression(self):
        assert main(["cup", "--m", "3", "--x", "a(1,", "--y", "1"]) == EXIT_USAGE

    def test_wrong_grammar(self):
        assert main(["bracket", "--m", "3", "--x", "f(1)", "--y", "1"]) == EXIT_USAGE

    def test_tangent_needs_m3(self):
        assert main(["tangent", "--m", "2"]) == EXIT_USAGE

    def test_unknown_command(self):
        with pytest.raises(SystemExit) as info:
            build_parser().parse_args(["nope"])
        assert info.value.code == EXIT_USAGE

    def test_exit_codes_distinct(self):
        assert len({EXIT_OK, EXIT_FAILED, EXIT_USAGE}) == 3
