import json
from unittest import mock

import pytest

from fq.decomp import suites
from fq.decomp.cli import cli
from fq.decomp.results import CSV_COLUMNS, record

HEADER = ",".join(CSV_COLUMNS)


class TestInspectionCommands:
    def test_field(self, runner):
        result = runner.invoke(cli, ["field", "--p", "3", "--n", "2"])
        assert result.exit_code == 0, result.output
        assert "GF(3^2)" in result.output
        assert "modulus" in result.output

    def test_energy(self, runner):
        result = runner.invoke(cli, ["energy", "--p", "17", "--set", "interval:0,4"])
        assert result.exit_code == 0, result.output
        assert "E(U)" in result.output
        assert "44" in result.output

    def test_decompose_with_forced_threshold(self, runner):
        result = runner.invoke(cli, ["decompose", "--p", "1009", "--set", "interval:0,32", "--m", "4"])
        assert result.exit_code == 0, result.output
        assert "8192" in result.output
        assert "iteration" in result.output

    @pytest.mark.parametrize("kind", ["S", "T", "mixed", "K"])
    def test_charsum(self, runner, kind):
        result = runner.invoke(
            cli,
            ["charsum", "--p", "101", "--kind", kind, "--sets", "interval:1,6", "gp:2,5", "interval:3,4"],
        )
        assert result.exit_code == 0, result.output
        assert f"|{kind}| = " in result.output
        assert "bound" in result.output

    def test_bad_set_spec_is_a_usage_error(self, runner):
        result = runner.invoke(cli, ["energy", "--p", "17", "--set", "bogus:1"])
        assert result.exit_code == 2

    def test_bad_field_is_a_usage_error(self, runner):
        result = runner.invoke(cli, ["field", "--p", "12"])
        assert result.exit_code == 2

    @pytest.mark.parametrize("spec", ["rand:5,-1", "rand:5,4294967296"])
    def test_random_seed_out_of_range_is_a_usage_error(self, runner, spec):
        result = runner.invoke(cli, ["energy", "--p", "17", "--set", spec])
        assert result.exit_code == 2
        assert "seed" in result.output


class TestVerify:
    def test_single_suite_to_stdout(self, runner, small_config_path):
        result = runner.invoke(cli, ["verify", "--config", small_config_path, "--suite", "field-axioms"])
        assert result.exit_code == 0, result.output
        assert HEADER in result.output
        assert "field-axioms,q=0004/distributive" in result.output

    def test_overrides_and_output_file(self, runner, small_config_path, tmp_path):
        out = tmp_path / "verify.csv"
        args = ["verify", "--config", small_config_path, "--suite", "lemmas", "--trials", "1", "-o", str(out)]
        result = runner.invoke(cli, args)
        assert result.exit_code == 0, result.output
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == HEADER
        assert all(line.startswith("lemmas,") for line in lines[1:])
        assert "hard_failures" in result.output

    def test_unknown_suite_is_rejected_by_click(self, runner):
        result = runner.invoke(cli, ["verify", "--suite", "nonsense"])
        assert result.exit_code == 2

    @pytest.mark.parametrize("seed", ["-1", "4294967296"])
    def test_seed_out_of_range_is_a_usage_error(self, runner, small_config_path, seed):
        args = ["verify", "--config", small_config_path, "--suite", "charsum-bounds", "--seed", seed]
        result = runner.invoke(cli, args)
        assert result.exit_code == 2
        assert "seed" in result.output

    def test_hard_failure_exits_one_after_writing_records(self, runner, small_config, small_config_path, tmp_path):
        def broken_axioms(q):
            return [record("field-axioms", f"q={q:04d}/associative", 1, 0, passed=False, hard=True)]

        out = tmp_path / "failing.csv"
        args = ["verify", "--config", small_config_path, "--suite", "field-axioms", "-o", str(out)]
        with mock.patch.object(suites, "_axiom_records", side_effect=broken_axioms):
            result = runner.invoke(cli, args)
        assert result.exit_code == 1
        assert "hard check(s) failed" in result.output
        lines = out.read_text(encoding="utf-8").splitlines()
        assert lines[0] == HEADER
        assert len(lines) == 1 + len(small_config["fields"])
        assert all(",false," in line for line in lines[1:])


class TestExperiment:
    @pytest.fixture(scope="class")
    def experiment_config(self, tmp_path_factory, small_config):
        root = tmp_path_factory.mktemp("experiment")
        config = dict(small_config, suites=["energy-oracle", "partition"], output=str(root / "records.csv"))
        path = root / "experiment.json"
        path.write_text(json.dumps(config), encoding="utf-8")
        return path, root / "records.csv"

    def test_reruns_are_byte_identical(self, runner, experiment_config):
        path, out = experiment_config
        first = runner.invoke(cli, ["experiment", "--config", str(path)])
        assert first.exit_code == 0, first.output
        written = out.read_bytes()
        second = runner.invoke(cli, ["experiment", "--config", str(path)])
        assert second.exit_code == 0, second.output
        assert out.read_bytes() == written

    def test_named_sets_are_measured(self, runner, experiment_config):
        path, out = experiment_config
        result = runner.invoke(cli, ["experiment", "--config", str(path)])
        assert result.exit_code == 0, result.output
        text = out.read_text(encoding="utf-8")
        assert "sets,A/additive-energy," in text
        assert "sets,ap/partition-c2," in text

    def test_bad_config_is_a_usage_error(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"colour": "blue"}), encoding="utf-8")
        result = runner.invoke(cli, ["experiment", "--config", str(path)])
        assert result.exit_code == 2
        assert "colour" in result.output

    def test_missing_config_is_a_usage_error(self, runner, tmp_path):
        result = runner.invoke(cli, ["experiment", "--config", str(tmp_path / "missing.json")])
        assert result.exit_code == 2
