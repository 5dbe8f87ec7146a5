import json

import numpy as np
import pytest

from markov_ktree.cli import main
from markov_ktree.learn import random_score_table


def output_lines(capsys):
    return [json.loads(line) for line in capsys.readouterr().out.splitlines() if line.strip()]


class TestLearn:
    def test_samples_to_model_report_and_dot(self, fixtures_dir, tmp_path, capsys):
        code = main(["learn", "--k", "2", "--input", str(fixtures_dir / "chain_samples.csv"), "--out", str(tmp_path)])
        assert code == 0
        (report,) = output_lines(capsys)
        assert report["n"] == 5 and report["k"] == 2
        assert report["samples"] == 24
        assert report["delta"] >= 0
        assert report["delta"] == pytest.approx(report["score"], abs=1e-9)
        assert report["states_expanded"] <= report["state_bound"]
        assert set(report["terms"]) == {"A", "B", "C", "D", "E"}
        assert json.loads((tmp_path / "report.json").read_text()) == report
        assert (tmp_path / "model.json").is_file()
        dot = (tmp_path / "ktree.dot").read_text()
        for i in range(1, 5):
            assert f"{i} -- {i + 1} [style=bold];" in dot

    def test_joint_input_reports_the_divergence(self, fixtures_dir, tmp_path, capsys):
        code = main(["learn", "--k", "1", "--input", str(fixtures_dir / "mixed_joint.json"), "--out", str(tmp_path)])
        assert code == 0
        (report,) = output_lines(capsys)
        assert report["kind"] == "json-joint"
        assert abs(report["divergence"]["residual"]) <= 1e-9

    def test_score_table_input_skips_the_fit(self, tmp_path, capsys):
        table = tmp_path / "scores.json"
        table.write_text(json.dumps(random_score_table(5, 2, np.random.default_rng(3)).to_json()))
        code = main(["learn", "--k", "2", "--input", str(table), "--out", str(tmp_path / "out")])
        assert code == 0
        (report,) = output_lines(capsys)
        assert report["kind"] == "json-score-table"
        assert "delta" not in report
        assert not (tmp_path / "out" / "model.json").exists()
        assert (tmp_path / "out" / "ktree.dot").is_file()

    def test_score_table_width_must_match(self, tmp_path):
        table = tmp_path / "scores.json"
        table.write_text(json.dumps(random_score_table(5, 2, np.random.default_rng(3)).to_json()))
        assert main(["learn", "--k", "1", "--input", str(table), "--out", str(tmp_path)]) == 2

    def test_width_not_below_the_variable_count(self, fixtures_dir, tmp_path):
        code = main(["learn", "--k", "5", "--input", str(fixtures_dir / "chain_samples.csv"), "--out", str(tmp_path)])
        assert code == 3

    def test_missing_input(self, tmp_path):
        assert main(["learn", "--k", "2", "--input", str(tmp_path / "nope.csv")]) == 2

    def test_penalty_and_timings(self, fixtures_dir, tmp_path, capsys):
        code = main([
            "learn", "--k", "2", "--input", str(fixtures_dir / "chain_samples.csv"),
            "--lambda", "0.01", "--timings", "--out", str(tmp_path),
        ])
        assert code == 0
        (report,) = output_lines(capsys)
        assert report["penalized_delta"] == pytest.approx(report["delta"] - 0.01 * len(report["edges"]))
        assert {"ingest", "search", "fit"} <= set(report["timings"])

    def test_same_input_same_output(self, fixtures_dir, tmp_path, capsys):
        args = ["learn", "--k", "2", "--input", str(fixtures_dir / "chain_samples.csv"), "--seed", "5"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        first = capsys.readouterr().out
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        assert capsys.readouterr().out == first
        assert (tmp_path / "a" / "model.json").read_text() == (tmp_path / "b" / "model.json").read_text()


class TestScore:
    def test_learned_model_against_its_joint(self, fixtures_dir, tmp_path, capsys):
        joint = str(fixtures_dir / "mixed_joint.json")
        assert main(["learn", "--k", "1", "--input", joint, "--out", str(tmp_path)]) == 0
        capsys.readouterr()
        assert main(["score", "--model", str(tmp_path / "model.json"), "--input", joint, "--lambda", "0.1"]) == 0
        (report,) = output_lines(capsys)
        assert abs(report["residual"]) <= 1e-9
        assert report["kl_infinite"] is False
        assert report["penalized_delta"] == pytest.approx(report["delta"] - 0.1 * 2)

    def test_xor_triangle(self, fixtures_dir, capsys):
        code = main([
            "score", "--model", str(fixtures_dir / "xor_model.json"),
            "--input", str(fixtures_dir / "xor_joint.json"),
        ])
        assert code == 0
        (report,) = output_lines(capsys)
        assert report["kl"] == pytest.approx(0.0, abs=1e-12)
        assert report["delta"] == pytest.approx(1.0)

    def test_samples_rejected(self, fixtures_dir):
        code = main([
            "score", "--model", str(fixtures_dir / "xor_model.json"),
            "--input", str(fixtures_dir / "chain_samples.csv"),
        ])
        assert code == 2

    def test_same_input_same_output(self, fixtures_dir, capsys):
        args = [
            "score", "--model", str(fixtures_dir / "xor_model.json"),
            "--input", str(fixtures_dir / "xor_joint.json"), "--lambda", "0.2",
        ]
        assert main(args) == 0
        first = capsys.readouterr().out
        assert main(args) == 0
        assert capsys.readouterr().out == first


class TestInfer:
    def run(self, fixtures_dir, query):
        return main(["infer", "--model", str(fixtures_dir / "xor_model.json"), "--query", query])

    def test_marginal_with_named_and_indexed_evidence(self, fixtures_dir, capsys):
        assert self.run(fixtures_dir, '{"type": "marginal", "var": 3, "evidence": {"X": 1, "2": 1}}') == 0
        (answer,) = output_lines(capsys)
        assert answer["result"] == pytest.approx([1.0, 0.0], abs=1e-12)
        assert answer["log2p"] == pytest.approx(-2.0)

    def test_mpe(self, fixtures_dir, capsys):
        assert self.run(fixtures_dir, '{"type": "mpe", "evidence": {"Z": 1}}') == 0
        (answer,) = output_lines(capsys)
        assert answer["result"] == {"X": 0, "Y": 1, "Z": 1}
        assert answer["log2p"] == pytest.approx(-2.0)

    def test_evidence_query_from_a_file(self, fixtures_dir, tmp_path, capsys):
        query = tmp_path / "query.json"
        query.write_text('{"type": "evidence", "evidence": {"X": 1}}')
        assert self.run(fixtures_dir, str(query)) == 0
        (answer,) = output_lines(capsys)
        assert answer["result"] == pytest.approx(0.5)

    def test_zero_probability_evidence(self, fixtures_dir):
        assert self.run(fixtures_dir, '{"type": "mpe", "evidence": {"X": 1, "Y": 1, "Z": 1}}') == 4
        assert self.run(fixtures_dir, '{"type": "evidence", "evidence": {"X": 0, "Y": 0, "Z": 1}}') == 4

    def test_malformed_queries(self, fixtures_dir):
        assert self.run(fixtures_dir, '{"type": "marginal"}') == 2
        assert self.run(fixtures_dir, '{"type": "mpe", "evidence": {"W": 0}}') == 2
        assert self.run(fixtures_dir, "{not json") == 2
        assert self.run(fixtures_dir, '{"type": "marginal", "var": 1, "evidence": {"X": 0}}') == 2

    def test_model_with_an_unknown_parent(self, fixtures_dir, tmp_path):
        payload = json.loads((fixtures_dir / "xor_model.json").read_text())
        payload["cpts"][2]["parents"] = [1, 9]
        model = tmp_path / "model.json"
        model.write_text(json.dumps(payload))
        assert main(["infer", "--model", str(model), "--query", '{"type": "evidence"}']) == 2

    @pytest.mark.parametrize("query", [
        '{"type": "marginal", "var": 3, "evidence": {"X": 1}}',
        '{"type": "mpe", "evidence": {"Z": 1}}',
        '{"type": "evidence", "evidence": {"Y": 0}}',
    ])
    def test_same_query_same_output(self, fixtures_dir, capsys, query):
        assert self.run(fixtures_dir, query) == 0
        first = capsys.readouterr().out
        assert self.run(fixtures_dir, query) == 0
        assert capsys.readouterr().out == first


class TestOracleCheck:
    def test_small_run_passes(self, tmp_path, capsys):
        assert main(["oracle-check", "--k", "1", "--max-n", "5", "--trials", "2", "--out", str(tmp_path)]) == 0
        lines = output_lines(capsys)
        assert len(lines) == 3 * 2 + 1
        assert all(line["match"] for line in lines[:-1])
        summary = lines[-1]
        assert summary["summary"] and summary["ok"] and summary["failed"] == 0

    def test_both_widths_by_default(self, capsys):
        assert main(["oracle-check", "--max-n", "4", "--trials", "1"]) == 0
        summary = output_lines(capsys)[-1]
        assert summary["k"] == [1, 2]
        # k=1: n = 3, 4; k=2: n = 3, 4
        assert summary["trials"] == 4

    def test_cap_above_the_limit_refused(self):
        assert main(["oracle-check", "--k", "2", "--oracle-cap", "12", "--max-n", "5"]) == 2

    def test_max_n_above_the_cap_refused(self):
        assert main(["oracle-check", "--k", "2", "--max-n", "12"]) == 2
        assert main(["oracle-check", "--k", "2", "--oracle-cap", "5", "--max-n", "6"]) == 2

    def test_same_seed_same_output(self, tmp_path, capsys):
        args = ["oracle-check", "--k", "2", "--max-n", "5", "--trials", "2", "--seed", "11"]
        assert main(args + ["--out", str(tmp_path / "a")]) == 0
        first = capsys.readouterr().out
        assert main(args + ["--out", str(tmp_path / "b")]) == 0
        assert capsys.readouterr().out == first


def test_export_dot(fixtures_dir, tmp_path, capsys):
    assert main(["export-dot", "--model", str(fixtures_dir / "xor_model.json"), "--out", str(tmp_path)]) == 0
    (answer,) = output_lines(capsys)
    assert answer["files"] == ["ktree.dot", "clique_tree.dot"]
    assert "graph ktree_k2 {" in (tmp_path / "ktree.dot").read_text()
    assert 'label="{X, Y, Z}"' in (tmp_path / "clique_tree.dot").read_text()


def test_export_dot_is_repeatable(fixtures_dir, tmp_path, capsys):
    model = str(fixtures_dir / "xor_model.json")
    assert main(["export-dot", "--model", model, "--out", str(tmp_path / "a")]) == 0
    first = capsys.readouterr().out
    assert main(["export-dot", "--model", model, "--out", str(tmp_path / "b")]) == 0
    assert capsys.readouterr().out == first
    for name in ("ktree.dot", "clique_tree.dot"):
        assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()
