from __future__ import annotations

import json

import pytest

from cli import EXIT_INPUT, EXIT_OK, EXIT_TOO_LARGE, main
from generators import gen_barbell10
from graph_core import read_edge_list, write_edge_list


@pytest.fixture
def star_file(tmp_path):
    path = tmp_path / "star.edges"
    assert main(["generate", "--family", "star", "--n", "10", "--out", str(path)]) == EXIT_OK
    return path


@pytest.fixture
def barbell_file(tmp_path):
    return write_edge_list(gen_barbell10(), tmp_path / "barbell.edges")


def test_generate_writes_edge_list(star_file):
    g = read_edge_list(star_file)
    assert (g.n, g.m_edges) == (10, 9)
    assert star_file.read_text().startswith("# star")


def test_generate_plod_to_stdout(capsys):
    assert main(["generate", "--family", "plod", "--degrees", "2,2,2,2", "--seed", "1"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("# plod n=4")
    assert len([line for line in out.splitlines() if not line.startswith("#")]) == 4


def test_generate_invalid_parameters():
    assert main(["generate", "--family", "star", "--n", "2"]) == EXIT_INPUT
    assert main(["generate", "--family", "ba", "--n", "10"]) == EXIT_INPUT


def test_measure(star_file, capsys):
    assert main(["measure", "--in", str(star_file), "--measure", "vat", "--set", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert (payload["numerator"], payload["denominator"]) == (1, 9)
    assert payload["set"] == [1]


def test_measure_rejects_non_cut_set(star_file):
    assert main(["measure", "--in", str(star_file), "--measure", "toughness", "--set", "2"]) == EXIT_INPUT


def test_exact_writes_record(star_file, tmp_path):
    out = tmp_path / "result.json"
    assert main(["exact", "--in", str(star_file), "--out", str(out)]) == EXIT_OK
    record = json.loads(out.read_text())
    assert (record["numerator"], record["denominator"]) == (1, 9)
    assert record["witness"] == [1]
    assert record["graph_id"] == "star"
    assert record["exact"] is True


def test_exact_with_branch_and_bound(barbell_file, capsys):
    assert main(["exact", "--in", str(barbell_file), "--solver", "bnb"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "[exact] vat = 1/5" in out
    assert "solver=bnb" in out


def test_exact_over_the_cap(barbell_file):
    assert main(["exact", "--in", str(barbell_file), "--solver", "brute", "--cap", "3"]) == EXIT_TOO_LARGE
    assert main(["exact", "--in", str(barbell_file), "--solver", "bnb", "--bnb-cap", "5"]) == EXIT_TOO_LARGE


def test_input_errors(tmp_path):
    assert main(["exact", "--in", str(tmp_path / "missing.edges")]) == EXIT_INPUT
    bad = tmp_path / "bad.edges"
    bad.write_text("1 2\n2 two\n")
    assert main(["exact", "--in", str(bad)]) == EXIT_INPUT


def test_heuristic(star_file, tmp_path):
    out = tmp_path / "heuristic.json"
    args = ["heuristic", "--in", str(star_file), "--pop", "8", "--gens", "20", "--cuts", "5", "--out", str(out)]
    assert main(args) == EXIT_OK
    record = json.loads(out.read_text())
    assert record["solver"] == "heuristic"
    assert record["exact"] is False
    assert record["value"] == pytest.approx(1 / 9)


def test_attack_report_from_result(star_file, tmp_path):
    result = tmp_path / "result.json"
    assert main(["exact", "--in", str(star_file), "--out", str(result)]) == EXIT_OK
    out_dir = tmp_path / "report"
    assert main(["attack-report", "--in", str(star_file), "--from-result", str(result),
                 "--out-dir", str(out_dir)]) == EXIT_OK
    assert (out_dir / "star_attack.graphml").exists()
    assert (out_dir / "star_components.csv").exists()


def test_attack_report_needs_a_set(star_file, tmp_path):
    assert main(["attack-report", "--in", str(star_file), "--out-dir", str(tmp_path)]) == EXIT_INPUT


def test_compare_measures_without_fixtures(tmp_path, capsys):
    code = main(["compare-measures", "--fixtures-dir", str(tmp_path / "none"), "--threads", "1", "--check"])
    assert code == EXIT_OK
    out = capsys.readouterr().out
    assert "big_barbell" in out
    assert "tenacity: violated" in out
