import json

import pytest
from click.testing import CliRunner

from app import cli
from common.config import Settings
from tests.conftest import CORPUS_DIR

C1 = str(CORPUS_DIR / "c1_nil_hecke.json")
C2 = str(CORPUS_DIR / "c2_two_vertex.json")
C3 = str(CORPUS_DIR / "c3_nonsymmetric.json")


def _run(tmp_path, *args):
    out = tmp_path / "out.json"
    result = CliRunner().invoke(cli, [*args[:2], "--out", str(out), *args[2:]])
    data = None
    if out.exists():
        data = json.loads(out.read_text(encoding="utf-8"))
    return result, data


def _write_corpus(tmp_path, data):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps(data), encoding="utf-8")
    return str(path)


def test_check_shipped_corpora(tmp_path):
    for corpus in (C1, C2, C3):
        result, data = _run(tmp_path, "--corpus", corpus, "check")
        assert result.exit_code == 0, result.output
        assert data["passed"]
        assert all(entry["passed"] for entry in data["results"]["check"])


def test_check_locates_a_planted_defect(tmp_path):
    path = _write_corpus(
        tmp_path,
        {
            "name": "broken",
            "qfamily": {
                "index_set": [1, 2],
                "q_polys": {"1,2": [["1", [1, 0]], ["-1", [0, 1]]]},
            },
            "modules": [
                {
                    "name": "bad",
                    "words": [[1, 2]],
                    "x": [[], []],
                    "tau": [[[0, 0, "1"]]],
                }
            ],
        },
    )
    result, data = _run(tmp_path, "--corpus", path, "check")
    assert result.exit_code == 1
    (entry,) = data["results"]["check"]
    assert entry["module"] == "bad"
    assert "tau-square:1" in entry["violations"]


def test_check_empty_corpus_passes(tmp_path):
    path = _write_corpus(
        tmp_path, {"name": "empty", "qfamily": {"index_set": []}}
    )
    result, data = _run(tmp_path, "--corpus", path, "check")
    assert result.exit_code == 0
    assert data["passed"]
    assert data["results"]["check"] == []


def _flat_corpus(**overrides):
    data = {
        "name": "flat",
        "field": "Q",
        "index_set": [1, 2],
        "q_polys": {"1,2": [["1", [1, 0]], ["-1", [0, 1]]]},
        "modules": [
            {"name": "L1", "beta": {"1": 1}, "dim": 1, "words": [[1]],
             "x": [[]], "tau": []},
            {"name": "L2", "beta": {"2": 1}, "dim": 1, "words": [[2]],
             "x": [[]], "tau": []},
        ],
    }
    data.update(overrides)
    return data


def test_family_at_the_top_level(tmp_path):
    path = _write_corpus(tmp_path, _flat_corpus())
    result, data = _run(tmp_path, "--corpus", path, "check")
    assert result.exit_code == 0, result.output
    assert data["passed"]
    result, data = _run(tmp_path, "--corpus", path, "rmatrix", "L1", "L2")
    assert result.exit_code == 0, result.output
    assert data["r_matrix"] == [["0", "0"], ["1", "0"]]


def test_letters_outside_the_index_set_are_input_errors(tmp_path):
    path = _write_corpus(tmp_path, _flat_corpus(index_set=[1], q_polys={}))
    result, _ = _run(tmp_path, "--corpus", path, "check")
    assert result.exit_code == 2
    assert "outside the index set" in result.output


def test_missing_polynomial_is_an_input_error(tmp_path):
    path = _write_corpus(tmp_path, _flat_corpus(q_polys={}))
    result, _ = _run(tmp_path, "--corpus", path, "rmatrix", "L1", "L2")
    assert result.exit_code == 2
    assert "no polynomial" in result.output


def test_declared_dimension_must_match_words(tmp_path):
    corpus = _flat_corpus()
    corpus["modules"][0]["dim"] = 2
    path = _write_corpus(tmp_path, corpus)
    result, _ = _run(tmp_path, "--corpus", path, "check")
    assert result.exit_code == 2
    assert "declares dim 2" in result.output


def test_invalid_modules_are_rejected_outside_check(tmp_path):
    corpus = _flat_corpus()
    corpus["modules"][0]["x"] = [[[0, 0, "1"]]]
    path = _write_corpus(tmp_path, corpus)
    for command in (["rmatrix", "L1", "L2"], ["conv", "L1", "L2"]):
        result, data = _run(tmp_path, "--corpus", path, *command)
        assert result.exit_code == 2, command
        assert "nilpotent:1" in result.output
        assert data is None
    result, data = _run(tmp_path, "--corpus", path, "check")
    assert result.exit_code == 1
    entries = {e["module"]: e for e in data["results"]["check"]}
    assert entries["L1"]["violations"] == ["nilpotent:1"]
    assert entries["L2"]["passed"]


def test_malformed_corpus_exits_with_input_error(tmp_path):
    path = tmp_path / "corpus.json"
    path.write_text("{ not json", encoding="utf-8")
    result = CliRunner().invoke(cli, ["--corpus", str(path), "check"])
    assert result.exit_code == 2
    assert "line 1" in result.output


def test_unknown_module_exits_with_input_error(tmp_path):
    result, _ = _run(tmp_path, "--corpus", C2, "conv", "L1", "L9")
    assert result.exit_code == 2
    assert "L9" in result.output


def test_cache_dir_from_environment(tmp_path, monkeypatch):
    cache = tmp_path / "cache"
    monkeypatch.setenv("KLR_CACHE_DIR", str(cache))
    assert Settings.from_env().cache_dir == cache
    result, _ = _run(tmp_path, "--corpus", C2, "conv", "L1", "L2")
    assert result.exit_code == 0, result.output
    assert list(cache.glob("rewrite-*.pkl"))
    monkeypatch.delenv("KLR_CACHE_DIR")
    assert Settings.from_env().cache_dir is None


def test_conv_writes_module(tmp_path):
    result, data = _run(tmp_path, "--corpus", C2, "conv", "L1", "L2")
    assert result.exit_code == 0, result.output
    assert data["words"] == [[1, 2], [2, 1]]
    assert data["conv_of"] == ["L1", "L2"]
    assert data["tau"] == [[[1, 0, "1"]]]


def test_rmatrix_command(tmp_path):
    result, data = _run(tmp_path, "--corpus", C2, "rmatrix", "L1", "L2")
    assert result.exit_code == 0, result.output
    assert data["s"] == 0
    assert data["rank"] == 1
    assert data["r_matrix"] == [["0", "0"], ["1", "0"]]
    assert data["image_words"] == [[1, 2]]

    result, data = _run(tmp_path, "--corpus", C1, "rmatrix", "L1", "L1")
    assert data["r_matrix"] == [["1", "0"], ["0", "1"]]


def test_verify_single_pair(tmp_path):
    result, data = _run(tmp_path, "--corpus", C2, "verify", "L1", "L2")
    assert result.exit_code == 0, result.output
    (entry,) = data["results"]["verify"]
    assert entry["status"] == "pass"
    assert entry["report"]["socle_dim"] == 1


def test_verify_needs_a_pair(tmp_path):
    result = CliRunner().invoke(cli, ["--corpus", C2, "verify", "L1"])
    assert result.exit_code == 2


def test_verify_skips_non_symmetric_pairs(tmp_path):
    result, data = _run(tmp_path, "--corpus", C3, "verify", "--all-pairs")
    assert result.exit_code == 0, result.output
    statuses = {
        tuple(entry["pair"]): entry["status"]
        for entry in data["results"]["verify"]
    }
    assert statuses[("L12", "L12")] == "skipped: not symmetric"
    assert statuses[("L12", "L1")] == "skipped: not symmetric"
    assert statuses[("L1", "L2")] == "pass"


def test_report_on_a_small_corpus(tmp_path):
    result, data = _run(tmp_path, "--corpus", C3, "report")
    assert result.exit_code == 0, result.output
    assert set(data["results"]) == {"check", "rmatrix", "verify", "hexagons"}
    assert data["corpus"] == "c3_nonsymmetric"
    assert len(data["corpus_hash"]) == 64


@pytest.mark.slow
def test_verify_all_pairs_on_shipped_corpus(tmp_path):
    for corpus in (C1, C2):
        result, data = _run(
            tmp_path, "--corpus", corpus, "verify", "--all-pairs"
        )
        assert result.exit_code == 0, result.output
        assert data["passed"]
