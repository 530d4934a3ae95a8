"""CLI subcommands: argument handling, JSON schema, exit codes."""

import json

import pytest

from makerbreaker.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve_text_output(capsys):
    code, out, _ = run_cli(capsys, "solve", "--game", "ham", "--n", "4",
                           "--first", "maker")
    assert code == 0
    assert "winner=Breaker" in out


def test_solve_json_schema(capsys):
    code, out, _ = run_cli(capsys, "solve", "--game", "hp", "--n", "5",
                           "--first", "breaker", "--json")
    assert code == 0
    rec = json.loads(out)
    assert rec["game"] == "hp"
    assert rec["n"] == 5
    assert rec["first"] == "breaker"
    assert rec["winner"] == "maker"
    assert rec["nodes"] > 0
    assert rec["tt_hits"] >= 0
    assert rec["elapsed_ms"] >= 0
    assert set(rec["config"]) == {"ordering", "tt", "tt_max_entries", "tt_keep_depth"}


def test_solve_fhp_uses_default_fixed_pair(capsys):
    code, out, _ = run_cli(capsys, "solve", "--game", "fhp", "--n", "5",
                           "--first", "maker", "--json")
    assert code == 0
    assert json.loads(out)["winner"] == "breaker"


def test_solve_flags_affect_search_not_winner(capsys):
    base = json.loads(run_cli(capsys, "solve", "--game", "ham", "--n", "5",
                              "--first", "maker", "--json")[1])
    off = json.loads(run_cli(capsys, "solve", "--game", "ham", "--n", "5",
                             "--first", "maker", "--no-tt", "--no-ordering",
                             "--json")[1])
    assert base["winner"] == off["winner"]
    assert off["nodes"] >= base["nodes"]


def test_table_json(capsys):
    code, out, _ = run_cli(capsys, "table", "--game", "ham", "--n-min", "4",
                           "--n-max", "5", "--json")
    assert code == 0
    cells = json.loads(out)["cells"]
    assert len(cells) == 4  # two n values x both first players
    assert all(c["winner"] == "breaker" for c in cells)


def test_table_budget_marks_cells_skipped(capsys):
    code, out, _ = run_cli(capsys, "table", "--game", "ham", "--n-min", "7",
                           "--n-max", "7", "--budget", "0", "--json")
    assert code == 0  # skipped cells are not an error without --strict
    cells = json.loads(out)["cells"]
    assert all(c["winner"] == "skipped" for c in cells)


def test_table_strict_fails_on_skips(capsys):
    code, _, _ = run_cli(capsys, "table", "--game", "ham", "--n-min", "7",
                         "--n-max", "7", "--budget", "0", "--strict", "--json")
    assert code == 1


def test_validate_e2(capsys):
    code, out, _ = run_cli(capsys, "validate", "e2", "--n", "6")
    assert code == 0
    assert "failures = 0" in out


def test_validate_ham_ext(capsys):
    code, out, _ = run_cli(capsys, "validate", "ham-ext", "--n", "8",
                           "--games", "2", "--greedy-games", "1", "--seed", "5")
    assert code == 0
    assert "wins=3 losses=0" in out


def test_construct_writes_edge_list(capsys, tmp_path):
    path = tmp_path / "g14.txt"
    code, _, err = run_cli(capsys, "construct", "--n", "14", "--out", str(path))
    assert code == 0
    assert "edges=54" in err and "ok" in err
    lines = path.read_text().splitlines()
    n, m = (int(x) for x in lines[0].split())
    assert (n, m) == (14, 54)
    assert len(lines) == 55
    assert all(ln.endswith(" F") for ln in lines[1:])


def test_construct_stdout(capsys):
    code, out, err = run_cli(capsys, "construct", "--n", "15")
    assert code == 0
    assert out.splitlines()[0] == "15 62"
    assert "m=2 r=1" in err


def test_bad_arguments_exit_nonzero(capsys):
    code, _, err = run_cli(capsys, "solve", "--game", "ham", "--n", "3",
                           "--first", "maker")
    assert code == 2
    assert "error" in err


def test_play_resign(capsys, monkeypatch):
    monkeypatch.setattr("builtins.input", lambda prompt="": "resign")
    code, out, _ = run_cli(capsys, "play", "--game", "ham", "--n", "4",
                           "--human", "maker", "--first", "maker")
    assert code == 0
    assert "transcript" in out


def test_play_rejects_illegal_then_accepts(capsys, monkeypatch):
    feeds = iter(["9 9", "0 1", "resign"])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(feeds))
    code, out, _ = run_cli(capsys, "play", "--game", "ham", "--n", "4",
                           "--human", "maker", "--first", "maker")
    assert code == 0
    assert "illegal move" in out
