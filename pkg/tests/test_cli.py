import io
import json
import subprocess
import sys

import pytest

from ctdmu.cli import main, regex_to_nfa
from ctdmu.model import build_lasso, build_p3, dump
from ctdmu.semantics import evaluate
from ctdmu.syntax import regex_diamond, parse, Var


@pytest.fixture
def p3(tmp_path):
    path = tmp_path / "p3.json"
    dump(build_p3(), str(path))
    return str(path)


def run(argv, capsys, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(argv, capsys, **kw):
    code, out, _ = run(argv + ["--json"], capsys, **kw)
    return code, json.loads(out)


def test_check_point_and_set(p3, capsys):
    code, doc = run_json(["check", "-m", p3, "-f", "nu^w x. <a> x", "-p", "p2"], capsys)
    assert code == 0 and doc["verdict"] == "false"
    code, doc = run_json(["check", "-m", p3, "-f", "nu^2 x. <a> x"], capsys)
    assert doc["set"] == ["p2"]


def test_check_cross_check(p3, capsys):
    code, doc = run_json(["check", "-m", p3, "-f", "nu^2 x. <a> x", "--via", "game", "--cross-check"], capsys)
    assert code == 0 and doc["agree"] and doc["engines"]["game"] == ["p2"]


def test_assert_and_errors(p3, capsys):
    assert run(["check", "-m", p3, "-f", "nu^2 x. <a> x", "--assert", "{p2}"], capsys)[0] == 0
    assert run(["check", "-m", p3, "-f", "nu^2 x. <a> x", "--assert", "{p1}"], capsys)[0] == 3
    assert run(["check", "-m", p3, "-f", "nu^2 x. <a"], capsys)[0] == 2
    assert run(["check", "-m", p3, "-f", "<c> tt"], capsys)[0] == 2
    assert run(["check", "-m", p3, "-f", "tt", "-p", "zz"], capsys)[0] == 2
    assert run(["check", "-m", p3 + ".missing", "-f", "tt"], capsys)[0] == 2
    assert run(["nonsense"], capsys)[0] == 2


def test_game_solve(p3, capsys):
    code, out, _ = run(["game", "solve", "-m", p3, "-f", "nu^w x. <a> x"], capsys)
    assert "(p2,q) Adam" in out.splitlines()
    code, doc = run_json(["game", "solve", "-m", p3, "-f", "nu^2 x. <a> x", "--strategy"], capsys)
    assert doc["eve_wins"] == ["p2"] and doc["strategy"]


def test_game_trace(p3, capsys):
    code, out, _ = run(["game", "trace", "-m", p3, "-f", "nu^w x. <a> x", "--start", "p2", "--ctr", "1:2"], capsys)
    lines = out.strip().splitlines()
    assert len(lines) == 11
    assert lines[0].startswith("positional | (p2,q) | ctr {1:2} | Eve")
    assert lines[-2].endswith("stuck (counter 0)") and lines[-1] == "Adam is stuck: Eve wins"


def test_game_play(p3, capsys, monkeypatch):
    code, out, _ = run(["game", "play", "-m", p3, "-f", "nu^w x. <a> x", "--start", "p2", "--side", "adam"],
                       capsys, stdin="junk\n9\n1\n", monkeypatch=monkeypatch)
    assert code == 0
    assert "illegal move" in out and "engine: -> (p1,q0.0)" in out
    assert out.strip().endswith("Adam is stuck: Eve wins")
    code, _, _ = run(["game", "play", "-m", p3, "-f", "nu^w x. <a> x", "--start", "p2"],
                     capsys, stdin="", monkeypatch=monkeypatch)
    assert code == 2


def test_translate_round_trip(tmp_path, capsys):
    code, doc = run_json(["translate", "--to-automaton", "-f", "nu^w x. <a> x"], capsys)
    path = tmp_path / "a.json"
    path.write_text(json.dumps(doc["automaton"]))
    code, doc2 = run_json(["translate", "--to-formula", "-a", str(path)], capsys)
    f = parse(doc2["formula"])
    for prefix, loop in [("a", "a"), ("ab", "b"), ("", "ab")]:
        m = build_lasso(prefix, loop)
        assert evaluate(f, m) == evaluate(parse("nu^w x. <a> x"), m)
    code, doc3 = run_json(["game", "solve", "-a", str(path)], capsys)
    assert doc3["winners"] == {"*": "Eve"}


def test_formula_commands(capsys):
    assert run(["guard", "-f", "mu x. x | <a> x"], capsys)[1].strip() == "mu x. ff | <a> x"
    assert run(["dual", "-f", "nu^w x. <a> x & p"], capsys)[1].strip() == "mu^w x. [a] x | p"
    assert run(["hat", "-f", "nu^w x. <a> x"], capsys)[1].strip() == "nu x. <a> x"
    code, doc = run_json(["analyze", "-f", "nu^w x. mu^2 y. <a> x | y"], capsys)
    assert doc["nesting"] == 2 and not doc["is_guarded"]


def test_ordinal_commands(capsys):
    f = "nu^w x1. nu^w x2. <a> (x1 & x2)"
    assert run(["ordeval", "-f", f], capsys)[1].strip() == "[w^2,T)"
    assert run(["bound", "-f", f], capsys)[1].strip() == "w^2"
    assert run(["ordeval", "-f", "<a> y", "--val", "y=[w,w^2)", "--height", "w^3"], capsys)[1].strip() == "[w+1,w^3)"


def test_gen_and_determinism(tmp_path, capsys):
    a = run(["gen", "random", "--seed", "4", "--points", "3"], capsys)[1]
    b = run(["gen", "random", "--seed", "4", "--points", "3"], capsys)[1]
    assert a == b
    out = tmp_path / "l.json"
    run(["gen", "lasso", "aa", "b", "-o", str(out)], capsys)
    assert json.loads(out.read_text())["edges"] == [["0", "a", "1"], ["1", "a", "2"], ["2", "b", "2"]]
    doc = json.loads(run(["gen", "fig1", "1"], capsys)[1])
    assert doc["edges"] == [["m0", "b", "m0"]]


def test_sat(capsys):
    code, doc = run_json(["sat", "-f", "nu^2 x. <a> x", "--max-points", "2"], capsys)
    assert doc["verdict"] == "sat" and doc["point"] in doc["model"]["points"]
    assert run(["sat", "-f", "<a> tt & [a] ff", "--assert", "unsat"], capsys)[0] == 0


def test_regex_to_nfa():
    nfa = regex_to_nfa("a*b|c", ["a", "b", "c"])
    for w, ok in [("b", True), ("aab", True), ("c", True), ("", False), ("ac", False), ("ba", False)]:
        assert nfa.accepts(w) == ok
    any_ab = regex_to_nfa(".*", ["a", "b"])
    assert any_ab.accepts("") and any_ab.accepts("abba")
    m = build_lasso("ab", "a")
    f = regex_diamond(regex_to_nfa("ab", ["a", "b"]), Var("p"))
    assert evaluate(f, m, {"p": frozenset({"2"})}) == {"0"}


def test_module_entry_point(p3):
    r = subprocess.run([sys.executable, "-m", "ctdmu", "check", "-m", p3, "-f", "nu^2 x. <a> x"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "{p2}"
