import random

import pytest

from ctdmu.automata import Player, Rank, from_formula
from ctdmu.fuzz import random_formula
from ctdmu.games import (
    COUNTDOWN, POSITIONAL, Configuration, CounterChoice, CountdownGame, GameError,
    build_semantic_game, language, legal_moves, solve, step, trace, zielonka,
)
from ctdmu.model import build_p3, random_lts, random_valuation
from ctdmu.ordinal import OMEGA, Ordinal
from ctdmu.semantics import evaluate
from ctdmu.syntax import parse

P3 = build_p3()
N = Ordinal.of


def example_game(bound="w"):
    a = from_formula(parse(f"nu^{bound} x. <a> x"), allow_successor=True)
    return a, build_semantic_game(a, P3)


def test_semantic_game_shape():
    a, g = example_game()
    phi, dia, x = a.states
    assert g.edges[("p0", dia)] == ()
    assert g.edges[("p2", dia)] == (("p1", x),)
    assert len(g.positions) == 3 * 3
    b = from_formula(parse("<a> y"))
    h = build_semantic_game(b, P3, {"y": frozenset({"p0"})})
    assert len(h.positions) == 3 * (1 + 1)
    assert h.owner[("p0", "y")] is Player.A and h.owner[("p1", "y")] is Player.E
    assert language(b, P3, {"y": frozenset({"p0"})}) == {"p1"}


def test_legal_moves():
    a, g = example_game()
    phi, dia, x = a.states
    assert legal_moves(g, Configuration(("p0", dia), (N(3),), POSITIONAL)) == []
    assert legal_moves(g, Configuration(("p1", dia), (N(0),), COUNTDOWN)) == []
    fam = legal_moves(g, Configuration(("p1", dia), (OMEGA,), COUNTDOWN))
    assert len(fam) == 1 and isinstance(fam[0], CounterChoice)
    # standard rank above a nonstandard one resets it
    ranks = [Rank(Player.A, False, N(7)), Rank(Player.E, True)]
    h = CountdownGame(["u", "v"], {"u": Player.E, "v": Player.E}, {"u": ["v"], "v": ["u"]},
                      {"u": 0, "v": 1}, ranks)
    (mv,) = legal_moves(h, Configuration("v", (N(5),), COUNTDOWN))
    assert mv == Configuration("v", (N(7),), POSITIONAL)


def test_step():
    a, g = example_game()
    phi, dia, x = a.states
    c = Configuration(("p2", phi), (OMEGA,), POSITIONAL)
    c1 = step(g, c, 0)
    assert c1 == Configuration(("p2", dia), (OMEGA,), COUNTDOWN)
    assert step(g, c1, 5) == Configuration(("p2", dia), (N(5),), POSITIONAL)
    with pytest.raises(GameError):
        step(g, Configuration(("p2", dia), (N(3),), COUNTDOWN), 5)
    with pytest.raises(GameError):
        step(g, c, 4)


def test_solve_examples():
    a, g = example_game()
    res = solve(g)
    assert res.winner_at(("p2", a.initial)) is Player.A
    a2, g2 = example_game("2")
    r2 = solve(g2)
    assert r2.winner_at(("p2", a2.initial)) is Player.E
    assert r2.winner_at(("p1", a2.initial)) is Player.A
    assert evaluate(parse("nu^2 x. <a> x"), P3) == {"p2"}


def test_standalone_self_loop():
    g = CountdownGame(["v"], {"v": Player.E}, {"v": ["v"]}, {"v": 0}, [Rank(Player.A, False, OMEGA)])
    res = solve(g)
    assert res.bounds == {0: 2}
    assert res.winner_at("v") is Player.E
    with pytest.raises(GameError):
        solve(g, truncation=None)


def test_trace_example():
    a, g = example_game("2")
    res = solve(g)
    lines = trace(res, res.initial(("p2", a.initial)))
    assert len(lines) == 11
    assert "stuck (counter 0)" in lines[-2] and lines[-2].split(" | ")[3] == "Adam"


def test_truncation_stable():
    rng = random.Random(4)
    for k in range(15):
        f = random_formula(rng, bounds=(OMEGA,), free=())
        m = random_lts(k, 1 + k % 3, ["a", "b"], 0.4)
        a = from_formula(f)
        g = build_semantic_game(a, m)
        base = solve(g)
        B = max(base.bounds.values(), default=1)
        for extra in (1, 2):
            other = solve(g, truncation=B + extra)
            for p in m.points:
                assert other.eve_wins((p, a.initial)) == base.eve_wins((p, a.initial))


def _check_strategy(res, start):
    """Explore all plays where the winner follows the strategy; the winner never loses."""
    g = res.game
    who = res.winner[start]
    seen = set()
    stack = [start]
    while stack:
        c = stack.pop()
        if c in seen:
            continue
        seen.add(c)
        assert res.winner[c] is who
        moves = legal_moves(g, c)
        mover_ = g.owner[c.position] if c.mode == POSITIONAL else g.rank_owner(g.rank[c.position])
        if mover_ is who:
            assert moves, "winner stuck"
            stack.append(res.strategy[c])
        else:
            stack.extend(moves)


def test_strategies_are_winning():
    rng = random.Random(9)
    for k in range(10):
        f = random_formula(rng, bounds=(OMEGA, Ordinal.of(2)), free=("p",))
        m = random_lts(k, 1 + k % 3, ["a", "b"], 0.4)
        a = from_formula(f, allow_successor=True)
        g = build_semantic_game(a, m, random_valuation(k, m, ["p"]))
        res = solve(g)
        for p in m.points:
            _check_strategy(res, res.initial((p, a.initial)))


def test_zielonka_small():
    # 0 -> 1 -> 0 with priorities 1, 2: even max wins for player 0
    win, strat = zielonka([[1], [0]], [0, 1], [1, 2])
    assert win == [0, 0]
    win, _ = zielonka([[1], [0]], [0, 1], [3, 2])
    assert win == [1, 1]
