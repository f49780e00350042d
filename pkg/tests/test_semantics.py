import random

import pytest

from ctdmu.model import Lts, build_lasso, build_p3, complement_valuation, random_lts, random_valuation
from ctdmu.semantics import (
    EvalError, approximant_chain, evaluate, model_check, sat_search_bounded,
)
from ctdmu.syntax import Nfa, Var, dualize, hat_transform, parse, regex_diamond, successor_elimination
from ctdmu.fuzz import random_formula

P3 = build_p3()
LOOP = build_lasso("", "a")


def test_eval_examples():
    assert evaluate(parse("nu^2 x. <a> x"), P3) == {"p2"}
    assert evaluate(parse("nu^w x. <a> x"), P3) == set()
    assert evaluate(parse("nu^w x. <a> x"), LOOP) == {"0"}
    assert evaluate(parse("mu^1 x. [a] x"), P3) == {"p0"}
    assert evaluate(parse("mu x. [a] x"), P3) == {"p0", "p1", "p2"}


def test_eval_errors():
    with pytest.raises(EvalError):
        evaluate(parse("x"), P3)
    with pytest.raises(EvalError):
        evaluate(parse("<b> tt"), P3)


def test_chain():
    c = approximant_chain(parse("nu x. <a> x"), P3, up_to=4)
    assert c.stages == [({"p0", "p1", "p2"},), ({"p1", "p2"},), ({"p2"},), (set(),), (set(),)]
    assert c.closure_index == 3
    c = approximant_chain(parse("mu x. x"), P3, up_to=1)
    assert c.stages == [(set(),), (set(),)] and c.closure_index == 0


def test_model_check():
    f = parse("nu^w x. <a> x")
    assert not model_check(f, P3, {}, "p2")
    assert model_check(parse("tt"), P3, {}, "p0")


def test_sat_search():
    r = sat_search_bounded(parse("<a> tt"), 2)
    assert r.satisfiable and model_check(parse("<a> tt"), r.model, {}, r.point)
    r = sat_search_bounded(parse("mu x. <a> x"), 3)
    assert not r.satisfiable and "positive countdown" in r.note
    r = sat_search_bounded(parse("nu x. <a> x"), 1)
    assert r.satisfiable and r.model.edges == (("0", "a", "0"),)


def _reach_oracle(m, nfa, target):
    # points from which some path labelled by an accepted word ends in target
    out = set()
    for p in m.points:
        frontier = {(p, q) for q in nfa.initial}
        seen = set(frontier)
        while frontier:
            nxt = set()
            for (pt, q) in frontier:
                if q in nfa.accepting and pt in target:
                    out.add(p)
                for (s, a, t) in nfa.transitions:
                    if s == q:
                        for pt2 in m.successors(pt, a):
                            if (pt2, t) not in seen:
                                seen.add((pt2, t))
                                nxt.add((pt2, t))
            frontier = nxt
    return out


def test_regex_diamond_against_reachability():
    rng = random.Random(3)
    a_star = Nfa(("s",), ("a", "b"), frozenset({"s"}), frozenset({"s"}), frozenset({("s", "a", "s")}))
    any_star = Nfa(("s",), ("a", "b"), frozenset({"s"}), frozenset({"s"}),
                   frozenset({("s", "a", "s"), ("s", "b", "s")}))
    for _ in range(10):
        pre = "".join(rng.choice("ab") for _ in range(rng.randint(0, 4)))
        loop = "".join(rng.choice("ab") for _ in range(rng.randint(1, 3)))
        m = build_lasso(pre, loop)
        m = type(m)(m.points, ["a", "b"], m.edges)
        target = {p for p in m.points if rng.random() < 0.4}
        val = {"x": frozenset(target)}
        for nfa in (a_star, any_star):
            got = evaluate(regex_diamond(nfa, Var("x")), m, val)
            assert got == _reach_oracle(m, nfa, target)
        assert evaluate(regex_diamond(any_star, parse("tt")), m) == set(m.points)


def test_finite_collapse_duality_and_successor_elimination():
    rng = random.Random(5)
    for k in range(60):
        f = random_formula(rng, free=("p",))
        m = random_lts(k, rng.randint(1, 4), ["a", "b"], 0.35)
        val = random_valuation(k, m, ["p"])
        sem = evaluate(f, m, val)
        assert evaluate(hat_transform(f), m, val) == sem
        assert evaluate(dualize(f), m, complement_valuation(m, val)) == set(m.points) - sem
        assert evaluate(successor_elimination(f), m, val) == sem


def _infix_oracle(m, word, start_loop, dfa, i):
    """Arbitrarily long infixes in L from point i: some run from a reachable start cycles through F."""
    (q0,) = dfa.initial
    delta = {(s, a): t for s, a, t in dfa.transitions}
    nxt = lambda j: j + 1 if j + 1 < len(word) else start_loop
    starts, j = [], i
    while j not in starts:
        starts.append(j)
        j = nxt(j)
    for s in starts:
        seen, cur = [], (s, q0)
        while cur not in seen:
            seen.append(cur)
            pos, q = cur
            cur = (nxt(pos), delta[(q, word[pos])])
        cycle = seen[seen.index(cur):]
        # states in ``seen`` are before reading the letter at pos; acceptance is after reading
        if any(delta[(q, word[pos])] in dfa.accepting for pos, q in cycle):
            return True
    return False


def test_unbounded_infix_on_lassos():
    from ctdmu.syntax import Nfa, unbounded_infix
    rng = random.Random(5)
    for trial in range(40):
        n = rng.randint(1, 3)
        qs = [str(k) for k in range(n)]
        trans = frozenset((q, a, rng.choice(qs)) for q in qs for a in "ab")
        acc = frozenset(rng.sample(qs, rng.randint(1, n)))
        dfa = Nfa(tuple(qs), ("a", "b"), frozenset({"0"}), acc, trans)
        prefix = "".join(rng.choice("ab") for _ in range(rng.randint(0, 3)))
        loop = "".join(rng.choice("ab") for _ in range(rng.randint(1, 3)))
        word = prefix + loop
        nxt = [i + 1 if i + 1 < len(word) else len(prefix) for i in range(len(word))]
        m = Lts([str(i) for i in range(len(word))], ["a", "b"],
                [(str(i), c, str(nxt[i])) for i, c in enumerate(word)])
        got = evaluate(unbounded_infix(dfa), m)
        want = {str(i) for i in range(len(word)) if _infix_oracle(m, word, len(prefix), dfa, i)}
        assert got == want, (prefix, loop, sorted(trans), acc)


def test_unbounded_a_infixes():
    from ctdmu.syntax import Nfa, unbounded_infix
    a_star = Nfa(("0", "1"), ("a", "b"), frozenset({"0"}), frozenset({"0"}),
                 frozenset({("0", "a", "0"), ("0", "b", "1"), ("1", "a", "1"), ("1", "b", "1")}))
    f = unbounded_infix(a_star)
    assert evaluate(f, build_lasso("b", "a")) == {"0", "1"}
    assert evaluate(f, build_lasso("aaaa", "b")) == set()
