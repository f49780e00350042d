import random

import pytest
from hypothesis import given, settings, strategies as st

from ctdmu.fuzz import monomodal_sentence
from ctdmu.model import build_ordinal_prefix
from ctdmu.ordeval import (
    TOP, IntervalSet, LimitUndetected, OrdevalError, OrdinalModel, eval_ordinal,
    hierarchy_sentence, modal_ops, parse_height, parse_interval_set, set_algebra,
    stabilization_bound,
)
from ctdmu.ordinal import INF, OMEGA, Ordinal
from ctdmu.semantics import evaluate
from ctdmu.syntax import Var, nesting, parse

N = Ordinal.of
W2 = Ordinal.omega_power(2)


def iv(text, height=TOP):
    return parse_interval_set(text, height)


def test_set_algebra_examples():
    assert set_algebra("union", iv("[0,5)"), iv("[5,T)")) == IntervalSet.full()
    assert set_algebra("complement", iv("[w,T)")) == iv("[0,w)")
    assert set_algebra("intersection", iv("[0,w^2)"), iv("[w,T)")) == iv("[w,w^2)")
    assert str(iv("[0,1) u [w,T)")) == "[0,1) ∪ [w,T)"
    assert str(IntervalSet.empty()) == "{}"


def test_normalization_rejects_adjacent():
    with pytest.raises(OrdevalError):
        IntervalSet(((N(0), N(2)), (N(2), N(3))))
    assert IntervalSet.build([(N(0), N(2)), (N(2), N(3))]) == iv("[0,3)")


def _members(s, upto=10):
    return {i for i in range(upto) if N(i) in s}


def test_modal_ops_pointwise():
    for text in ["[5,T)", "[1,T)", "[0,3) u [4,T)", "[2,4)", "{}", "[0,T)"]:
        s = iv(text)
        mem = _members(s, 12)
        dia = _members(modal_ops("diamond", s), 11)
        box = _members(modal_ops("box", s), 11)
        assert dia == {a for a in range(11) if any(b < a for b in mem)}
        assert box == {a for a in range(11) if all(b in mem for b in range(a))}
    assert modal_ops("diamond", iv("[5,T)")) == iv("[6,T)")
    assert modal_ops("box", iv("[1,T)")) == iv("[0,1)")


_endpoint = st.sampled_from([N(0), N(1), N(2), N(5), OMEGA, OMEGA + 1, Ordinal.omega_power(1, 2), W2])


@st.composite
def interval_sets(draw):
    pts = sorted(set(draw(st.lists(_endpoint, max_size=6))))
    pairs = [(pts[i], pts[i + 1]) for i in range(0, len(pts) - 1, 2)]
    if draw(st.booleans()) and len(pts) % 2:
        pairs.append((pts[-1], TOP))
    return IntervalSet.build(pairs)


@settings(max_examples=200, deadline=None)
@given(interval_sets(), interval_sets(), interval_sets())
def test_boolean_laws(a, b, c):
    u, i, comp = (lambda x, y: set_algebra("union", x, y),
                  lambda x, y: set_algebra("intersection", x, y),
                  lambda x: set_algebra("complement", x))
    assert u(a, b) == u(b, a) and i(a, b) == i(b, a)
    assert i(a, u(b, c)) == u(i(a, b), i(a, c))
    assert comp(u(a, b)) == i(comp(a), comp(b))
    assert comp(comp(a)) == a
    assert u(a, comp(a)) == IntervalSet.full() and i(a, comp(a)) == IntervalSet.empty()


def test_hierarchy_sentences():
    for k in (1, 2, 3):
        assert eval_ordinal(hierarchy_sentence(k)) == IntervalSet.ray(Ordinal.omega_power(k))


def test_well_founded():
    assert eval_ordinal(parse("mu x. [a] x"), OrdinalModel(W2)).is_full
    assert eval_ordinal(parse("nu x. <a> x")).is_empty


def test_concrete_height_clips():
    assert eval_ordinal(parse("nu^w x. <a> x"), OrdinalModel(W2)) == iv("[w,w^2)", W2)
    assert eval_ordinal(parse("nu^w x. <a> x"), OrdinalModel(N(5))).is_empty


def test_valuation_and_errors():
    val = {"y": iv("[w,T)")}
    assert eval_ordinal(parse("<a> y"), val=val) == iv("[w+1,T)")
    with pytest.raises(OrdevalError):
        eval_ordinal(parse("<a> y"))
    with pytest.raises(OrdevalError):
        eval_ordinal(parse("<a> tt & <b> tt"))
    with pytest.raises(OrdevalError):
        eval_ordinal(parse("nu^w*2 x. <a> x"))


def test_prefix_consistency_finite_heights():
    # an explicit finite ordinal model is the oracle
    rng = random.Random(7)
    for _ in range(300):
        f = monomodal_sentence(rng)
        h = rng.randint(1, 12)
        got = eval_ordinal(f, OrdinalModel(N(h)))
        want = evaluate(f, build_ordinal_prefix(h))
        assert {str(i) for i in range(h) if N(i) in got} == want


def test_prefix_consistency_of_top_for_finite_bounds():
    rng = random.Random(8)
    for _ in range(200):
        f = monomodal_sentence(rng, bounds=(N(1), N(2), N(3)))
        top = eval_ordinal(f)
        h = rng.randint(1, 15)
        assert {str(i) for i in range(h) if N(i) in top} == evaluate(f, build_ordinal_prefix(h))


def test_stabilization_bound_examples():
    assert stabilization_bound(parse("<a> x")) == N(1)
    assert stabilization_bound(Var("x")) == N(0)
    b = stabilization_bound(hierarchy_sentence(2), t_max=5)
    assert b < Ordinal.omega_power(3)
    assert stabilization_bound(parse("nu x. <a> x"), t_max=3) == N(3)


def test_stabilization_bound_holds():
    rng = random.Random(9)
    for _ in range(200):
        f = monomodal_sentence(rng)
        b = stabilization_bound(f)
        assert b < Ordinal.omega_power(nesting(f) + 1)
        assert eval_ordinal(f).is_stable_above(b)


def test_limit_undetected_is_an_error_type():
    assert issubclass(LimitUndetected, RuntimeError)


def test_parse_height():
    assert parse_height("w1") is TOP
    assert parse_height("w^2") == W2
