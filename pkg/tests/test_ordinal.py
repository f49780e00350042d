import itertools

import pytest
from hypothesis import given, strategies as st

from ctdmu.ordinal import (
    INF, OMEGA, ZERO, Ordinal, OrdinalError, add, compare, format_ordinal,
    left_subtract, mul, parse_ordinal,
)

W = OMEGA


def o(s):
    return parse_ordinal(s)


# Order-type oracle: a well order is written as a list of blocks, each block a
# copy of w^e.  Reading blocks left to right, a block is swallowed whenever a
# later block has a strictly bigger exponent (w^e + w^f = w^f for e < f).  The
# surviving blocks, grouped, give the Cantor normal form of the order type.

def blocks(a):
    return [e for e, c in a.terms for _ in range(c)]


def order_type(bs):
    survivors = []
    for i, e in enumerate(bs):
        if all(f <= e for f in bs[i + 1:]):
            survivors.append(e)
    terms = []
    for e, grp in itertools.groupby(survivors):
        terms.append((e, len(list(grp))))
    return Ordinal(tuple(terms))


def product_blocks(a, b):
    # lexicographic product: b-many copies of a, one block of b at a time.
    # w^f copies of a (f >= 1) form a single block w^(deg a + f).
    out = []
    if a.is_zero:
        return out
    for f in blocks(b):
        if f == 0:
            out.extend(blocks(a))
        else:
            out.append(a.degree + f)
    return out


small = st.builds(
    lambda c2, c1, c0: Ordinal(tuple((e, c) for e, c in ((2, c2), (1, c1), (0, c0)) if c)),
    st.integers(0, 4), st.integers(0, 4), st.integers(0, 4),
)


def test_compare_examples():
    assert compare(W, Ordinal.of(5)) == 1
    assert compare(W + 1, W) == 1
    assert compare(o("w^2*2+3"), o("w^2*2+3")) == 0


def test_add_examples():
    assert add(Ordinal.of(1), W) == W
    assert add(W, Ordinal.of(1)) == o("w+1")
    assert add(o("w*2+3"), o("w+5")) == o("w*3+5")
    assert order_type(blocks(o("w*2+3")) + blocks(o("w+5"))) == o("w*3+5")


def test_mul_examples():
    assert mul(o("w+3"), Ordinal.of(2)) == o("w*2+3")
    assert order_type(product_blocks(o("w+3"), Ordinal.of(2))) == o("w*2+3")
    assert mul(Ordinal.of(2), W) == W
    assert mul(W, W) == o("w^2")


def test_left_subtract_examples():
    assert left_subtract(W, o("w*2")) == W
    assert left_subtract(Ordinal.of(3), Ordinal.of(5)) == Ordinal.of(2)
    with pytest.raises(OrdinalError):
        left_subtract(Ordinal.of(5), Ordinal.of(3))


@given(small, small)
def test_add_matches_order_type(a, b):
    assert add(a, b) == order_type(blocks(a) + blocks(b))


@given(small, small)
def test_mul_matches_order_type(a, b):
    assert mul(a, b) == order_type(product_blocks(a, b))


@given(small, small, small)
def test_add_associative(a, b, c):
    assert add(add(a, b), c) == add(a, add(b, c))


@given(small, small, small)
def test_mul_left_distributes(a, b, c):
    assert mul(a, add(b, c)) == add(mul(a, b), mul(a, c))


@given(small, small)
def test_total_order_and_subtraction(a, b):
    lo, hi = sorted([a, b])
    assert compare(lo, hi) <= 0
    assert add(lo, left_subtract(lo, hi)) == hi


@given(small)
def test_limit_xor_successor(a):
    if not a.is_zero:
        assert a.is_limit != a.is_successor
    assert a < INF


@given(small)
def test_literal_round_trip(a):
    assert parse_ordinal(format_ordinal(a)) == a


def test_literals_and_predecessor():
    assert format_ordinal(ZERO) == "0"
    assert format_ordinal(o("w^2*3+w+4")) == "w^2*3+w+4"
    assert parse_ordinal("inf") is INF
    assert o("w+4").predecessor() == o("w+3")
    with pytest.raises(OrdinalError):
        W.predecessor()
    with pytest.raises(ValueError):
        parse_ordinal("w^")
    assert INF > o("w^9") and not INF < INF
