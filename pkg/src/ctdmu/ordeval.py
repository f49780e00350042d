"""Symbolic evaluation over ordinal models.

An ordinal model of height ``h`` has the ordinals below ``h`` as points and
a single action with ``alpha -> beta`` iff ``alpha > beta``.  Subsets are kept
as finite unions of half-open intervals.  The symbolic height ``TOP`` stands
for the first uncountable ordinal; it is never reached by ordinal
arithmetic, so it only occurs as a right endpoint.

Fixpoints with bound ``w`` are evaluated by iterating the approximant chain
and guessing its limit once a window of steps moves every endpoint by the
same amount.  Bound ``inf`` repeats this across limit stages; a candidate is
only accepted once it is an actual fixpoint, which is decisive because a
guarded system has a unique fixpoint on a well-founded model.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

from .ordinal import (
    INF, OMEGA, ZERO, Ordinal, OrdinalError, add, format_ordinal, left_subtract, mul,
    parse_ordinal,
)
from .syntax import (
    MU, And, Bot, Box, Diamond, Fix, Formula, Or, Top, Var, actions, free_vars, fresh_name,
    is_guarded_formula, nesting,
)


class LimitUndetected(RuntimeError):
    """The limit heuristic gave up; the input is outside what it handles."""


class OrdevalError(ValueError):
    pass


@total_ordering
class _Top:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __lt__(self, other):
        return False

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("TOP")

    def __str__(self):
        return "T"

    def __repr__(self):
        return "TOP"

    def __reduce__(self):
        return (_Top, ())


TOP = _Top()


def _text(x) -> str:
    return "T" if x is TOP else format_ordinal(x)


@dataclass(frozen=True)
class OrdinalModel:
    height: object = TOP  # TOP or a nonzero Ordinal

    def __post_init__(self):
        if self.height is not TOP and (not isinstance(self.height, Ordinal) or self.height.is_zero):
            raise OrdevalError("height must be TOP or a positive ordinal")

    def __str__(self):
        return "w1" if self.height is TOP else format_ordinal(self.height)


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, disjoint, non-adjacent intervals ``[lo, hi)`` below ``height``."""

    intervals: tuple = ()
    height: object = TOP

    def __post_init__(self):
        prev = None
        for lo, hi in self.intervals:
            if not lo < hi or hi > self.height:
                raise OrdevalError(f"bad interval [{_text(lo)},{_text(hi)})")
            if prev is not None and not prev < lo:
                raise OrdevalError("intervals must be sorted and non-adjacent")
            prev = hi

    @classmethod
    def build(cls, pairs, height=TOP) -> IntervalSet:
        """Normalize arbitrary pairs: clip, drop empties, merge overlaps."""
        clipped = []
        for lo, hi in pairs:
            hi = min(hi, height)
            if lo < hi:
                clipped.append((lo, hi))
        clipped.sort(key=lambda p: (p[0], 0))
        out = []
        for lo, hi in clipped:
            if out and not out[-1][1] < lo:
                if out[-1][1] < hi:
                    out[-1] = (out[-1][0], hi)
            else:
                out.append((lo, hi))
        return cls(tuple(out), height)

    @classmethod
    def empty(cls, height=TOP) -> IntervalSet:
        return cls((), height)

    @classmethod
    def full(cls, height=TOP) -> IntervalSet:
        return cls(((ZERO, height),), height)

    @classmethod
    def ray(cls, lo, height=TOP) -> IntervalSet:
        return cls.build([(lo, height)], height)

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def is_full(self) -> bool:
        return self.intervals == ((ZERO, self.height),)

    def __contains__(self, alpha) -> bool:
        return any(lo <= alpha < hi for lo, hi in self.intervals)

    def endpoints(self) -> list:
        return [x for pair in self.intervals for x in pair]

    def stable_from(self):
        """Least boundary above which the set is constant (all in or all out)."""
        pts = [x for x in self.endpoints() if x is not self.height]
        return max(pts, default=ZERO)

    def is_stable_above(self, alpha) -> bool:
        return self.stable_from() <= alpha

    def __str__(self):
        if not self.intervals:
            return "{}"
        return " ∪ ".join(f"[{_text(lo)},{_text(hi)})" for lo, hi in self.intervals)


EMPTY = IntervalSet.empty()
FULL = IntervalSet.full()


def _check_same(a: IntervalSet, b: IntervalSet):
    if a.height != b.height:
        raise OrdevalError("interval sets over different heights")


def union(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    _check_same(a, b)
    return IntervalSet.build(a.intervals + b.intervals, a.height)


def complement(a: IntervalSet) -> IntervalSet:
    out = []
    cur = ZERO
    for lo, hi in a.intervals:
        if cur < lo:
            out.append((cur, lo))
        cur = hi
    if cur is not a.height and cur < a.height:
        out.append((cur, a.height))
    return IntervalSet(tuple(out), a.height)


def intersection(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    _check_same(a, b)
    out = []
    i = j = 0
    x, y = a.intervals, b.intervals
    while i < len(x) and j < len(y):
        lo = max(x[i][0], y[j][0])
        hi = min(x[i][1], y[j][1])
        if lo < hi:
            out.append((lo, hi))
        if x[i][1] < y[j][1]:
            i += 1
        else:
            j += 1
    return IntervalSet(tuple(out), a.height)


def set_algebra(op: str, a: IntervalSet, b: IntervalSet = None) -> IntervalSet:
    if op == "union":
        return union(a, b)
    if op == "intersection":
        return intersection(a, b)
    if op == "complement":
        return complement(a)
    raise OrdevalError(f"unknown set operation {op!r}")


def diamond(s: IntervalSet) -> IntervalSet:
    """Points with some smaller point in ``s``."""
    if s.is_empty:
        return s
    return IntervalSet.ray(s.intervals[0][0].successor(), s.height)


def box(s: IntervalSet) -> IntervalSet:
    """Points all of whose smaller points lie in ``s``."""
    if s.is_full:
        return s
    lo, hi = s.intervals[0] if s.intervals else (None, None)
    gap = hi if lo == ZERO else ZERO  # least ordinal outside s
    return IntervalSet.build([(ZERO, gap.successor())], s.height)


def modal_ops(op: str, s: IntervalSet) -> IntervalSet:
    if op == "diamond":
        return diamond(s)
    if op == "box":
        return box(s)
    raise OrdevalError(f"unknown modal operation {op!r}")


_IV = re.compile(r"\[([^,\[\]]+),([^,\[\]]+)\)")


def parse_height(text: str):
    t = text.strip()
    if t in ("w1", "T", "top"):
        return TOP
    return parse_ordinal(t)


def parse_interval_set(text: str, height=TOP) -> IntervalSet:
    """Read ``[a,b) u [c,T)``; ``{}`` is the empty set."""
    t = text.strip()
    if t in ("{}", "", "∅"):
        return IntervalSet.empty(height)
    pieces = re.split(r"\s*(?:∪|u|U|\|)\s*", t)
    pairs = []
    for p in pieces:
        m = _IV.fullmatch(p.strip())
        if m is None:
            raise OrdevalError(f"bad interval {p!r}")
        lo = parse_ordinal(m.group(1))
        hi_text = m.group(2).strip()
        hi = height if hi_text in ("T", "w1", "top") else parse_ordinal(hi_text)
        if lo is INF or hi is INF:
            raise OrdevalError("inf is not a point")
        pairs.append((lo, hi))
    return IntervalSet.build(pairs, height)


# -- evaluation ----------------------------------------------------------

def _flat(stage):
    return [s.endpoints() for s in stage]


def _guess_limit(window, height, to_top=False):
    """Limit of a chain whose endpoints move by constant steps, or None.

    ``window`` is a list of stage tuples.  Each endpoint must advance by the
    same left difference delta at every step; the guess replaces it by
    ``e + delta * w`` (or by the height with ``to_top``).
    """
    shapes = [[len(s.intervals) for s in st] for st in window]
    if any(sh != shapes[0] for sh in shapes):
        return None
    flats = [_flat(st) for st in window]
    comps = []
    moved = False
    for c in range(len(window[0])):
        ends = []
        for k in range(len(flats[0][c])):
            seq = [f[c][k] for f in flats]
            if all(x is TOP for x in seq):
                ends.append(TOP)
                continue
            if any(x is TOP for x in seq):
                return None
            try:
                deltas = [left_subtract(seq[i], seq[i + 1]) for i in range(len(seq) - 1)]
            except OrdinalError:
                return None
            if any(d != deltas[0] for d in deltas):
                return None
            if deltas[0].is_zero:
                ends.append(seq[-1])
            else:
                moved = True
                ends.append(height if to_top else _clip(add(seq[-1], mul(deltas[0], OMEGA)), height))
        pairs = [(ends[i], ends[i + 1]) for i in range(0, len(ends), 2)]
        comps.append(IntervalSet.build(pairs, height))
    if not moved:
        return None
    return tuple(comps)


def _clip(x, height):
    return height if height is not TOP and not x < height else x


def _subset(a, b):
    return all(intersection(x, y) == x for x, y in zip(a, b))


class _OrdEvaluator:
    def __init__(self, model: OrdinalModel, window=8, high_window=3, levels=4, max_steps=400):
        self.h = model.height
        self.window = window
        self.high_window = high_window
        self.levels = levels
        self.max_steps = max_steps
        self.memo = {}

    def ev(self, f: Formula, env: dict) -> IntervalSet:
        fv = free_vars(f)
        key = (id(f), tuple(sorted((x, env[x]) for x in fv if x in env)))
        hit = self.memo.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        out = self._ev(f, env)
        self.memo[key] = (f, out)
        return out

    def _ev(self, f, env):
        h = self.h
        if isinstance(f, Var):
            if f.name not in env:
                raise OrdevalError(f"unbound variable {f.name}")
            return env[f.name]
        if isinstance(f, Top):
            return IntervalSet.full(h)
        if isinstance(f, Bot):
            return IntervalSet.empty(h)
        if isinstance(f, Or):
            return union(self.ev(f.left, env), self.ev(f.right, env))
        if isinstance(f, And):
            return intersection(self.ev(f.left, env), self.ev(f.right, env))
        if isinstance(f, Diamond):
            return diamond(self.ev(f.body, env))
        if isinstance(f, Box):
            return box(self.ev(f.body, env))
        if isinstance(f, Fix):
            return self.fix(f, env)[f.index - 1]
        raise OrdevalError(f"unknown node {f!r}")

    def fix(self, f: Fix, env):
        h = self.h
        start = IntervalSet.empty(h) if f.kind == MU else IntervalSet.full(h)
        stage = tuple(start for _ in f.vars)

        def step(st):
            inner = dict(env)
            inner.update(zip(f.vars, st))
            return tuple(self.ev(b, inner) for b in f.bodies)

        if f.bound is INF:
            tag, out = self._advance(stage, self.levels, step, True)
            if tag == "fix":
                return out
            raise LimitUndetected(f"no fixpoint found for {f}")
        n = f.bound
        if n.is_finite:
            for _ in range(int(n)):
                nxt = step(stage)
                if nxt == stage:
                    break
                stage = nxt
            return stage
        if n != OMEGA:
            raise OrdevalError(f"bound {format_ordinal(n)} is not finite, w or inf")
        tag, out = self._advance(stage, 1, step, False)
        return out

    def _advance(self, stage, level, step, need_fix):
        """Stage ``w^level`` steps later, or a fixpoint reached before that."""
        if level == 0:
            nxt = step(stage)
            return ("fix", stage) if nxt == stage else ("stage", nxt)
        w = self.window if level == 1 else self.high_window
        seq = [stage]
        for _ in range(self.max_steps if level == 1 else 4 * w):
            tag, nxt = self._advance(seq[-1], level - 1, step, need_fix)
            if tag == "fix":
                return tag, nxt
            seq.append(nxt)
            for stride in (1, 2, 3):
                got = self._try_window(seq, w, stride, step, need_fix)
                if got is not None:
                    return got
        raise LimitUndetected("no limit pattern within the step budget")

    def _try_window(self, seq, w, stride, step, need_fix):
        # periodic chains are sampled every ``stride`` steps
        if len(seq) <= w * stride:
            return None
        win = seq[-(w * stride + 1)::stride]
        decreasing = _subset(win[-1], win[0])
        guess = _guess_limit(win, self.h)
        if guess is None:
            return None
        if decreasing:
            ok = all(_subset(guess, s) for s in seq[-(w * stride + 1):])
        else:
            ok = all(_subset(s, guess) for s in seq[-(w * stride + 1):])
        if not ok:
            return None
        if need_fix:
            if step(guess) == guess:
                return "fix", guess
            top = _guess_limit(win, self.h, to_top=True)
            if top is not None and step(top) == top:
                return "fix", top
        return "stage", guess


def _check_fragment(f: Formula):
    if len(actions(f)) > 1:
        raise OrdevalError("ordinal models carry a single action")
    from .syntax import bounds as _bounds
    for b in _bounds(f):
        if b is not INF and not (b.is_finite or b == OMEGA):
            raise OrdevalError(f"bound {format_ordinal(b)} is not finite, w or inf")


def eval_ordinal(f: Formula, model: OrdinalModel = None, val=None, window=8, levels=4) -> IntervalSet:
    model = model or OrdinalModel()
    _check_fragment(f)
    val = dict(val or {})
    for x, s in val.items():
        if s.height != model.height:
            raise OrdevalError(f"valuation of {x} lives over another height")
    missing = free_vars(f) - set(val)
    if missing:
        raise OrdevalError(f"valuation misses {sorted(missing)}")
    if not is_guarded_formula(f):
        from .automata import guard
        f = guard(f)
    return _OrdEvaluator(model, window=window, levels=levels).ev(f, val)


# -- stabilization bound -----------------------------------------------------

def _hollow(body: Formula, xs: frozenset, thetas: list) -> Formula:
    """Replace maximal subformulas free of ``xs`` (and of inner binders) by fresh variables."""
    from .syntax import map_children

    def go(g, bad):
        if not (free_vars(g) & bad):
            if isinstance(g, (Top, Bot)):
                return g
            y = fresh_name("y", ())
            thetas.append(g)
            return Var(y)
        if isinstance(g, Fix):
            inner = bad | set(g.vars)
            return Fix(g.kind, g.bound, g.index, g.vars, [go(b, inner) for b in g.bodies])
        return map_children(g, lambda c: go(c, bad))

    return [go(b, frozenset(xs)) for b in body]


def stabilization_bound(f: Formula, t_max: int = 2) -> Ordinal:
    """An ordinal above which ``f`` is stable relative to its valuation."""
    if t_max < 1:
        raise OrdevalError("t_max must be positive")
    _check_fragment(f)
    if not is_guarded_formula(f):
        from .automata import guard
        f = guard(f)
    return _bound(f, t_max)


def _bound(f, t_max):
    if isinstance(f, (Var, Top, Bot)):
        return ZERO
    if isinstance(f, (Or, And)):
        return max(_bound(f.left, t_max), _bound(f.right, t_max))
    if isinstance(f, (Diamond, Box)):
        return _bound(f.body, t_max).successor()
    if isinstance(f, Fix):
        n = len(f.vars)
        if f.bound is INF:
            a_max = max(_bound(b, t_max) for b in f.bodies)
            return mul(a_max, Ordinal.of(t_max * n))
        thetas = []
        hollow = _hollow(f.bodies, frozenset(f.vars), thetas)
        a_theta = max((_bound(t, t_max) for t in thetas), default=ZERO)
        a_psi = max(_bound(b, t_max) for b in hollow)
        times = OMEGA if f.bound == OMEGA else f.bound
        return add(a_theta, mul(a_psi, times))
    raise OrdevalError(f"unknown node {f!r}")


def hierarchy_sentence(k: int, action: str = "a") -> Formula:
    """``nu^w x1 ... nu^w xk . <a>(x1 & ... & xk)``, true exactly on ``[w^k, T)``."""
    from .syntax import big_and, nu
    names = [f"x{i}" for i in range(1, k + 1)]
    f = Diamond(action, big_and([Var(x) for x in names]))
    for x in reversed(names):
        f = nu(x, f, OMEGA)
    return f


def countdown_nesting(f: Formula) -> int:
    return nesting(f)
