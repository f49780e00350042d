"""Evaluation of countdown formulas over finite models.

Point sets are Python ints used as bitmasks over ``Lts.points``.  The
approximant of a successor stage is computed as ``F(previous)``, which equals
the join over all earlier stages because the chain is monotone.  A bound with
a transfinite term behaves like INF on a finite model, since every chain
stabilises after at most ``|M| * n`` strict steps.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

from .model import Lts, ModelError, check_valuation
from .ordinal import INF
from .syntax import (
    And, Bot, Box, Diamond, Fix, Formula, MU, Or, Top, Var, actions, analyze,
    free_vars, hat_transform,
)


class EvalError(ValueError):
    pass


def _finite_limit(bound):
    """Number of iterations for a bound, or None for 'until stable'."""
    if bound is INF or not bound.is_finite:
        return None
    return int(bound)


class _Evaluator:
    def __init__(self, m: Lts):
        self.m = m
        self.memo = {}

    def run(self, f, env):
        fv = free_vars(f)
        key = (id(f), tuple(sorted((x, env[x]) for x in fv)))
        hit = self.memo.get(key)
        if hit is not None and hit[0] is f:
            return hit[1]
        out = self._eval(f, env)
        self.memo[key] = (f, out)
        return out

    def _eval(self, f, env):
        m = self.m
        if isinstance(f, Var):
            return env[f.name]
        if isinstance(f, Top):
            return m.full
        if isinstance(f, Bot):
            return 0
        if isinstance(f, Or):
            return self.run(f.left, env) | self.run(f.right, env)
        if isinstance(f, And):
            return self.run(f.left, env) & self.run(f.right, env)
        if isinstance(f, (Diamond, Box)):
            s = self.run(f.body, env)
            succ = m.succ[f.action]
            out = 0
            if isinstance(f, Diamond):
                for i, mask in enumerate(succ):
                    if mask & s:
                        out |= 1 << i
            else:
                for i, mask in enumerate(succ):
                    if mask & ~s == 0:
                        out |= 1 << i
            return out
        vec = self.fixpoint(f, env)[-1]
        return vec[f.index - 1]

    def step(self, f: Fix, env, vec):
        inner = dict(env)
        inner.update(zip(f.vars, vec))
        return tuple(self.run(b, inner) for b in f.bodies)

    def fixpoint(self, f: Fix, env, up_to=None):
        """Approximant chain; stops at the bound, at ``up_to`` or on stabilisation."""
        start = 0 if f.kind == MU else self.m.full
        chain = [tuple(start for _ in f.vars)]
        limit = _finite_limit(f.bound)
        if up_to is not None:
            limit = up_to if limit is None else min(limit, up_to)
        while limit is None or len(chain) <= limit:
            nxt = self.step(f, env, chain[-1])
            if nxt == chain[-1]:
                break
            chain.append(nxt)
        return chain


def _prepare(f: Formula, m: Lts, val):
    check_valuation(m, val)
    missing = free_vars(f) - set(val)
    if missing:
        raise EvalError(f"unbound free variable(s): {', '.join(sorted(missing))}")
    bad = actions(f) - set(m.actions)
    if bad:
        raise EvalError(f"unknown action(s): {', '.join(sorted(bad))}")
    return {x: m.to_mask(pts) for x, pts in val.items()}


def eval_mask(f: Formula, m: Lts, val=None) -> int:
    env = _prepare(f, m, val or {})
    return _Evaluator(m).run(f, env)


def evaluate(f: Formula, m: Lts, val=None) -> frozenset:
    """The set of points of ``m`` satisfying ``f`` under ``val``."""
    return m.to_set(eval_mask(f, m, val))


@dataclass
class Chain:
    stages: list  # list of tuples of frozensets
    closure_index: Optional[int]


def approximant_chain(fix: Fix, m: Lts, val=None, up_to: int = 10) -> Chain:
    """Stages 0..up_to of the chain of ``fix`` (its own bound is ignored).

    ``closure_index`` is the least n with stage n equal to stage n+1, when it
    occurs within the computed range.
    """
    env = _prepare(fix, m, val or {})
    ev = _Evaluator(m)
    start = 0 if fix.kind == MU else m.full
    stages = [tuple(start for _ in fix.vars)]
    closure = None
    for _ in range(up_to):
        nxt = ev.step(fix, env, stages[-1])
        if closure is None and nxt == stages[-1]:
            closure = len(stages) - 1
        stages.append(nxt)
    if closure is None and ev.step(fix, env, stages[-1]) == stages[-1]:
        closure = len(stages) - 1
    return Chain([tuple(m.to_set(s) for s in st) for st in stages], closure)


def model_check(f: Formula, m: Lts, val=None, point: str = None) -> bool:
    if point not in m.index:
        raise ModelError(f"unknown point {point!r}")
    return bool(eval_mask(f, m, val) >> m.index[point] & 1)


@dataclass
class SatResult:
    satisfiable: bool
    model: Optional[Lts]
    point: Optional[str]
    max_points: int
    note: str = ""


def all_models(n: int, acts):
    pts = [str(i) for i in range(n)]
    triples = [(s, a, t) for s in pts for a in acts for t in pts]
    for bits in range(1 << len(triples)):
        yield Lts(pts, acts, [tr for k, tr in enumerate(triples) if bits >> k & 1])


def sat_search_bounded(f: Formula, max_points: int) -> SatResult:
    """Exhaustive search over labelled models with 1..max_points points."""
    if free_vars(f):
        raise EvalError("satisfiability search expects a sentence")
    acts = sorted(actions(f))
    for n in range(1, max_points + 1):
        for m in all_models(n, acts):
            mask = eval_mask(f, m)
            if mask:
                p = m.points[(mask & -mask).bit_length() - 1]
                return SatResult(True, m, p, max_points)
    note = ""
    if analyze(f).is_positive_countdown:
        note = ("positive countdown: the formula is satisfiable iff its INF-bounded "
                "variant is; a negative answer here is only up to the searched size")
    return SatResult(False, None, None, max_points, note)


def hat_agrees(f: Formula, m: Lts, val=None) -> bool:
    return eval_mask(f, m, val) == eval_mask(hat_transform(f), m, val)


def iter_points(mask: int):
    for i in itertools.count():
        if mask >> i == 0:
            return
        if mask >> i & 1:
            yield i
