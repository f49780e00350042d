"""Formulas of the vectorial countdown mu-calculus.

Nodes are immutable and compare structurally.  The identity of an
*occurrence* is its path from the root (a tuple of child indices), which is
what :func:`occurrences` yields; nodes themselves carry no position, so the
same subtree object may safely appear twice in a formula.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

from .ordinal import INF, ZERO, CountdownBound, Ordinal, format_ordinal, parse_ordinal

MU = "mu"
NU = "nu"


class FormulaError(ValueError):
    pass


class ParseError(FormulaError):
    def __init__(self, msg, pos):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


class Formula:
    __slots__ = ("_hash",)

    def children(self):
        return ()

    def __hash__(self):
        try:
            return self._hash
        except AttributeError:
            h = hash((type(self).__name__,) + self._key())
            object.__setattr__(self, "_hash", h)
            return h

    def __eq__(self, other):
        if self is other:
            return True
        if type(self) is not type(other) or hash(self) != hash(other):
            return False
        return self._key() == other._key()

    def __setattr__(self, k, v):
        raise AttributeError("formulas are immutable")

    def __str__(self):
        return to_text(self)

    def __repr__(self):
        return f"<{type(self).__name__} {to_text(self)}>"

    def _key(self):
        return ()


def _init(obj, **kw):
    for k, v in kw.items():
        object.__setattr__(obj, k, v)


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        _init(self, name=name)

    def _key(self):
        return (self.name,)


class Top(Formula):
    __slots__ = ()


class Bot(Formula):
    __slots__ = ()


TT = Top()
FF = Bot()


class _Binary(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        _init(self, left=left, right=right)

    def children(self):
        return (self.left, self.right)

    def _key(self):
        return (self.left, self.right)


class Or(_Binary):
    __slots__ = ()


class And(_Binary):
    __slots__ = ()


class _Modal(Formula):
    __slots__ = ("action", "body")

    def __init__(self, action: str, body: Formula):
        _init(self, action=action, body=body)

    def children(self):
        return (self.body,)

    def _key(self):
        return (self.action, self.body)


class Diamond(_Modal):
    __slots__ = ()


class Box(_Modal):
    __slots__ = ()


class Fix(Formula):
    """``kind^bound_index (vars).(bodies)``; ``index`` is 1-based."""

    __slots__ = ("kind", "bound", "index", "vars", "bodies")

    def __init__(self, kind, bound, index, vars, bodies):
        vars = tuple(vars)
        bodies = tuple(bodies)
        if kind not in (MU, NU):
            raise FormulaError(f"unknown fixpoint kind {kind!r}")
        if not vars or len(vars) != len(bodies):
            raise FormulaError("arity mismatch between variables and bodies")
        if len(set(vars)) != len(vars):
            raise FormulaError("duplicate bound variable")
        if not 1 <= index <= len(vars):
            raise FormulaError(f"index {index} out of range 1..{len(vars)}")
        if bound is not INF and not isinstance(bound, Ordinal):
            raise FormulaError(f"bad bound {bound!r}")
        _init(self, kind=kind, bound=bound, index=index, vars=vars, bodies=bodies)

    @classmethod
    def scalar(cls, kind, bound, var, body):
        return cls(kind, bound, 1, (var,), (body,))

    @property
    def is_scalar(self):
        return len(self.vars) == 1

    @property
    def body(self):
        """The body selected by the index."""
        return self.bodies[self.index - 1]

    def children(self):
        return self.bodies

    def with_index(self, i):
        return Fix(self.kind, self.bound, i, self.vars, self.bodies)

    def _key(self):
        return (self.kind, self.bound, self.index, self.vars, self.bodies)


def mu(var, body, bound=INF):
    return Fix.scalar(MU, bound, var, body)


def nu(var, body, bound=INF):
    return Fix.scalar(NU, bound, var, body)


def big_or(items):
    items = list(items)
    if not items:
        return FF
    out = items[0]
    for f in items[1:]:
        out = Or(out, f)
    return out


def big_and(items):
    items = list(items)
    if not items:
        return TT
    out = items[0]
    for f in items[1:]:
        out = And(out, f)
    return out


# -- traversal --------------------------------------------------------

def occurrences(f: Formula, path=()):
    """Yield ``(path, node)`` for every occurrence, pre-order."""
    stack = [(path, f)]
    while stack:
        p, g = stack.pop()
        yield p, g
        kids = g.children()
        for i in range(len(kids) - 1, -1, -1):
            stack.append((p + (i,), kids[i]))


def subformula_at(f: Formula, path) -> Formula:
    for i in path:
        f = f.children()[i]
    return f


def size(f: Formula) -> int:
    return sum(1 for _ in occurrences(f))


def free_vars(f: Formula) -> frozenset:
    return _free_vars(f)


_FV_CACHE: dict = {}


def _free_vars(f):
    # keyed on id with the node kept alive inside the entry
    hit = _FV_CACHE.get(id(f))
    if hit is not None and hit[0] is f:
        return hit[1]
    if isinstance(f, Var):
        out = frozenset((f.name,))
    elif isinstance(f, Fix):
        out = frozenset().union(*map(_free_vars, f.bodies)) - set(f.vars)
    else:
        out = frozenset().union(*map(_free_vars, f.children())) if f.children() else frozenset()
    if len(_FV_CACHE) > 200_000:
        _FV_CACHE.clear()
    _FV_CACHE[id(f)] = (f, out)
    return out


def all_var_names(f: Formula) -> set:
    names = set()
    for _, g in occurrences(f):
        if isinstance(g, Var):
            names.add(g.name)
        elif isinstance(g, Fix):
            names.update(g.vars)
    return names


def actions(f: Formula) -> set:
    return {g.action for _, g in occurrences(f) if isinstance(g, _Modal)}


def bounds(f: Formula) -> list:
    return [g.bound for _, g in occurrences(f) if isinstance(g, Fix)]


# -- fresh names and substitution -------------------------------------

_fresh_counter = itertools.count(1)


def fresh_name(base: str, avoid=()) -> str:
    stem = base.split("'")[0] or "v"
    while True:
        cand = f"{stem}'{next(_fresh_counter)}"
        if cand not in avoid:
            return cand


def substitute(f: Formula, binding: dict) -> Formula:
    """Simultaneous capture-avoiding substitution of free variables."""
    binding = {k: v for k, v in binding.items()}
    if not binding:
        return f
    return _subst(f, binding)


def _subst(f, binding):
    if isinstance(f, Var):
        return binding.get(f.name, f)
    if isinstance(f, (Top, Bot)):
        return f
    if not (free_vars(f) & binding.keys()):
        return f
    if isinstance(f, Or):
        return Or(_subst(f.left, binding), _subst(f.right, binding))
    if isinstance(f, And):
        return And(_subst(f.left, binding), _subst(f.right, binding))
    if isinstance(f, Diamond):
        return Diamond(f.action, _subst(f.body, binding))
    if isinstance(f, Box):
        return Box(f.action, _subst(f.body, binding))
    # Fix
    inner = {k: v for k, v in binding.items() if k not in f.vars}
    if not inner:
        return f
    incoming = set()
    for k, v in inner.items():
        incoming |= free_vars(v)
    clash = incoming & set(f.vars)
    vars_ = list(f.vars)
    bodies = list(f.bodies)
    if clash:
        avoid = incoming | all_var_names(f) | set(inner)
        ren = {}
        for i, x in enumerate(vars_):
            if x in clash:
                y = fresh_name(x, avoid)
                avoid.add(y)
                ren[x] = Var(y)
                vars_[i] = y
        bodies = [_subst(b, ren) for b in bodies]
    bodies = [_subst(b, inner) for b in bodies]
    return Fix(f.kind, f.bound, f.index, vars_, bodies)


def rename_bound_apart(f: Formula, avoid=()) -> Formula:
    """Rename every binder to a fresh name so no name is bound twice."""
    avoid = set(avoid) | all_var_names(f)

    def go(g):
        if isinstance(g, Fix):
            new = []
            ren = {}
            for x in g.vars:
                y = fresh_name(x, avoid)
                avoid.add(y)
                new.append(y)
                ren[x] = Var(y)
            return Fix(g.kind, g.bound, g.index, new, [go(substitute(b, ren)) for b in g.bodies])
        return map_children(g, go)

    return go(f)


def map_children(f: Formula, fn) -> Formula:
    if isinstance(f, Or):
        return Or(fn(f.left), fn(f.right))
    if isinstance(f, And):
        return And(fn(f.left), fn(f.right))
    if isinstance(f, Diamond):
        return Diamond(f.action, fn(f.body))
    if isinstance(f, Box):
        return Box(f.action, fn(f.body))
    if isinstance(f, Fix):
        return Fix(f.kind, f.bound, f.index, f.vars, [fn(b) for b in f.bodies])
    return f


# -- transforms -------------------------------------------------------

def dualize(f: Formula) -> Formula:
    if isinstance(f, Top):
        return FF
    if isinstance(f, Bot):
        return TT
    if isinstance(f, Var):
        return f
    if isinstance(f, Or):
        return And(dualize(f.left), dualize(f.right))
    if isinstance(f, And):
        return Or(dualize(f.left), dualize(f.right))
    if isinstance(f, Diamond):
        return Box(f.action, dualize(f.body))
    if isinstance(f, Box):
        return Diamond(f.action, dualize(f.body))
    kind = NU if f.kind == MU else MU
    return Fix(kind, f.bound, f.index, f.vars, [dualize(b) for b in f.bodies])


def hat_transform(f: Formula) -> Formula:
    if isinstance(f, Fix):
        return Fix(f.kind, INF, f.index, f.vars, [hat_transform(b) for b in f.bodies])
    return map_children(f, hat_transform)


def successor_elimination(f: Formula) -> Formula:
    """Unfold successor bounds until every bound is 0, a limit or INF; bound 0 becomes ff/tt."""
    if isinstance(f, Fix):
        g = Fix(f.kind, f.bound, f.index, f.vars, [successor_elimination(b) for b in f.bodies])
        return _unfold(g, {})
    return map_children(f, successor_elimination)


def _unfold(g: Fix, memo):
    key = (g.bound, g.index)
    if key in memo:
        return memo[key]
    if g.bound is not INF and g.bound.is_zero:
        out = FF if g.kind == MU else TT
    elif g.bound is not INF and g.bound.is_successor:
        prev = g.bound.predecessor()
        subs = {}
        for j, x in enumerate(g.vars, start=1):
            subs[x] = _unfold(Fix(g.kind, prev, j, g.vars, g.bodies), memo)
        out = substitute(g.body, subs)
    else:
        out = g
    memo[key] = out
    return out


# -- structural analysis ----------------------------------------------

def epsilon_graph(f: Formula):
    """States (occurrence paths minus free variables) and their epsilon successors.

    Mirrors the automaton built from ``f``: binary connectives step to both
    children, a fixpoint steps to its selected body, a bound variable steps
    to the matching body of its binder.  Modal nodes have no epsilon edges.
    """
    states = []
    edges = {}

    def walk(g, path, env):
        if isinstance(g, Var):
            if g.name not in env:
                return
            binder_path, j = env[g.name]
            states.append(path)
            edges[path] = [binder_path + (j,)]
            return
        states.append(path)
        if isinstance(g, (Or, And)):
            edges[path] = [path + (0,), path + (1,)]
        elif isinstance(g, Fix):
            edges[path] = [path + (g.index - 1,)]
            env = dict(env)
            for j, x in enumerate(g.vars):
                env[x] = (path, j)
        else:
            edges[path] = []
        for i, c in enumerate(g.children()):
            walk(c, path + (i,), env)

    walk(f, (), {})
    return states, edges


def _has_cycle(states, edges):
    colour = {s: 0 for s in states}
    for s0 in states:
        if colour[s0]:
            continue
        stack = [(s0, iter(edges.get(s0, ())))]
        colour[s0] = 1
        while stack:
            s, it = stack[-1]
            for t in it:
                if t not in colour:
                    continue
                if colour[t] == 1:
                    return True
                if colour[t] == 0:
                    colour[t] = 1
                    stack.append((t, iter(edges.get(t, ()))))
                    break
            else:
                colour[s] = 2
                stack.pop()
    return False


def is_guarded_formula(f: Formula) -> bool:
    states, edges = epsilon_graph(f)
    return not _has_cycle(states, edges)


def nesting(f: Formula) -> int:
    if isinstance(f, Fix):
        inner = max(nesting(b) for b in f.bodies)
        return inner + (0 if f.bound is INF else 1)
    kids = f.children()
    return max((nesting(c) for c in kids), default=0)


@dataclass(frozen=True)
class FormulaReport:
    free_vars: frozenset = field(default_factory=frozenset)
    is_sentence: bool = True
    is_scalar: bool = True
    is_guarded: bool = True
    is_positive_countdown: bool = True
    nesting: int = 0


def analyze(f: Formula) -> FormulaReport:
    fv = free_vars(f)
    fixes = [g for _, g in occurrences(f) if isinstance(g, Fix)]
    return FormulaReport(
        free_vars=fv,
        is_sentence=not fv,
        is_scalar=all(g.is_scalar for g in fixes),
        is_guarded=is_guarded_formula(f),
        is_positive_countdown=not any(g.kind == NU and g.bound is not INF for g in fixes),
        nesting=nesting(f),
    )


# -- regular-language modalities ---------------------------------------

@dataclass(frozen=True)
class Nfa:
    """Nondeterministic automaton over an action alphabet, no epsilon moves."""

    states: tuple
    alphabet: tuple
    initial: frozenset
    accepting: frozenset
    transitions: frozenset  # of (state, action, state)

    def accepts(self, word) -> bool:
        cur = set(self.initial)
        for a in word:
            cur = {t for (s, b, t) in self.transitions if s in cur and b == a}
        return bool(cur & self.accepting)


def regex_diamond(nfa: Nfa, target: Formula, mode: str = "diamond") -> Formula:
    """``<L>target`` (mode ``diamond``) or ``[L]target`` (mode ``box``) as a classical system."""
    if not nfa.alphabet:
        raise FormulaError("empty alphabet")
    if mode not in ("diamond", "box"):
        raise FormulaError(f"unknown mode {mode!r}")
    dia = mode == "diamond"
    if not nfa.initial:
        return FF if dia else TT
    avoid = all_var_names(target)
    names = {}
    for q in nfa.states:
        names[q] = fresh_name("y", avoid)
        avoid.add(names[q])
    bodies = []
    for q in nfa.states:
        parts = [target] if q in nfa.accepting else []
        for (s, a, t) in sorted(nfa.transitions, key=repr):
            if s == q:
                parts.append((Diamond if dia else Box)(a, Var(names[t])))
        bodies.append(big_or(parts) if dia else big_and(parts))
    kind = MU if dia else NU
    vars_ = [names[q] for q in nfa.states]
    order = list(nfa.states)
    comps = [Fix(kind, INF, order.index(q) + 1, vars_, bodies) for q in sorted(nfa.initial, key=order.index)]
    return big_or(comps) if dia else big_and(comps)


def step_language(dfa: Nfa, start, targets, any_prefix=False) -> Nfa:
    """Nonempty words leading ``dfa`` from ``start`` into ``targets``, optionally after any prefix."""
    moves = {}
    for s, a, t in dfa.transitions:
        moves.setdefault((s, a), set()).add(t)
    entry = ("entry",)
    states = [entry] + list(dfa.states)
    trans = set()
    for a in dfa.alphabet:
        for t in moves.get((start, a), ()):
            trans.add((entry, a, t))
        if any_prefix:
            trans.add((entry, a, entry))
    for (s, a), ts in moves.items():
        for t in ts:
            trans.add((s, a, t))
    return Nfa(tuple(states), dfa.alphabet, frozenset({entry}), frozenset(targets), frozenset(trans))


def unbounded_infix(dfa: Nfa, bound: CountdownBound = None) -> Formula:
    """Words with arbitrarily long infixes accepted by ``dfa``, as a union of vectorial formulas.

    For each state q: nu^w_1 (x1, x2). (<G* K(qI,q)> x2, <K(q,q)> x2 & <K(q,F)> tt),
    where K(p,q) holds the nonempty words leading from p to q.
    """
    from .ordinal import OMEGA
    bound = OMEGA if bound is None else bound
    if len(dfa.initial) != 1:
        raise FormulaError("expected a deterministic automaton with one initial state")
    (q_init,) = dfa.initial
    parts = []
    for q in dfa.states:
        x1, x2 = f"u{q}_1", f"u{q}_2"
        first = regex_diamond(step_language(dfa, q_init, {q}, any_prefix=True), Var(x2))
        loop = regex_diamond(step_language(dfa, q, {q}), Var(x2))
        close = regex_diamond(step_language(dfa, q, dfa.accepting), TT)
        parts.append(Fix(NU, bound, 1, [x1, x2], [first, And(loop, close)]))
    return big_or(parts)


# -- printing ---------------------------------------------------------

def _bound_text(b):
    return "" if b is INF else "^" + format_ordinal(b)


def to_text(f: Formula) -> str:
    return _fmt(f, 0, True)


def _fmt(f, need, tail):
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Top):
        return "tt"
    if isinstance(f, Bot):
        return "ff"
    own = 1 if isinstance(f, Or) else 2 if isinstance(f, And) else 3
    wrap = own < need or (isinstance(f, Fix) and not tail)
    t = True if wrap else tail
    if isinstance(f, Or):
        s = _fmt(f.left, 1, False) + " | " + _fmt(f.right, 2, t)
    elif isinstance(f, And):
        s = _fmt(f.left, 2, False) + " & " + _fmt(f.right, 3, t)
    elif isinstance(f, Diamond):
        s = f"<{f.action}> " + _fmt(f.body, 3, t)
    elif isinstance(f, Box):
        s = f"[{f.action}] " + _fmt(f.body, 3, t)
    else:
        head = f.kind + _bound_text(f.bound)
        if f.is_scalar:
            s = f"{head} {f.vars[0]}. " + _fmt(f.bodies[0], 0, True)
        else:
            vs = ",".join(f.vars)
            bs = ", ".join(_fmt(b, 0, True) for b in f.bodies)
            s = f"{head}_{f.index} ({vs}).({bs})"
    return f"({s})" if wrap else s


# -- parsing ----------------------------------------------------------

_IDENT = re.compile(r"[A-Za-z][A-Za-z0-9']*")
_NAT = re.compile(r"\d+")
_CNF = r"(?:w(?:\s*\^\s*\d+)?(?:\s*\*\s*\d+)?|\d+)"
_ORD = re.compile(r"inf(?![A-Za-z0-9'])|" + _CNF + r"(?:\s*\+\s*" + _CNF + r")*(?![A-Za-z0-9'])")
_KEYWORDS = {"tt", "ff", "mu", "nu"}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def ws(self):
        n = len(self.text)
        while self.pos < n and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self, s):
        self.ws()
        return self.text.startswith(s, self.pos)

    def eat(self, s):
        if not self.peek(s):
            raise ParseError(f"expected {s!r}", self.pos)
        self.pos += len(s)

    def ident(self):
        self.ws()
        m = _IDENT.match(self.text, self.pos)
        if not m or m.group() in _KEYWORDS:
            raise ParseError("expected identifier", self.pos)
        self.pos = m.end()
        return m.group()

    def keyword(self):
        self.ws()
        m = _IDENT.match(self.text, self.pos)
        return m.group() if m else None

    def phi(self):
        left = self.conj()
        while self.peek("|"):
            self.pos += 1
            left = Or(left, self.conj())
        return left

    def conj(self):
        left = self.unary()
        while self.peek("&"):
            self.pos += 1
            left = And(left, self.unary())
        return left

    def unary(self):
        self.ws()
        start = self.pos
        if self.peek("<"):
            self.pos += 1
            a = self.ident()
            self.eat(">")
            return Diamond(a, self.unary())
        if self.peek("["):
            self.pos += 1
            a = self.ident()
            self.eat("]")
            return Box(a, self.unary())
        if self.peek("("):
            self.pos += 1
            f = self.phi()
            self.eat(")")
            return f
        kw = self.keyword()
        if kw in ("mu", "nu"):
            self.pos += 2
            return self.fix(kw, start)
        if kw == "tt":
            self.pos += 2
            return TT
        if kw == "ff":
            self.pos += 2
            return FF
        if kw is None:
            raise ParseError("expected formula", self.pos)
        return Var(self.ident())

    def fix(self, kind, start):
        bound = INF
        if self.peek("^"):
            self.pos += 1
            self.ws()
            m = _ORD.match(self.text, self.pos)
            if not m:
                raise ParseError("bad ordinal", self.pos)
            bound = parse_ordinal(re.sub(r"\s+", "", m.group()))
            self.pos = m.end()
        if self.peek("_"):
            self.pos += 1
            self.ws()
            m = _NAT.match(self.text, self.pos)
            if not m:
                raise ParseError("expected index", self.pos)
            index = int(m.group())
            self.pos = m.end()
            self.eat("(")
            vars_ = [self.ident()]
            while self.peek(","):
                self.pos += 1
                vars_.append(self.ident())
            self.eat(")")
            self.eat(".")
            self.eat("(")
            bodies = [self.phi()]
            while self.peek(","):
                self.pos += 1
                bodies.append(self.phi())
            self.eat(")")
        else:
            index = 1
            vars_ = [self.ident()]
            self.eat(".")
            bodies = [self.phi()]
        try:
            return Fix(kind, bound, index, vars_, bodies)
        except FormulaError as e:
            raise ParseError(str(e), start) from None


def parse(text: str) -> Formula:
    p = _Parser(text)
    f = p.phi()
    p.ws()
    if p.pos != len(text):
        raise ParseError("unexpected trailing input", p.pos)
    return f


__all__ = [
    "MU", "NU", "Formula", "Var", "Top", "Bot", "TT", "FF", "Or", "And", "Diamond", "Box", "Fix",
    "FormulaError", "ParseError", "FormulaReport", "Nfa", "parse", "to_text", "analyze",
    "substitute", "dualize", "hat_transform", "successor_elimination", "regex_diamond",
    "free_vars", "occurrences", "subformula_at", "is_guarded_formula", "nesting", "mu", "nu",
    "big_or", "big_and", "fresh_name", "rename_bound_apart", "actions", "size", "ZERO",
]
