"""Countdown automata and the translations to and from formulas."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .ordinal import INF, CountdownBound, Ordinal, as_bound, format_ordinal
from .syntax import (
    FF, MU, NU, TT, And, Bot, Box, Diamond, Fix, Formula, Or, Top, Var, all_var_names,
    big_and, big_or, free_vars, fresh_name, is_guarded_formula, map_children, occurrences,
    substitute, _has_cycle,
)


class AutomatonError(ValueError):
    pass


class Player(enum.Enum):
    E = "E"
    A = "A"

    @property
    def opponent(self):
        return Player.A if self is Player.E else Player.E

    def __str__(self):
        return "Eve" if self is Player.E else "Adam"


@dataclass(frozen=True)
class Rank:
    owner: Player
    standard: bool = True
    ctr: Optional[Ordinal] = None  # initial counter, only for nonstandard ranks

    def __post_init__(self):
        if self.standard and self.ctr is not None:
            raise AutomatonError("standard ranks carry no counter")
        if not self.standard and not isinstance(self.ctr, Ordinal):
            raise AutomatonError("nonstandard ranks need an ordinal counter")


@dataclass(frozen=True)
class Eps:
    targets: tuple


@dataclass(frozen=True)
class Modal:
    action: str
    target: str


class CountdownAutomaton:
    """States, owners, an epsilon or modal transition per state, and a rank order.

    ``ranks`` lists the ranks lowest first; ``rank[q]`` indexes into it.
    Transition targets that are not states are free variables.
    """

    def __init__(self, states, initial, owner, delta, rank, ranks, variables=None, labels=None):
        self.states = tuple(states)
        self.initial = initial
        self.owner = dict(owner)
        self.delta = dict(delta)
        self.rank = dict(rank)
        self.ranks = tuple(ranks)
        self.labels = dict(labels or {})
        sset = set(self.states)
        if len(sset) != len(self.states):
            raise AutomatonError("duplicate state")
        if initial not in sset:
            raise AutomatonError("initial state is not a state")
        found = set()
        for q in self.states:
            if q not in self.delta:
                raise AutomatonError(f"no transition for {q!r}")
            if self.owner.get(q) not in (Player.E, Player.A):
                raise AutomatonError(f"no owner for {q!r}")
            if not 0 <= self.rank.get(q, -1) < len(self.ranks):
                raise AutomatonError(f"bad rank for {q!r}")
            d = self.delta[q]
            if isinstance(d, Eps):
                found.update(t for t in d.targets if t not in sset)
            elif isinstance(d, Modal):
                if d.target not in sset:
                    found.add(d.target)
            else:
                raise AutomatonError(f"bad transition for {q!r}")
        if variables is None:
            variables = found
        elif not found <= set(variables):
            raise AutomatonError(f"undeclared variable target(s) {sorted(found - set(variables))}")
        self.variables = frozenset(variables)

    def __repr__(self):
        return f"CountdownAutomaton({len(self.states)} states, {len(self.ranks)} ranks)"

    @property
    def nonstandard(self):
        return [r for r, k in enumerate(self.ranks) if not k.standard]

    def ctr_initial(self) -> dict:
        return {r: self.ranks[r].ctr for r in self.nonstandard}

    def describe(self) -> str:
        lines = []
        for q in self.states:
            d = self.delta[q]
            if isinstance(d, Eps):
                tr = "{" + ", ".join(d.targets) + "}"
            else:
                tr = f"({d.action}, {d.target})"
            lab = f"  [{self.labels[q]}]" if q in self.labels else ""
            lines.append(f"{q}: owner {self.owner[q].value} rank {self.rank[q]} delta {tr}{lab}")
        for i, r in enumerate(self.ranks):
            c = "standard" if r.standard else f"ctr {format_ordinal(r.ctr)}"
            lines.append(f"rank {i}: {r.owner.value} {c}")
        return "\n".join(lines)


def _state_name(path):
    return "q" + ".".join(map(str, path))


def from_formula(f: Formula, allow_successor: bool = False) -> CountdownAutomaton:
    """The automaton whose states are the occurrences of ``f`` other than free variables.

    Finite successor bounds are rejected unless ``allow_successor``; the game
    handles any ordinal counter, so allowing them is sound, but the standard
    route is to run ``successor_elimination`` first.
    """
    for _, g in occurrences(f):
        if isinstance(g, Fix) and g.bound is not INF and g.bound.is_successor and not allow_successor:
            raise AutomatonError(f"successor bound {format_ordinal(g.bound)}; eliminate it first")

    states, owner, delta, rank, labels = [], {}, {}, {}, {}
    ranks = [Rank(Player.E, True)]
    fv = free_vars(f)

    if isinstance(f, Var) and f.name in fv:
        q = _state_name(())
        return CountdownAutomaton([q], q, {q: Player.E}, {q: Eps((f.name,))}, {q: 0}, ranks,
                                  labels={q: f.name})

    def target(path, g, env):
        if isinstance(g, Var) and g.name not in env:
            return g.name
        return _state_name(path)

    def walk(g, path, env):
        # returns nothing; fills tables. Ranks of fixpoint bodies are set post-order.
        if isinstance(g, Var) and g.name not in env:
            return
        q = _state_name(path)
        states.append(q)
        labels[q] = str(g)
        rank.setdefault(q, 0)
        if isinstance(g, (Or, Diamond)):
            owner[q] = Player.E
        elif isinstance(g, (And, Box, Top)):
            owner[q] = Player.A
        else:
            owner[q] = Player.E
        if isinstance(g, (Or, And)):
            ts = []
            for i, c in enumerate(g.children()):
                t = target(path + (i,), c, env)
                if t not in ts:
                    ts.append(t)
            delta[q] = Eps(tuple(ts))
        elif isinstance(g, (Diamond, Box)):
            delta[q] = Modal(g.action, target(path + (0,), g.body, env))
        elif isinstance(g, (Top, Bot)):
            delta[q] = Eps(())
        elif isinstance(g, Var):
            bpath, j = env[g.name]
            delta[q] = Eps((bpath[j],))
        else:
            inner = dict(env)
            for j, x in enumerate(g.vars):
                inner[x] = None
            bodies = [target(path + (j,), b, inner) for j, b in enumerate(g.bodies)]
            for j, x in enumerate(g.vars):
                inner[x] = (bodies, j)
            delta[q] = Eps((bodies[g.index - 1],))
            for j, b in enumerate(g.bodies):
                walk(b, path + (j,), inner)
            r = len(ranks)
            ranks.append(Rank(Player.E if g.kind == MU else Player.A, g.bound is INF,
                              None if g.bound is INF else g.bound))
            for j, b in enumerate(g.bodies):
                if not (isinstance(b, Var) and b.name not in inner):
                    rank[_state_name(path + (j,))] = r
            return
        for i, c in enumerate(g.children()):
            walk(c, path + (i,), env)

    walk(f, (), {})
    return CountdownAutomaton(states, states[0], owner, delta, rank, ranks, labels=labels)


def is_guarded(a: CountdownAutomaton) -> bool:
    """True iff the epsilon transitions between states form no cycle."""
    edges = {}
    for q in a.states:
        d = a.delta[q]
        edges[q] = [t for t in d.targets if t in a.delta] if isinstance(d, Eps) else []
    return not _has_cycle(list(a.states), edges)


def is_injectively_ranked(a: CountdownAutomaton, states=None) -> bool:
    qs = a.states if states is None else states
    rs = [a.rank[q] for q in qs]
    return len(set(rs)) == len(rs)


def fixpoint_body_states(a: CountdownAutomaton):
    """States of positive rank; for automata of formulas these are the fixpoint bodies."""
    return [q for q in a.states if a.rank[q] > 0]


def normalize_ranks(a: CountdownAutomaton) -> CountdownAutomaton:
    """Drop ranks no state uses and add an unused standard top rank."""
    used = sorted({a.rank[q] for q in a.states})
    remap = {r: i for i, r in enumerate(used)}
    ranks = [a.ranks[r] for r in used] + [Rank(Player.E, True)]
    return CountdownAutomaton(a.states, a.initial, a.owner, a.delta,
                              {q: remap[a.rank[q]] for q in a.states}, ranks,
                              variables=a.variables, labels=a.labels)


def to_formula(a: CountdownAutomaton) -> Formula:
    """The formula built rank by rank from the bottom, as in the automaton-to-formula proof."""
    a = normalize_ranks(a)
    avoid = set(a.variables)
    xname = {}
    for q in a.states:
        xname[q] = fresh_name("x", avoid)
        avoid.add(xname[q])

    def ref(t):
        return Var(xname[t]) if t in xname else Var(t)

    psi = {}
    for q in a.states:
        d = a.delta[q]
        e = a.owner[q] is Player.E
        if isinstance(d, Modal):
            psi[q] = (Diamond if e else Box)(d.action, ref(d.target))
        else:
            items = [ref(t) for t in d.targets]
            psi[q] = big_or(items) if e else big_and(items)
    for r in range(len(a.ranks) - 1):
        qs = [q for q in a.states if a.rank[q] == r]
        info = a.ranks[r]
        kind = MU if info.owner is Player.E else NU
        bound = INF if info.standard else info.ctr
        vars_ = [xname[q] for q in qs]
        bodies = [psi[q] for q in qs]
        theta = {xname[q]: Fix(kind, bound, i + 1, vars_, bodies) for i, q in enumerate(qs)}
        psi = {q: substitute(psi[q], theta) for q in a.states}
    return psi[a.initial]


# -- guarding ---------------------------------------------------------

def _replace_occurrences(g, names, fn, under_modal=False):
    """Rebuild ``g`` replacing free occurrences of ``names`` by ``fn(name, under_modal)``."""
    if isinstance(g, Var):
        return fn(g.name, under_modal) if g.name in names else g
    if isinstance(g, (Top, Bot)):
        return g
    if isinstance(g, (Diamond, Box)):
        return type(g)(g.action, _replace_occurrences(g.body, names, fn, True))
    if isinstance(g, Fix):
        inner = names - set(g.vars)
        if not inner:
            return g
        return Fix(g.kind, g.bound, g.index, g.vars,
                   [_replace_occurrences(b, inner, fn, under_modal) for b in g.bodies])
    return map_children(g, lambda c: _replace_occurrences(c, names, fn, under_modal))


def guard(f: Formula) -> Formula:
    """An equivalent formula without epsilon cycles."""
    if is_guarded_formula(f):
        return f
    avoid = all_var_names(f)
    return _guard(f, avoid)


def _guard(f, avoid):
    if not isinstance(f, Fix):
        return map_children(f, lambda c: _guard(c, avoid))
    g = Fix(f.kind, f.bound, f.index, f.vars, [_guard(b, avoid) for b in f.bodies])
    if is_guarded_formula(g):
        return g
    stop = FF if g.kind == MU else TT
    names = set(g.vars)
    if g.is_scalar:
        body = _replace_occurrences(g.bodies[0], names,
                                    lambda x, m: Var(x) if m else stop)
        return Fix(g.kind, g.bound, 1, g.vars, [body])
    n = len(g.vars)
    new = {}
    for i, x in enumerate(g.vars):
        for j in range(n + 1):
            new[i, j] = fresh_name(x, avoid)
            avoid.add(new[i, j])
    pos = {x: i for i, x in enumerate(g.vars)}
    vars_, bodies = [], []
    for i in range(n):
        for j in range(n + 1):
            def fn(x, guarded, j=j):
                m = pos[x]
                if guarded:
                    return Var(new[m, 0])
                return stop if j == n else Var(new[m, j + 1])
            vars_.append(new[i, j])
            bodies.append(_replace_occurrences(g.bodies[i], names, fn))
    index = (g.index - 1) * (n + 1) + 1
    return Fix(g.kind, g.bound, index, vars_, bodies)


# -- JSON -------------------------------------------------------------

def to_json(a: CountdownAutomaton) -> dict:
    delta = {}
    for q in a.states:
        d = a.delta[q]
        delta[q] = {"eps": list(d.targets)} if isinstance(d, Eps) else {"modal": [d.action, d.target]}
    ranks = []
    for r in a.ranks:
        doc = {"owner": r.owner.value, "standard": r.standard}
        if not r.standard:
            doc["ctr"] = format_ordinal(r.ctr)
        ranks.append(doc)
    return {
        "states": [{"name": q, "owner": a.owner[q].value, "rank": a.rank[q]} for q in a.states],
        "initial": a.initial,
        "delta": delta,
        "ranks": ranks,
    }


def from_json(doc: dict) -> CountdownAutomaton:
    try:
        states = [s["name"] for s in doc["states"]]
        owner = {s["name"]: Player(s["owner"]) for s in doc["states"]}
        rank = {s["name"]: int(s["rank"]) for s in doc["states"]}
        delta = {}
        for q, d in doc["delta"].items():
            if "eps" in d:
                delta[q] = Eps(tuple(d["eps"]))
            else:
                act, tgt = d["modal"]
                delta[q] = Modal(act, tgt)
        ranks = []
        for r in doc["ranks"]:
            std = bool(r["standard"])
            ctr = None
            if not std:
                ctr = as_bound(r["ctr"])
                if ctr is INF:
                    raise AutomatonError("a counter cannot be inf; use a standard rank")
            ranks.append(Rank(Player(r["owner"]), std, ctr))
        return CountdownAutomaton(states, doc["initial"], owner, delta, rank, ranks)
    except (KeyError, TypeError, ValueError) as e:
        if isinstance(e, AutomatonError):
            raise
        raise AutomatonError(f"malformed automaton document: {e}") from None
