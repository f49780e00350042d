"""Random formulas and automata for property tests and the acceptance suite."""
from __future__ import annotations

import random

from .ordinal import INF, OMEGA, Ordinal
from .syntax import FF, MU, NU, TT, And, Box, Diamond, Fix, Or, Var

DEFAULT_BOUNDS = (Ordinal.of(2), Ordinal.of(3), OMEGA, INF)


def random_formula(rng: random.Random, max_fix=4, bounds=DEFAULT_BOUNDS, max_vec=2,
                   actions=("a", "b"), free=(), guarded=True, max_depth=5,
                   kinds=(MU, NU)) -> Fix:
    """A random formula, guarded when asked.

    In guarded mode a bound variable may only be used below a modality that
    sits inside its binder, which rules out epsilon cycles.
    """
    budget = [max_fix]
    counter = [0]

    def leaf(env):
        opts = [TT, FF] + [Var(x) for x in free]
        usable = [x for x, ok in env if ok or not guarded]
        if usable:
            opts += [Var(x) for x in usable] * 3
        return rng.choice(opts)

    def gen(depth, env):
        if depth <= 0:
            return leaf(env)
        r = rng.random()
        if budget[0] > 0 and r < 0.3:
            budget[0] -= 1
            n = rng.randint(1, max_vec)
            names = []
            for _ in range(n):
                counter[0] += 1
                names.append(f"x{counter[0]}")
            inner = env + [(x, False) for x in names]
            bodies = [gen(depth - 1, inner) for _ in names]
            return Fix(rng.choice(kinds), rng.choice(bounds), rng.randint(1, n), names, bodies)
        if r < 0.55:
            a = rng.choice(actions)
            inner = [(x, True) for x, _ in env]
            cls = Diamond if rng.random() < 0.5 else Box
            return cls(a, gen(depth - 1, inner))
        if r < 0.8:
            cls = Or if rng.random() < 0.5 else And
            return cls(gen(depth - 1, env), gen(depth - 1, env))
        return leaf(env)

    return gen(max_depth, [])


def random_sentence(rng: random.Random, **kw):
    kw.setdefault("free", ())
    return random_formula(rng, **kw)


def monomodal_sentence(rng: random.Random, **kw):
    """Sentences over one action, bounds finite, w or inf; the ordinal-model fragment."""
    kw.setdefault("bounds", DEFAULT_BOUNDS)
    return random_formula(rng, actions=("a",), free=(), **kw)


def _random_ranks(rng, count, ctrs):
    from .automata import Player, Rank
    out = []
    for r in range(count):
        who = rng.choice([Player.E, Player.A])
        if rng.random() < 0.4:
            out.append(Rank(who, True))
        else:
            out.append(Rank(who, False, rng.choice(ctrs)))
    return out


def random_automaton(rng: random.Random, max_states=5, max_ranks=3, actions=("a", "b"),
                     variables=(), ctrs=(Ordinal.of(1), Ordinal.of(2), OMEGA),
                     injective=False):
    """A random countdown automaton; ``injective`` gives every state its own rank."""
    from .automata import CountdownAutomaton, Eps, Modal, Player
    n = rng.randint(1, max_states)
    states = [f"s{i}" for i in range(n)]
    if injective:
        ranks = _random_ranks(rng, n, ctrs)
        order = list(range(n))
        rng.shuffle(order)
        rank = dict(zip(states, order))
    else:
        k = rng.randint(1, max_ranks)
        ranks = _random_ranks(rng, k, ctrs)
        rank = {q: rng.randrange(k) for q in states}
    targets = states + list(variables)
    owner, delta = {}, {}
    for q in states:
        owner[q] = rng.choice([Player.E, Player.A])
        if rng.random() < 0.5:
            delta[q] = Modal(rng.choice(actions), rng.choice(targets))
        else:
            delta[q] = Eps(tuple(rng.sample(targets, rng.randint(0, min(2, len(targets))))))
    return CountdownAutomaton(states, states[0], owner, delta, rank, ranks, variables=set(variables))


def random_game(rng: random.Random, max_positions=6, max_ranks=3,
                ctrs=(Ordinal.of(1), Ordinal.of(2), Ordinal.of(3), OMEGA)):
    """A random countdown game arena; infinite counters need truncating before solving."""
    from .automata import Player
    from .games import CountdownGame
    n = rng.randint(1, max_positions)
    pos = list(range(n))
    k = rng.randint(1, max_ranks)
    ranks = _random_ranks(rng, k, ctrs)
    owner = {v: rng.choice([Player.E, Player.A]) for v in pos}
    edges = {v: sorted(set(rng.choices(pos, k=rng.randint(0, 2)))) for v in pos}
    rank = {v: rng.randrange(k) for v in pos}
    return CountdownGame(pos, owner, edges, rank, ranks)
