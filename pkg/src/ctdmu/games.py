"""Countdown games: configurations, moves, semantic games and a solver.

The solver replaces every infinite initial counter by a finite bound, expands
the configuration graph and solves it as a max-parity game with Zielonka's
recursive algorithm.  For a semantic game the bound for rank ``r`` is
``|M| * d_r + 1`` where ``d_r`` counts automaton states of rank ``r``: the
fixpoint system of that rank has ``d_r`` components, so its approximant chain
stabilises after at most ``|M| * d_r`` strict steps and any larger counter is
as good as an infinite one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional

from .automata import CountdownAutomaton, Eps, Modal, Player, Rank
from .model import Lts, check_valuation
from .ordinal import INF, Ordinal, format_ordinal

POSITIONAL = "positional"
COUNTDOWN = "countdown"


class GameError(ValueError):
    pass


class CountdownGame:
    def __init__(self, positions, owner, edges, rank, ranks, meta=None):
        self.positions = tuple(positions)
        self.owner = dict(owner)
        self.edges = {v: tuple(edges.get(v, ())) for v in self.positions}
        self.rank = dict(rank)
        self.ranks = tuple(ranks)
        self.meta = dict(meta or {})
        pset = set(self.positions)
        for v in self.positions:
            if v not in self.rank or not 0 <= self.rank[v] < len(self.ranks):
                raise GameError(f"position {v!r} has no valid rank")
            if self.owner.get(v) not in (Player.E, Player.A):
                raise GameError(f"position {v!r} has no owner")
            for w in self.edges[v]:
                if w not in pset:
                    raise GameError(f"edge to unknown position {w!r}")
        self.nonstandard = tuple(r for r, k in enumerate(self.ranks) if not k.standard)

    def ctr_initial(self) -> tuple:
        return tuple(self.ranks[r].ctr for r in self.nonstandard)

    def rank_owner(self, r) -> Player:
        return self.ranks[r].owner


@dataclass(frozen=True)
class Configuration:
    position: object
    ctr: tuple  # counter values, aligned with game.nonstandard
    mode: str = POSITIONAL

    def counters(self, g: CountdownGame) -> dict:
        return dict(zip(g.nonstandard, self.ctr))


@dataclass(frozen=True)
class CounterChoice:
    """The family of moves "pick beta < bound" at a countdown configuration."""

    config: Configuration
    rank: int
    bound: Ordinal

    def choose(self, g: CountdownGame, beta) -> Configuration:
        beta = Ordinal.of(beta) if isinstance(beta, int) else beta
        if not beta < self.bound:
            raise GameError(f"{format_ordinal(beta)} is not below {format_ordinal(self.bound)}")
        return _counter_update(g, self.config, beta)


def _counter_update(g, c: Configuration, beta=None) -> Configuration:
    r = g.rank[c.position]
    init = g.ctr_initial()
    new = []
    for k, rr in enumerate(g.nonstandard):
        if rr < r:
            new.append(init[k])
        elif rr == r:
            new.append(beta)
        else:
            new.append(c.ctr[k])
    return Configuration(c.position, tuple(new), POSITIONAL)


def mover(g: CountdownGame, c: Configuration) -> Player:
    if c.mode == POSITIONAL:
        return g.owner[c.position]
    return g.rank_owner(g.rank[c.position])


def legal_moves(g: CountdownGame, c: Configuration) -> list:
    """Successor configurations; an empty list means the mover is stuck.

    At a nonstandard rank with a finite counter n the n choices are listed
    with beta ascending; with an infinite counter a single CounterChoice
    stands for the whole family.
    """
    if c.mode == POSITIONAL:
        return [Configuration(w, c.ctr, COUNTDOWN) for w in g.edges[c.position]]
    r = g.rank[c.position]
    if g.ranks[r].standard:
        return [_counter_update(g, c)]
    cur = c.ctr[g.nonstandard.index(r)]
    if cur.is_zero:
        return []
    if cur.is_finite:
        return [_counter_update(g, c, Ordinal.of(b)) for b in range(int(cur))]
    return [CounterChoice(c, r, cur)]


def step(g: CountdownGame, c: Configuration, choice) -> Configuration:
    """Play one move.

    In a positional configuration ``choice`` indexes ``legal_moves``.  At a
    countdown of a nonstandard rank it is the new counter value beta; since
    finite families are listed with beta ascending, the two readings agree.
    """
    r = g.rank[c.position]
    if c.mode == COUNTDOWN and not g.ranks[r].standard:
        bound = c.ctr[g.nonstandard.index(r)]
        return CounterChoice(c, r, bound).choose(g, choice)
    moves = legal_moves(g, c)
    if not isinstance(choice, int) or not 0 <= choice < len(moves):
        raise GameError(f"illegal move {choice!r}; {len(moves)} move(s) available")
    return moves[choice]


# -- semantic games ---------------------------------------------------

def build_semantic_game(a: CountdownAutomaton, m: Lts, val=None) -> CountdownGame:
    val = dict(val or {})
    check_valuation(m, val)
    missing = a.variables - set(val)
    if missing:
        raise GameError(f"valuation misses variable(s) {sorted(missing)}")
    ranks = list(a.ranks)
    shift = 0
    if not ranks[0].standard:
        ranks.insert(0, Rank(Player.E, True))
        shift = 1
    positions, owner, edges, rank = [], {}, {}, {}
    for p in m.points:
        for q in a.states:
            v = (p, q)
            positions.append(v)
            owner[v] = a.owner[q]
            rank[v] = a.rank[q] + shift
            d = a.delta[q]
            if isinstance(d, Eps):
                edges[v] = [(p, t) for t in d.targets]
            else:
                edges[v] = [(n, d.target) for n in m.successors(p, d.action)]
        for x in sorted(a.variables):
            v = (p, x)
            positions.append(v)
            owner[v] = Player.A if p in val[x] else Player.E
            rank[v] = 0
            edges[v] = []
    per_rank = {}
    for q in a.states:
        per_rank[a.rank[q] + shift] = per_rank.get(a.rank[q] + shift, 0) + 1
    meta = {"points": len(m), "states": len(a.states), "per_rank": per_rank,
            "initial": a.initial, "model": m, "automaton": a}
    return CountdownGame(positions, owner, edges, rank, ranks, meta)


def standalone_game(a: CountdownAutomaton) -> CountdownGame:
    """An automaton read as a game on a one-point model with a self-loop per action."""
    acts = sorted({d.action for d in a.delta.values() if isinstance(d, Modal)})
    m = Lts(["*"], acts, [("*", x, "*") for x in acts])
    return build_semantic_game(a, m, {x: frozenset() for x in a.variables})


# -- solving ----------------------------------------------------------

@dataclass
class SolveResult:
    game: CountdownGame
    bounds: dict  # rank -> finite counter value used for the initial counter
    winner: dict  # Configuration -> Player
    strategy: dict  # Configuration -> Configuration, for the winner's own moves
    initial_ctr: tuple = ()
    original: Optional[CountdownGame] = None  # before truncation; ``game`` is truncated

    def initial(self, position) -> Configuration:
        return Configuration(position, self.initial_ctr, POSITIONAL)

    def winner_at(self, position, ctr=None, mode=POSITIONAL) -> Player:
        c = Configuration(position, self.initial_ctr if ctr is None else tuple(ctr), mode)
        return self.winner[c]

    def eve_wins(self, position) -> bool:
        return self.winner_at(position) is Player.E


def truncation_bounds(g: CountdownGame, truncation="auto") -> dict:
    """Finite replacement for each nonstandard rank's initial counter."""
    out = {}
    for r in g.nonstandard:
        ctr = g.ranks[r].ctr
        if ctr.is_finite:
            out[r] = int(ctr)
            continue
        if truncation is None:
            raise GameError("infinite counter and no truncation given")
        if truncation == "auto":
            d = g.meta.get("per_rank", {}).get(r)
            if d is None:
                d = sum(1 for v in g.positions if g.rank[v] == r)
            out[r] = g.meta.get("points", 1) * d + 1
        else:
            out[r] = int(truncation)
    return out


def truncate(g: CountdownGame, bounds: dict) -> CountdownGame:
    """The same arena with each nonstandard initial counter set to ``bounds[r]``."""
    ranks = [Rank(k.owner, k.standard, None if k.standard else Ordinal.of(bounds[r]))
             for r, k in enumerate(g.ranks)]
    return CountdownGame(g.positions, g.owner, g.edges, g.rank, ranks, g.meta)


def _priority(g, r):
    return 2 * r + (1 if g.ranks[r].owner is Player.E else 0)


def solve(g: CountdownGame, truncation="auto", full=False, extra=()) -> SolveResult:
    """Winners of every expanded configuration and a winning strategy.

    Expansion starts from the positional configurations at the truncated
    initial counters (plus ``extra``); ``full`` expands every counter vector
    below the bounds instead.
    """
    bounds = truncation_bounds(g, truncation)
    original = g
    g = truncate(g, bounds)
    init = tuple(bounds[r] for r in g.nonstandard)
    pos_index = {v: i for i, v in enumerate(g.positions)}
    ns_index = {r: k for k, r in enumerate(g.nonstandard)}
    init_t = init

    def key_of(c: Configuration):
        return (pos_index[c.position], tuple(int(x) for x in c.ctr), 0 if c.mode == POSITIONAL else 1)

    starts = []
    if full:
        for vi in range(len(g.positions)):
            for ctr in product(*[range(bounds[r] + 1) for r in g.nonstandard]):
                starts.append((vi, ctr, 0))
                starts.append((vi, ctr, 1))
    else:
        starts = [(vi, init, 0) for vi in range(len(g.positions))]
    starts += [key_of(c) for c in extra]

    rank_of = [g.rank[v] for v in g.positions]
    succ_pos = [[pos_index[w] for w in g.edges[v]] for v in g.positions]

    def moves(node):
        vi, ctr, mode = node
        if mode == 0:
            return [(w, ctr, 1) for w in succ_pos[vi]]
        r = rank_of[vi]
        k = ns_index.get(r)
        base = list(ctr)
        for rr, kk in ns_index.items():
            if rr < r:
                base[kk] = init_t[kk]
        if k is None:
            return [(vi, tuple(base), 0)]
        out = []
        for b in range(ctr[k]):
            nb = list(base)
            nb[k] = b
            out.append((vi, tuple(nb), 0))
        return out

    ids = {}
    nodes = []
    stack = []
    for s in starts:
        if s not in ids:
            ids[s] = len(nodes)
            nodes.append(s)
            stack.append(s)
    succ = []
    pending = {}
    while stack:
        n = stack.pop()
        out = []
        for t in moves(n):
            if t not in ids:
                ids[t] = len(nodes)
                nodes.append(t)
                stack.append(t)
            out.append(ids[t])
        pending[ids[n]] = out
    N = len(nodes)
    E_WIN, A_WIN = N, N + 1
    owner = []
    prio = []
    succ = [None] * (N + 2)
    for i, (vi, ctr, mode) in enumerate(nodes):
        v = g.positions[vi]
        who = g.owner[v] if mode == 0 else g.ranks[rank_of[vi]].owner
        owner.append(0 if who is Player.E else 1)
        prio.append(_priority(g, rank_of[vi]))
        out = pending[i]
        if not out:
            out = [A_WIN if who is Player.E else E_WIN]
        succ[i] = out
    owner += [0, 0]
    prio += [0, 1]
    succ[E_WIN] = [E_WIN]
    succ[A_WIN] = [A_WIN]

    win, strat = zielonka(succ, owner, prio)

    def conf(n):
        vi, ctr, mode = nodes[n]
        return Configuration(g.positions[vi], tuple(Ordinal.of(x) for x in ctr),
                             POSITIONAL if mode == 0 else COUNTDOWN)

    confs = [conf(i) for i in range(N)]
    winner = {confs[i]: (Player.E if win[i] == 0 else Player.A) for i in range(N)}
    strategy = {}
    for i in range(N):
        if owner[i] == win[i] and i in strat and strat[i] < N:
            strategy[confs[i]] = confs[strat[i]]
    return SolveResult(g, bounds, winner, strategy, tuple(Ordinal.of(x) for x in init), original)


def zielonka(succ, owner, prio):
    """Max-parity game solver; even priorities are won by player 0.

    Returns the winner per node and a strategy (node -> successor) that is
    winning for the owner on every node that owner wins.
    """
    n = len(succ)
    pred = [[] for _ in range(n)]
    for v, ws in enumerate(succ):
        for w in ws:
            pred[w].append(v)
    win = [None] * n
    strat = {}

    def attractor(player, target, arena):
        attr = set(target)
        count = {}
        queue = list(target)
        local = {}
        while queue:
            w = queue.pop()
            for v in pred[w]:
                if v not in arena or v in attr:
                    continue
                if owner[v] == player:
                    attr.add(v)
                    local[v] = w
                    queue.append(v)
                else:
                    if v not in count:
                        count[v] = sum(1 for x in succ[v] if x in arena)
                    count[v] -= 1
                    if count[v] == 0:
                        attr.add(v)
                        queue.append(v)
        return attr, local

    def rec(arena):
        if not arena:
            return (set(), set()), {}
        p = max(prio[v] for v in arena)
        i = p % 2
        top = {v for v in arena if prio[v] == p}
        a, a_str = attractor(i, top, arena)
        (w0, w1), s1 = rec(arena - a)
        sub = (w0, w1)
        if not sub[1 - i]:
            st = dict(s1)
            st.update(a_str)
            for v in top:
                if owner[v] == i:
                    st[v] = next(w for w in succ[v] if w in arena)
            res = [set(), set()]
            res[i] = set(arena)
            return tuple(res), st
        b, b_str = attractor(1 - i, sub[1 - i], arena)
        (v0, v1), s2 = rec(arena - b)
        res = [set(v0), set(v1)]
        res[1 - i] |= b
        st = {}
        for v in sub[1 - i]:
            if v in s1:
                st[v] = s1[v]
        st.update(b_str)
        for v in arena - b:
            if v in s2:
                st[v] = s2[v]
        return tuple(res), st

    (w0, w1), st = rec(set(range(n)))
    for v in w0:
        win[v] = 0
    for v in w1:
        win[v] = 1
    # keep only moves made by the node's owner on nodes that owner wins
    strat = {v: w for v, w in st.items() if owner[v] == win[v]}
    return win, strat


# -- helpers for semantic games ----------------------------------------

def language(a: CountdownAutomaton, m: Lts, val=None, truncation="auto") -> frozenset:
    """Points whose initial configuration Eve wins."""
    g = build_semantic_game(a, m, val)
    res = solve(g, truncation)
    return frozenset(p for p in m.points if res.eve_wins((p, a.initial)))


def position_text(v) -> str:
    if isinstance(v, tuple) and len(v) == 2:
        return f"({v[0]},{v[1]})"
    return str(v)


def ctr_text(g: CountdownGame, ctr) -> str:
    return "{" + ",".join(f"{r}:{format_ordinal(x)}" for r, x in zip(g.nonstandard, ctr)) + "}"


def trace(res: SolveResult, start: Configuration, max_steps: int = 200) -> list:
    """Replay the winner's strategy against a simple opponent.

    The losing side takes the first legal move, choosing the largest
    counter value at its own countdowns.  Returns text lines, one per
    configuration, plus a final verdict line.
    """
    g = res.game
    lines = []
    seen = {}
    c = start
    history = []
    while len(lines) < max_steps:
        who = mover(g, c)
        if c in seen:
            loop = history[seen[c]:]
            top = max(g.rank[x.position] for x in loop)
            loser = g.rank_owner(top)
            lines.append(f"cycle back to step {seen[c] + 1}: highest rank {top} is owned by "
                         f"{loser}, so {loser.opponent} wins")
            return lines
        seen[c] = len(history)
        history.append(c)
        moves = legal_moves(g, c)
        head = f"{c.mode} | {position_text(c.position)} | ctr {ctr_text(g, c.ctr)} | {who}"
        if not moves:
            stuck = "counter 0" if c.mode == COUNTDOWN else "no edge"
            lines.append(f"{head} | stuck ({stuck})")
            lines.append(f"{who} is stuck: {who.opponent} wins")
            return lines
        if c in res.strategy:
            nxt = res.strategy[c]
        elif c.mode == COUNTDOWN and len(moves) > 1:
            nxt = moves[-1]
        else:
            nxt = moves[0]
        if c.mode == POSITIONAL:
            mv = f"-> {position_text(nxt.position)}"
        else:
            mv = f"-> ctr {ctr_text(g, nxt.ctr)}"
        lines.append(f"{head} | {mv}")
        c = nxt
    lines.append("step limit reached")
    return lines
