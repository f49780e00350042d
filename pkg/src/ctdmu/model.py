"""Finite labelled transition systems and the generators used throughout."""
from __future__ import annotations

import json
from typing import Iterable, Mapping


class ModelError(ValueError):
    pass


class Lts:
    """Points, actions and labelled edges ``(source, action, target)``.

    Besides the named view, an ``Lts`` keeps per-action successor bitmasks
    indexed by point position; the evaluator works entirely on those.
    """

    def __init__(self, points: Iterable[str], actions: Iterable[str], edges: Iterable):
        self.points = tuple(points)
        self.actions = tuple(actions)
        if len(set(self.points)) != len(self.points):
            raise ModelError("duplicate point")
        if len(set(self.actions)) != len(self.actions):
            raise ModelError("duplicate action")
        self.index = {p: i for i, p in enumerate(self.points)}
        seen = []
        seen_set = set()
        for e in edges:
            s, a, t = e
            if s not in self.index or t not in self.index:
                raise ModelError(f"edge {e!r} uses an undeclared point")
            if a not in self.actions:
                raise ModelError(f"edge {e!r} uses an undeclared action")
            if (s, a, t) in seen_set:
                raise ModelError(f"duplicate edge {e!r}")
            seen_set.add((s, a, t))
            seen.append((s, a, t))
        self.edges = tuple(seen)
        self.succ = {a: [0] * len(self.points) for a in self.actions}
        for s, a, t in self.edges:
            self.succ[a][self.index[s]] |= 1 << self.index[t]
        self.full = (1 << len(self.points)) - 1

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return (isinstance(other, Lts) and self.points == other.points
                and self.actions == other.actions and set(self.edges) == set(other.edges))

    def __repr__(self):
        return f"Lts({len(self.points)} points, {len(self.edges)} edges)"

    def successors(self, point: str, action: str) -> list:
        if action not in self.succ:
            raise ModelError(f"unknown action {action!r}")
        mask = self.succ[action][self.index[point]]
        return [p for i, p in enumerate(self.points) if mask >> i & 1]

    def to_mask(self, pts: Iterable[str]) -> int:
        m = 0
        for p in pts:
            if p not in self.index:
                raise ModelError(f"unknown point {p!r}")
            m |= 1 << self.index[p]
        return m

    def to_set(self, mask: int) -> frozenset:
        return frozenset(p for i, p in enumerate(self.points) if mask >> i & 1)


Valuation = Mapping[str, frozenset]


def check_valuation(m: Lts, val: Valuation):
    for x, pts in val.items():
        for p in pts:
            if p not in m.index:
                raise ModelError(f"valuation of {x!r} names unknown point {p!r}")


def complement_valuation(m: Lts, val: Valuation) -> dict:
    return {x: frozenset(m.points) - frozenset(pts) for x, pts in val.items()}


# -- generators -------------------------------------------------------

def build_lasso(prefix: str, loop: str) -> Lts:
    """The ultimately periodic word ``prefix . loop^omega`` as a finite model."""
    if not loop:
        raise ModelError("loop must be nonempty")
    word = prefix + loop
    k = len(word)
    pts = [str(i) for i in range(k)]
    edges = []
    for i, c in enumerate(word):
        j = i + 1 if i + 1 < k else len(prefix)
        edges.append((pts[i], c, pts[j]))
    acts = sorted(set(word))
    return Lts(pts, acts, edges)


def build_figure1(n: int) -> Lts:
    """First ``n`` levels of the two-column model with points m_i and n_i."""
    if n < 1:
        raise ModelError("n must be at least 1")
    ms = [f"m{i}" for i in range(n)]
    ns = [f"n{i}" for i in range(n)]
    edges = []
    for i in range(n):
        for j in range(n):
            if i > j:
                edges += [(ms[i], "a", ms[j]), (ns[i], "a", ms[j]), (ns[i], "b", ms[j])]
            edges.append((ms[i], "b", ms[j]))
    return Lts(ms + ns, ["a", "b"], edges)


def build_ordinal_prefix(h: int, action: str = "a") -> Lts:
    """The ordinal h as a model: alpha -> beta iff alpha > beta."""
    pts = [str(i) for i in range(h)]
    edges = [(pts[i], action, pts[j]) for i in range(h) for j in range(i)]
    return Lts(pts, [action], edges)


def build_p3() -> Lts:
    """The path p2 -a-> p1 -a-> p0."""
    return Lts(["p0", "p1", "p2"], ["a"], [("p2", "a", "p1"), ("p1", "a", "p0")])


MASK64 = (1 << 64) - 1


class SplitMix64:
    """splitmix64: state += 0x9E3779B97F4A7C15, then the usual xor-shift-multiply finaliser.

    ``uniform()`` returns the top 53 bits scaled to [0, 1).
    """

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next() >> 11) * (1.0 / (1 << 53))


def random_lts(seed: int, num_points: int, actions=("a", "b"), edge_density: float = 0.3) -> Lts:
    """Each (source, action, target) triple kept iff the next uniform draw is below the density.

    Triples are visited source-major, then action, then target, all in declaration order.
    """
    if not 0.0 <= edge_density <= 1.0:
        raise ModelError("density must lie in [0, 1]")
    rng = SplitMix64(seed)
    pts = [str(i) for i in range(num_points)]
    edges = []
    for s in pts:
        for a in actions:
            for t in pts:
                if rng.uniform() < edge_density:
                    edges.append((s, a, t))
    return Lts(pts, list(actions), edges)


def random_valuation(seed: int, m: Lts, names: Iterable[str]) -> dict:
    rng = SplitMix64(seed ^ 0x5DEECE66D)
    return {x: frozenset(p for p in m.points if rng.uniform() < 0.5) for x in names}


# -- JSON -------------------------------------------------------------

def to_json(m: Lts, val: Valuation | None = None) -> dict:
    doc = {"points": list(m.points), "actions": list(m.actions), "edges": [list(e) for e in m.edges]}
    if val is not None:
        doc["valuation"] = {x: [p for p in m.points if p in pts] for x, pts in val.items()}
    return doc


def from_json(doc: dict):
    """Return ``(lts, valuation)``; the valuation is empty when absent."""
    try:
        m = Lts(doc["points"], doc["actions"], [tuple(e) for e in doc["edges"]])
    except (KeyError, TypeError, ValueError) as e:
        raise ModelError(f"malformed model document: {e}") from None
    val = {x: frozenset(pts) for x, pts in doc.get("valuation", {}).items()}
    check_valuation(m, val)
    return m, val


def load(path: str):
    with open(path) as fh:
        return from_json(json.load(fh))


def dump(m: Lts, path: str, val: Valuation | None = None):
    with open(path, "w") as fh:
        json.dump(to_json(m, val), fh, indent=1)
        fh.write("\n")
