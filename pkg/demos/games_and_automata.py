"""
From a formula to a game
========================

The formula becomes an automaton whose states are its subformula
occurrences; running it over a model gives a countdown game.  Adam owns the
counter of ``nu^w``: he names a number up front and must decrement it each
time the fixpoint is unfolded.
"""

from ctdmu.automata import from_formula, to_formula
from ctdmu.games import build_semantic_game, solve, trace
from ctdmu.model import build_p3
from ctdmu.syntax import parse, to_text

m = build_p3()
a = from_formula(parse("nu^w x. <a> x"))
print(a.describe())

res = solve(build_semantic_game(a, m))
print("counter bound used for w:", res.bounds)
for p in m.points:
    print(p, res.winner_at((p, a.initial)))

# a finite counter of 2 is enough for Eve at p2; replay the play
a2 = from_formula(parse("nu^2 x. <a> x"), allow_successor=True)
res2 = solve(build_semantic_game(a2, m))
print("\n".join(trace(res2, res2.initial(("p2", a2.initial)))))

# and back to a formula
print(to_text(to_formula(a)))
