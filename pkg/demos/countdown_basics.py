"""
Countdown operators on a three-point path
=========================================

A nu^alpha fixpoint returns the alpha-th approximant instead of the
fixpoint.  On the path p2 -> p1 -> p0, ``nu^n x. <a> x`` holds exactly at the
points with a path of at least n steps.
"""

from ctdmu.model import build_p3
from ctdmu.semantics import approximant_chain, evaluate
from ctdmu.syntax import parse

m = build_p3()
for bound in ["0", "1", "2", "3", "w", "inf"]:
    f = parse(f"nu^{bound} x. <a> x")
    print(f"{bound:>3}: {sorted(evaluate(f, m))}")

# the whole decreasing chain, stage by stage
chain = approximant_chain(parse("nu x. <a> x"), m, up_to=4)
for i, stage in enumerate(chain.stages):
    print("stage", i, [sorted(s) for s in stage])
print("stable from stage", chain.closure_index)
