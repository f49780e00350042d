"""
Vectorial versus nested countdowns
==================================

For classical fixpoints a two-variable system equals the nested scalar
formula.  With a finite bound the two differ: on the word a a b b b ...
the system keeps a shared counter, the nested version resets the inner one.
"""

from ctdmu.model import build_lasso
from ctdmu.regress import bekic, bekic_failure_formulas
from ctdmu.semantics import evaluate
from ctdmu.syntax import to_text

m = build_lasso("aa", "b")
phi, psi = bekic_failure_formulas(3)
print("system :", to_text(phi))
print("  holds at", sorted(evaluate(phi, m)))
print("nested :", to_text(psi))
print("  holds at", sorted(evaluate(psi, m)))

# with inf bounds the nested form is exact again
from ctdmu.ordinal import INF
from ctdmu.syntax import Fix
inf_phi = Fix(phi.kind, INF, 1, phi.vars, phi.bodies)
print(sorted(evaluate(inf_phi, m)) == sorted(evaluate(bekic(inf_phi), m)))
