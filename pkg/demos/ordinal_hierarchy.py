"""
Nesting depth on ordinal models
===============================

On the ordinals (alpha -> beta iff alpha > beta) the sentence with k nested
``nu^w`` operators carves out [w^k, T).  Each extra level multiplies the
limit by w, and the stabilization bound stays below w^(k+1).
"""

import time

from ctdmu.ordeval import eval_ordinal, hierarchy_sentence, stabilization_bound
from ctdmu.syntax import nesting, to_text

for k in range(1, 5):
    f = hierarchy_sentence(k)
    t = time.perf_counter()
    s = eval_ordinal(f)
    dt = time.perf_counter() - t
    print(f"k={k} nesting={nesting(f)} {to_text(f)}")
    print(f"    set {s}   bound {stabilization_bound(f)}   {dt:.3f}s")
