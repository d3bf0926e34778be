#!/usr/bin/env python3
"""Instance rewrites with exact answer recovery, checked against brute force.

* The cap transform removes infinities from unary terms: finite totals are
  untouched, and anything that was infeasible lands at or above a threshold.
* The min-cost-homomorphism rewrite swaps crisp terms for their general
  originals with unaries scaled up, so the original optimum is an integer
  division away.
* Binary decomposition projects a relation onto its coordinate pairs; the
  projections cut out the domain exactly precisely when a majority
  polymorphism exists (the ternary parity relation is the classic failure).
"""

from itertools import product

from cvcsp import (
    INF,
    Instance,
    Language,
    Term,
    binary_decompose,
    brute_force_solve,
    cap_reduce,
    cost_function,
    cost_str,
    crisp_relation,
    evaluate,
    minhom_reduce,
    search_majority,
    unary,
)
from cvcsp.reduce import derive_language

print("-- cap transform --")
lang = Language(2, (unary([0, INF]), cost_function(2, 2, [0, 0, 0, 0])), "general")
inst = Instance(2, (Term(0, (0,)), Term(1, (0, 1))))
red = cap_reduce(inst, lang)
print(f"cap C = {cost_str(red.cap)}, copies N = {red.copies}, "
      f"threshold N*C = {cost_str(red.threshold)}")
for x in product(range(2), repeat=2):
    before = evaluate(inst, lang, x)
    after = evaluate(red.instance, red.language, x)
    print(f"  {x}: original {cost_str(before):>4}  reduced {cost_str(after):>3}"
          + ("  (>= threshold)" if before == INF else ""))

print("\n-- min-cost-homomorphism rewrite --")
general = Language(2, (cost_function(2, 2, [1, 3, INF, 0]),), "finite")
crisp = derive_language(general, "minhom")
mh_lang = crisp.extended((unary([2, 0]),))
mh_inst = Instance(2, (Term(0, (0, 1)), Term(1, (0,)), Term(1, (1,))))
red2 = minhom_reduce(mh_inst, mh_lang, {0: general.functions[0]})
print(f"C = {cost_str(red2.cap)}, N = {red2.copies}, scale N*C = {cost_str(red2.scale)}")
opt = brute_force_solve(mh_inst, mh_lang)
opt_reduced = brute_force_solve(red2.instance, red2.language)
print(f"original optimum {cost_str(opt.cost)} at {opt.assignment}")
print(f"reduced  optimum {cost_str(opt_reduced.cost)}; "
      f"recovered: {cost_str(red2.recover(opt_reduced.cost))}")

print("\n-- binary decomposition --")
majority_closed = crisp_relation(2, 3, [(0, 0, 0), (0, 0, 1), (0, 1, 0), (1, 0, 0)])
parity = crisp_relation(2, 3, [(a, b, c) for a in (0, 1) for b in (0, 1)
                               for c in (0, 1) if a ^ b ^ c == 0])
for name, fn in (("majority-closed", majority_closed), ("parity", parity)):
    dec = binary_decompose(fn)
    found = search_majority(Language(2, (fn,), "finite")).op is not None
    print(f"{name}: projections exact = {dec.exact}, majority exists = {found}")
