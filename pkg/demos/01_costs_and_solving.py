#!/usr/bin/env python3
"""A first tour: exact costs, cost-function tables, instances, and the
brute-force oracle.

Costs are exact rationals or infinity -- never floats -- so every comparison
downstream (edge tests, multimorphism inequalities) is sound.
"""

from fractions import Fraction

from cvcsp import (
    Instance,
    Language,
    Term,
    brute_force_solve,
    cost_function,
    cost_str,
    crisp_relation,
    evaluate,
    unary,
)

# A table is dense and row-major: f(0,0), f(0,1), f(1,0), f(1,1).
soft_pref = cost_function(2, 2, [0, 2, 2, 2])
must_differ = crisp_relation(2, 2, [(0, 1), (1, 0)])
bias = unary([Fraction(1, 2), 3])

language = Language(2, (soft_pref, must_differ, bias), unary_closure="finite")

print("tables:")
print("  soft_pref   ", [cost_str(v) for v in soft_pref.table])
print("  must_differ ", [cost_str(v) for v in must_differ.table])
print("  bias        ", [cost_str(v) for v in bias.table])
print("  dom(must_differ) =", must_differ.effective_domain())

# Three variables in a line: soft preference on (x0,x1), a crisp constraint on
# (x1,x2), and a rational bias on x0.
instance = Instance(3, (
    Term(0, (0, 1)),
    Term(1, (1, 2)),
    Term(2, (0,)),
))

print("\nassignment costs:")
for x in [(0, 0, 1), (0, 1, 0), (1, 1, 1)]:
    print(f"  {x} -> {cost_str(evaluate(instance, language, x))}")

solution = brute_force_solve(instance, language)
print("\nbrute-force optimum:")
print("  assignment:", solution.assignment)
print("  cost:      ", cost_str(solution.cost))
print("  feasible:  ", solution.feasible)
