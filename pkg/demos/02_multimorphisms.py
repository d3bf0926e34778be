#!/usr/bin/env python3
"""Multimorphisms: the exact inequalities that separate easy objectives from
hard ones, and fusion as a cost-safe local move.

A binary pair <meet, join> is a multimorphism of f when
f(x meet y) + f(x join y) <= f(x) + f(y) for all x, y in dom f, applied
componentwise.  <min, max> on a submodular table passes; on the cut table it
fails at a concrete pair of assignments, and the checker hands back that
witness.
"""

from cvcsp import (
    Instance,
    Language,
    OpPair,
    Term,
    binary_from_fn,
    check_multimorphism,
    cost_function,
    cost_str,
    fuse_improve,
    op_properties,
)

submodular = Language(2, (cost_function(2, 2, [0, 2, 2, 2]),), "finite")
cut = Language(2, (cost_function(2, 2, [1, 0, 0, 1]),), "finite")

min_max = OpPair(binary_from_fn(2, min), binary_from_fn(2, max))
print("properties of min:", sorted(op_properties(min_max.meet)))

print("\n<min,max> vs submodular:", check_multimorphism(min_max, submodular).holds)

report = check_multimorphism(min_max, cut)
print("<min,max> vs cut:       ", report.holds)
v = report.violation
print("  violation at x =", v.args[0], "y =", v.args[1],
      "->", cost_str(v.lhs), ">", cost_str(v.rhs))

# Fusion: applying the verified pair componentwise to two assignments never
# increases the total cost of any instance over the language.
instance = Instance(3, (Term(0, (0, 1)), Term(0, (1, 2))))
fusion = fuse_improve(instance, submodular, [(0, 1, 0), (1, 0, 1)], min_max)
print("\nfusing", fusion.inputs[0], "and", fusion.inputs[1])
print("  meets ->", fusion.fused[0], " joins ->", fusion.fused[1])
print("  total before:", cost_str(fusion.total_in),
      " after:", cost_str(fusion.total_out))
