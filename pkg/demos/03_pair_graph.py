#!/usr/bin/env python3
"""The pair graph: how the expressive-power closure turns a language into a
combinatorial object whose self-loops decide hardness.

Nodes are ordered label pairs (a, b); an edge between (a, b) and (a', b')
needs a binary expressible function with
f(a,a') + f(b,b') > f(a,b') + f(b,a') and the right-hand points finite.  A
*soft* self-loop (one diagonal point finite) is already an NP-hardness
witness; pairs with no self-loop at all form the set where commutative
lattice behaviour will be demanded.
"""

from cvcsp import (
    Language,
    binary_closure,
    build_pair_graph,
    check_graph_consistency,
    cost_function,
    crisp_relation,
    find_soft_self_loop,
)
from cvcsp.graph import graph_to_dot

EXAMPLES = {
    "submodular": Language(2, (cost_function(2, 2, [0, 2, 2, 2]),), "finite"),
    "cut": Language(2, (cost_function(2, 2, [1, 0, 0, 1]),), "finite"),
    "disequality": Language(2, (crisp_relation(2, 2, [(0, 1), (1, 0)]),), "finite"),
}

for name, lang in EXAMPLES.items():
    closure = binary_closure(lang, budget_rounds=3, budget_size=64)
    g = build_pair_graph(closure)
    print(f"{name}:")
    print(f"  closure: {len(closure.members)} members, saturated={closure.saturated}")
    for (p, q), info in sorted(g.edges.items()):
        shape = "self-loop" if p == q else "edge"
        print(f"  {info.kind} {shape} at {p}" + ("" if p == q else f" -- {q}")
              + f"  (member m{info.member}: {closure.members[info.member].provenance})")
    print("  loop-free pairs:", sorted(g.m_set))
    loop = find_soft_self_loop(g)
    print("  soft self-loop:", loop[0] if loop else None)
    print(" ", check_graph_consistency(g).summary())
    print()

print("DOT rendering of the disequality graph:")
closure = binary_closure(EXAMPLES["disequality"], 3, 64)
print(graph_to_dot(build_pair_graph(closure)))
