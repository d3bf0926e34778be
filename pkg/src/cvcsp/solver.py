"""Exact brute-force solving and multimorphism-guided assignment fusion.

``brute_force_solve`` is the oracle every other component is compared
against: it enumerates the full assignment space (capped), keeps the exact
minimum, and breaks ties toward the lexicographically least assignment.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import (
    INF,
    CapabilityError,
    Cost,
    Instance,
    Language,
    StructuralError,
    evaluate,
    is_finite,
)
from .ops import MmReport, OpPair, OpTriple, check_multimorphism

ENUMERATION_CAP = 10 ** 7


@dataclass(frozen=True)
class Solution:
    assignment: tuple[int, ...]
    cost: Cost
    optimal: bool = True

    @property
    def feasible(self) -> bool:
        return is_finite(self.cost)


def _scan(language: Language, terms, num_vars: int, first_label: int | None,
          domain_size: int):
    """Minimum over all assignments (optionally with the first variable
    pinned), returned as (cost, assignment) with lexicographic tie-break."""
    tables = [language.functions[fn].table for fn, _ in terms]
    scopes = [scope for _, scope in terms]
    d = domain_size
    best_cost: Cost = INF
    best_x = None
    if first_label is None:
        space = product(range(d), repeat=num_vars)
    else:
        space = ((first_label,) + rest
                 for rest in product(range(d), repeat=num_vars - 1))
    for x in space:
        total: Cost = Fraction(0)
        for table, scope in zip(tables, scopes):
            idx = 0
            for v in scope:
                idx = idx * d + x[v]
            c = table[idx]
            if c is INF:
                total = INF
                break
            total += c
        if best_x is None or total < best_cost:
            best_cost = total
            best_x = x
    return best_cost, best_x


def brute_force_solve(instance: Instance, language: Language,
                      cap: int = ENUMERATION_CAP, workers: int = 1) -> Solution:
    """Exhaustive exact minimum; lexicographically least among optima.

    Returns an infinite-cost Solution (still with the lexicographically
    least assignment) when every assignment is infeasible.
    """
    instance.validate(language)
    d = language.domain_size
    n = instance.num_vars
    if d ** n > cap:
        raise CapabilityError(f"{d}^{n} assignments exceed the cap of {cap}")
    if n == 0:
        return Solution((), Fraction(0))

    if workers > 1 and n >= 2:
        results = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_scan, language, instance.terms, n, lab, d)
                       for lab in range(d)]
            results = [f.result() for f in futures]
        # First-label order equals lexicographic order, so the first strict
        # minimum wins ties deterministically.
        best_cost, best_x = results[0]
        for cost, x in results[1:]:
            if cost < best_cost:
                best_cost, best_x = cost, x
        return Solution(tuple(best_x), best_cost)

    cost, x = _scan(language, instance.terms, n, None, d)
    return Solution(tuple(x), cost)


@dataclass(frozen=True)
class Fusion:
    """Componentwise fusions of input assignments plus both exact totals."""

    inputs: tuple[tuple[int, ...], ...]
    fused: tuple[tuple[int, ...], ...]
    input_costs: tuple[Cost, ...]
    fused_costs: tuple[Cost, ...]

    @property
    def total_in(self) -> Cost:
        return _total(self.input_costs)

    @property
    def total_out(self) -> Cost:
        return _total(self.fused_costs)

    @property
    def improved(self) -> bool:
        return self.total_out < self.total_in


def _total(costs) -> Cost:
    total: Cost = Fraction(0)
    for c in costs:
        if not is_finite(c):
            return INF
        total += c
    return total


def fuse_improve(instance: Instance, language: Language, assignments, ops) -> Fusion:
    """Fuse two assignments through a verified pair (or three through a
    verified triple) and check the instance-level cost inequality.

    The operations are re-verified against the language first; unverified
    operations are rejected so no unsound "improvement" can be reported.
    When every input cost is finite the fused total is asserted to be no
    larger, which any true multimorphism guarantees term by term.
    """
    assignments = tuple(tuple(x) for x in assignments)
    if isinstance(ops, OpPair):
        appliers = (ops.meet, ops.join)
    elif isinstance(ops, OpTriple):
        appliers = (ops.mj1, ops.mj2, ops.mn3)
    else:
        raise StructuralError("fusion needs an OpPair or an OpTriple")
    if len(assignments) != len(appliers):
        raise StructuralError(
            f"{len(appliers)} operations need {len(appliers)} assignments, "
            f"got {len(assignments)}")

    report: MmReport = check_multimorphism(ops, language)
    if not report.holds:
        raise StructuralError(
            "operations are not a multimorphism of this language; "
            f"first violation: {report.violation.to_json()}")

    fused = tuple(tuple(op(*labels) for labels in zip(*assignments))
                  for op in appliers)
    input_costs = tuple(evaluate(instance, language, x) for x in assignments)
    fused_costs = tuple(evaluate(instance, language, x) for x in fused)
    result = Fusion(assignments, fused, input_costs, fused_costs)
    if all(is_finite(c) for c in input_costs) and not result.total_out <= result.total_in:
        raise AssertionError(
            "verified multimorphism increased the instance cost: "
            f"{result.total_out} > {result.total_in}")
    return result
