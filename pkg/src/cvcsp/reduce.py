"""Language and instance rewrites: feasibility/min-cost-homomorphism views,
the unary cap transform, the MinHom-to-original reduction, and binary
decomposition of relations.

Both instance reductions come with exact answer-recovery guarantees that the
test suite checks against the brute-force solver:

* ``cap_reduce`` leaves every finite assignment cost untouched and pushes
  every infeasible assignment to at least the returned threshold, so the
  reduced instance decides the original exactly.
* ``minhom_reduce`` scales every in-domain cost into the band
  ``N*C*f(x) <= f_C(x) < N*C*(f(x) + 1)``, so the original optimum is the
  reduced optimum integer-divided by ``N*C``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import (
    INF,
    CostFunction,
    Instance,
    Language,
    StructuralError,
    Term,
    is_finite,
    unary as unary_fn,
)


def derive_language(language: Language, mode: str) -> Language:
    """``feas`` crispifies every table (finite -> 0); ``minhom`` additionally
    marks the finite unary closure; ``bar`` marks the general unary closure."""
    if mode == "feas":
        fns = tuple(
            CostFunction(f.arity, f.domain_size,
                         tuple(Fraction(0) if is_finite(v) else INF for v in f.table))
            for f in language.functions)
        return Language(language.domain_size, fns, language.unary_closure)
    if mode == "minhom":
        feas = derive_language(language, "feas")
        return Language(feas.domain_size, feas.functions, "finite")
    if mode == "bar":
        return Language(language.domain_size, language.functions, "general")
    raise StructuralError(f"unknown mode {mode!r} (expected feas, minhom, or bar)")


@dataclass(frozen=True)
class CapReduction:
    instance: Instance
    language: Language
    cap: Fraction        # C
    copies: int          # N
    threshold: Fraction  # N * C; costs at or above it mean "infeasible"


def cap_reduce(instance: Instance, language: Language) -> CapReduction:
    """Replace general-valued unary terms by finite ones, preserving every
    finite total exactly and separating infeasible assignments by a threshold.

    Each general unary u splits into its finite part (kept once) and a cap
    indicator charging C at u's infinite labels (repeated N times): feasible
    assignments never touch an indicator, and any assignment that was
    infeasible through a unary now pays at least N*C, which exceeds every
    achievable finite total since C is one more than the sum of per-term
    finite maxima.
    """
    instance.validate(language)
    d = language.domain_size

    bound = Fraction(0)
    for fn_idx, _ in instance.terms:
        m = language.functions[fn_idx].max_finite()
        if m is not None:
            bound += m
    cap = bound + 1
    copies = max(len(instance.terms), 1)

    # General unary slots are replaced in place by their finite parts, so the
    # reduced instance never references a unary with infinities; the cap
    # indicators are appended at the end.
    new_functions = list(language.functions)
    general_unary = [fn.arity == 1 and not fn.is_finite_valued
                     for fn in language.functions]
    for i, fn in enumerate(language.functions):
        if general_unary[i]:
            new_functions[i] = unary_fn(tuple(v if is_finite(v) else Fraction(0)
                                              for v in fn.table))

    indicator_idx: dict[int, int] = {}
    for i, fn in enumerate(language.functions):
        if general_unary[i] and i not in indicator_idx:
            indicator_idx[i] = len(new_functions)
            new_functions.append(unary_fn(tuple(Fraction(0) if is_finite(v) else cap
                                                for v in fn.table)))

    new_terms: list[Term] = []
    for fn_idx, scope in instance.terms:
        new_terms.append(Term(fn_idx, scope))
        if general_unary[fn_idx]:
            new_terms.extend(Term(indicator_idx[fn_idx], scope)
                             for _ in range(copies))

    closure = "finite" if language.unary_closure == "general" else language.unary_closure
    reduced = Instance(instance.num_vars, tuple(new_terms))
    new_language = Language(d, tuple(new_functions), closure)
    reduced.validate(new_language)
    return CapReduction(reduced, new_language, cap, copies, copies * cap)


@dataclass(frozen=True)
class MinHomReduction:
    instance: Instance
    language: Language
    cap: Fraction   # C
    copies: int     # N
    scale: Fraction  # N * C

    def recover(self, reduced_optimum) -> Fraction | float:
        """Original optimum from the reduced one: floor(opt' / (N*C))."""
        if not is_finite(reduced_optimum):
            return INF
        return Fraction(int(reduced_optimum / self.scale))


def minhom_reduce(instance: Instance, language: Language,
                  originals: dict[int, CostFunction]) -> MinHomReduction:
    """Rewrite a min-cost-homomorphism instance (crisp non-unary terms with
    integer unaries) over the original general-valued functions.

    ``originals`` maps each non-unary function index to its general-valued
    preimage, which must be infinite exactly where the crisp function is.
    Unary terms are scaled by C and repeated N times; non-unary terms are
    swapped for their preimages, whose finite values stay below C.  For any
    in-domain assignment the reduced cost then lands in
    ``[N*C*f(x), N*C*(f(x)+1))``.
    """
    instance.validate(language)
    d = language.domain_size

    unary_terms = [t for t in instance.terms
                   if language.functions[t.fn].arity == 1]
    star_terms = [t for t in instance.terms
                  if language.functions[t.fn].arity >= 2]

    for t in unary_terms:
        fn = language.functions[t.fn]
        for v in fn.table:
            if is_finite(v) and v.denominator != 1:
                raise StructuralError(
                    "minhom reduction needs integer unary costs, "
                    f"found {v} in function {t.fn}")
    for t in star_terms:
        fn = language.functions[t.fn]
        if not fn.is_crisp:
            raise StructuralError(
                f"non-unary function {t.fn} must be crisp in a MinHom instance")
        if t.fn not in originals:
            raise StructuralError(f"no original provided for function {t.fn}")
        orig = originals[t.fn]
        if orig.arity != fn.arity or orig.domain_size != fn.domain_size:
            raise StructuralError(f"original for function {t.fn} has a different shape")
        for crisp_v, orig_v in zip(fn.table, orig.table):
            if is_finite(crisp_v) != is_finite(orig_v):
                raise StructuralError(
                    f"original for function {t.fn} disagrees on the effective domain")

    cap = Fraction(0)
    for t in star_terms:
        m = originals[t.fn].max_finite()
        if m is not None and m > cap:
            cap = m
    cap += 1
    copies = max(len(star_terms), 1)

    new_functions: list[CostFunction] = []
    new_terms: list[Term] = []
    cache: dict[tuple, int] = {}

    def intern(fn: CostFunction) -> int:
        key = (fn.arity, fn.table)
        if key not in cache:
            cache[key] = len(new_functions)
            new_functions.append(fn)
        return cache[key]

    for t in unary_terms:
        fn = language.functions[t.fn]
        scaled = unary_fn(tuple(v * cap if is_finite(v) else INF for v in fn.table))
        idx = intern(scaled)
        new_terms.extend(Term(idx, t.scope) for _ in range(copies))
    for t in star_terms:
        new_terms.append(Term(intern(originals[t.fn]), t.scope))

    reduced = Instance(instance.num_vars, tuple(new_terms))
    new_language = Language(d, tuple(new_functions), language.unary_closure)
    reduced.validate(new_language)
    return MinHomReduction(reduced, new_language, cap, copies, copies * cap)


@dataclass(frozen=True)
class BinaryDecomposition:
    """Unary and binary projections of a relation plus whether they cut out
    exactly its effective domain."""

    unary: dict[int, CostFunction]
    binary: dict[tuple[int, int], CostFunction]
    exact: bool


def binary_decompose(f: CostFunction) -> BinaryDecomposition:
    """Project f's costs onto every coordinate and ordered coordinate pair;
    ``exact`` reports whether the conjunction of the projections' effective
    domains reproduces dom f (checked exhaustively)."""
    if f.arity < 2:
        raise StructuralError("decomposition needs arity >= 2")
    d = f.domain_size
    m = f.arity

    unary_parts: dict[int, CostFunction] = {}
    for i in range(m):
        table = [INF] * d
        for u in product(range(d), repeat=m):
            c = f.value(u)
            if c < table[u[i]]:
                table[u[i]] = c
        unary_parts[i] = unary_fn(tuple(table))

    binary_parts: dict[tuple[int, int], CostFunction] = {}
    for i in range(m):
        for j in range(m):
            if i == j:
                continue
            table = [INF] * (d * d)
            for u in product(range(d), repeat=m):
                c = f.value(u)
                idx = u[i] * d + u[j]
                if c < table[idx]:
                    table[idx] = c
            binary_parts[(i, j)] = CostFunction(2, d, tuple(table))

    exact = True
    dom = set(f.effective_domain())
    for u in product(range(d), repeat=m):
        implied = all(is_finite(unary_parts[i].table[u[i]]) for i in range(m)) and all(
            is_finite(binary_parts[(i, j)].table[u[i] * d + u[j]])
            for i in range(m) for j in range(m) if i != j)
        if implied != (u in dom):
            exact = False
            break
    return BinaryDecomposition(unary_parts, binary_parts, exact)
