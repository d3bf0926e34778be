"""Exact costs, cost-function tables, languages, and instances.

A cost is a non-negative rational (`fractions.Fraction`) or the single
infinite cost ``INF`` (``math.inf``).  Arithmetic stays exact: rationals add
as fractions and infinity absorbs.  Finite floats are rejected at every
input boundary so no floating-point value can ever reach a comparison.

Tables are dense, row-major over labels ``0 .. domain_size-1``; entry
``table[i]`` of an arity-m function holds the cost of the label tuple whose
big-endian base-``domain_size`` encoding is ``i``.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, NamedTuple, Union

INF = math.inf

Cost = Union[Fraction, float]  # the float is only ever INF

# Dense tables keep desk-scale work simple; reject anything bigger loudly.
TABLE_CAP = 10 ** 6

UNARY_CLOSURES = ("none", "finite", "general")


class StructuralError(ValueError):
    """Malformed or mutually inconsistent inputs (not a math condition)."""


class CapabilityError(RuntimeError):
    """The request exceeds a desk-scale cap of this implementation."""


def as_cost(value) -> Cost:
    """Coerce ``value`` to an exact cost.

    Accepts non-negative ints, Fractions, strings like ``"7/2"`` or
    ``"inf"``, and ``math.inf``.  Finite floats and negative values are
    rejected.
    """
    if isinstance(value, Fraction):
        cost = value
    elif isinstance(value, bool):
        raise StructuralError(f"not a cost: {value!r}")
    elif isinstance(value, int):
        cost = Fraction(value)
    elif isinstance(value, float):
        if value == INF:
            return INF
        raise StructuralError(f"finite float cost rejected (use int or 'p/q'): {value!r}")
    elif isinstance(value, str):
        if value.strip().lower() == "inf":
            return INF
        try:
            cost = Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise StructuralError(f"not a cost: {value!r}") from exc
    else:
        raise StructuralError(f"not a cost: {value!r}")
    if cost < 0:
        raise StructuralError(f"negative cost rejected: {value!r}")
    return cost


def is_finite(cost: Cost) -> bool:
    return cost is not INF and cost != INF


def cost_str(cost: Cost) -> str:
    """Exact display form: ``"7/2"``, ``"3"``, or ``"inf"``. Never a float."""
    return "inf" if not is_finite(cost) else str(cost)


def cost_to_json(cost: Cost):
    """JSON form: plain int when integral, else ``"p/q"``, else ``"inf"``."""
    if not is_finite(cost):
        return "inf"
    if cost.denominator == 1:
        return int(cost)
    return str(cost)


@dataclass(frozen=True)
class CostFunction:
    """A dense cost table ``D^arity -> costs`` with explicit arity.

    Immutable after construction; safe to share freely.
    """

    arity: int
    domain_size: int
    table: tuple[Cost, ...]

    def __post_init__(self):
        if self.arity < 1:
            raise StructuralError(f"arity must be positive, got {self.arity}")
        if self.domain_size < 2:
            raise StructuralError(f"domain size must be >= 2, got {self.domain_size}")
        size = self.domain_size ** self.arity
        if size > TABLE_CAP:
            raise CapabilityError(
                f"table of {size} entries exceeds the cap of {TABLE_CAP}")
        if len(self.table) != size:
            raise StructuralError(
                f"table length {len(self.table)} != {self.domain_size}^{self.arity}")
        object.__setattr__(self, "table", tuple(as_cost(v) for v in self.table))

    def index(self, labels) -> int:
        i = 0
        for lab in labels:
            if not 0 <= lab < self.domain_size:
                raise StructuralError(f"label {lab} outside 0..{self.domain_size - 1}")
            i = i * self.domain_size + lab
        return i

    def value(self, labels) -> Cost:
        if len(labels) != self.arity:
            raise StructuralError(
                f"expected {self.arity} labels, got {len(labels)}")
        return self.table[self.index(labels)]

    def __call__(self, *labels) -> Cost:
        return self.value(labels)

    def effective_domain(self) -> list[tuple[int, ...]]:
        """All label tuples with finite cost, in lexicographic order."""
        dom = []
        for i, labels in enumerate(product(range(self.domain_size), repeat=self.arity)):
            if is_finite(self.table[i]):
                dom.append(labels)
        return dom

    @property
    def is_crisp(self) -> bool:
        return all(v == 0 or not is_finite(v) for v in self.table)

    @property
    def is_finite_valued(self) -> bool:
        return all(is_finite(v) for v in self.table)

    def max_finite(self) -> Fraction | None:
        """Largest finite entry, or None for the all-infinite table."""
        best = None
        for v in self.table:
            if is_finite(v) and (best is None or v > best):
                best = v
        return best

    def transpose(self) -> "CostFunction":
        if self.arity != 2:
            raise StructuralError("transpose is defined for binary functions only")
        d = self.domain_size
        return CostFunction(2, d, tuple(self.table[b * d + a]
                                        for a in range(d) for b in range(d)))


def cost_function(domain_size: int, arity: int, values: Iterable) -> CostFunction:
    return CostFunction(arity, domain_size, tuple(values))


def unary(values: Iterable) -> CostFunction:
    values = tuple(values)
    return CostFunction(1, len(values), values)


def crisp_unary(domain_size: int, allowed: Iterable[int]) -> CostFunction:
    """0 on ``allowed`` labels, infinite elsewhere."""
    allowed = set(allowed)
    return CostFunction(1, domain_size,
                        tuple(0 if a in allowed else INF for a in range(domain_size)))


def penalty_unary(domain_size: int, label: int, amount) -> CostFunction:
    """Charges ``amount`` at ``label`` and 0 elsewhere."""
    amount = as_cost(amount)
    if not is_finite(amount):
        raise StructuralError("penalty amount must be finite")
    return CostFunction(1, domain_size,
                        tuple(amount if a == label else Fraction(0)
                              for a in range(domain_size)))


def crisp_relation(domain_size: int, arity: int, tuples: Iterable) -> CostFunction:
    """Crisp function: 0 on the listed tuples, infinite elsewhere."""
    members = {tuple(t) for t in tuples}
    table = tuple(Fraction(0) if labels in members else INF
                  for labels in product(range(domain_size), repeat=arity))
    return CostFunction(arity, domain_size, table)


@dataclass(frozen=True)
class Language:
    """A finite set of cost functions over a common domain.

    ``unary_closure`` records which unary functions are implicitly present
    in addition to the listed ones: ``"finite"`` means every finite-valued
    unary (the conservative case), ``"general"`` additionally every unary
    with infinities.  The infinitely many implied unaries are never
    materialized; checks account for them analytically and gadgets
    instantiate the finitely many they need.
    """

    domain_size: int
    functions: tuple[CostFunction, ...]
    unary_closure: str = "none"

    def __post_init__(self):
        object.__setattr__(self, "functions", tuple(self.functions))
        if self.unary_closure not in UNARY_CLOSURES:
            raise StructuralError(
                f"unary_closure must be one of {UNARY_CLOSURES}, got {self.unary_closure!r}")
        if self.domain_size < 2:
            raise StructuralError(f"domain size must be >= 2, got {self.domain_size}")
        for i, fn in enumerate(self.functions):
            if fn.domain_size != self.domain_size:
                raise StructuralError(
                    f"functions[{i}] has domain size {fn.domain_size}, language has {self.domain_size}")

    @property
    def is_conservative(self) -> bool:
        return self.unary_closure in ("finite", "general")

    def extended(self, extra: Iterable[CostFunction]) -> "Language":
        """Same language with extra functions appended (indices preserved)."""
        return Language(self.domain_size, self.functions + tuple(extra), self.unary_closure)


class Term(NamedTuple):
    fn: int
    scope: tuple[int, ...]


@dataclass(frozen=True)
class Instance:
    """A sum of language terms over ``num_vars`` finite-domain variables."""

    num_vars: int
    terms: tuple[Term, ...]

    def __post_init__(self):
        if self.num_vars < 0:
            raise StructuralError("num_vars must be non-negative")
        object.__setattr__(
            self, "terms",
            tuple(Term(int(fn), tuple(int(v) for v in scope)) for fn, scope in self.terms))

    def validate(self, language: Language) -> None:
        for t, (fn, scope) in enumerate(self.terms):
            if not 0 <= fn < len(language.functions):
                raise StructuralError(f"terms[{t}] references function {fn}, "
                                      f"language has {len(language.functions)}")
            arity = language.functions[fn].arity
            if len(scope) != arity:
                raise StructuralError(
                    f"terms[{t}] scope length {len(scope)} != arity {arity}")
            for v in scope:
                if not 0 <= v < self.num_vars:
                    raise StructuralError(
                        f"terms[{t}] scope variable {v} outside 0..{self.num_vars - 1}")


Assignment = tuple[int, ...]


def evaluate(instance: Instance, language: Language, x) -> Cost:
    """Exact total cost of assignment ``x``; infinite as soon as a term is."""
    x = tuple(x)
    if len(x) != instance.num_vars:
        raise StructuralError(
            f"assignment length {len(x)} != num_vars {instance.num_vars}")
    instance.validate(language)
    total: Cost = Fraction(0)
    for fn, scope in instance.terms:
        c = language.functions[fn].value(tuple(x[v] for v in scope))
        if not is_finite(c):
            return INF
        total += c
    return total


def effective_domain(fn: CostFunction) -> list[tuple[int, ...]]:
    return fn.effective_domain()


# ---------------------------------------------------------------------------
# JSON formats
#
# Language file: { "domain_size": d, "unary_closure": "none"|"finite"|"general",
#                  "functions": [ { "arity": m, "table": [cost, ...] } ] }
# Instance file: { "num_vars": n, "terms": [ { "fn": i, "scope": [v, ...] } ] }
# A cost is an integer, a string "p/q", or "inf".
# ---------------------------------------------------------------------------


def _expect(obj, key, where):
    if not isinstance(obj, dict):
        raise StructuralError(f"{where}: expected an object")
    if key not in obj:
        raise StructuralError(f"{where}: missing key {key!r}")
    return obj[key]


def language_from_json(obj, where: str = "language") -> Language:
    d = _expect(obj, "domain_size", where)
    closure = obj.get("unary_closure", "none")
    raw_fns = _expect(obj, "functions", where)
    if not isinstance(raw_fns, list):
        raise StructuralError(f"{where}.functions: expected a list")
    fns = []
    for i, raw in enumerate(raw_fns):
        here = f"{where}.functions[{i}]"
        arity = _expect(raw, "arity", here)
        table = _expect(raw, "table", here)
        if not isinstance(table, list):
            raise StructuralError(f"{here}.table: expected a list")
        try:
            fns.append(CostFunction(arity, d, tuple(as_cost(v) for v in table)))
        except StructuralError as exc:
            raise StructuralError(f"{here}: {exc}") from exc
    return Language(d, tuple(fns), closure)


def language_to_json(language: Language) -> dict:
    return {
        "domain_size": language.domain_size,
        "unary_closure": language.unary_closure,
        "functions": [
            {"arity": fn.arity, "table": [cost_to_json(v) for v in fn.table]}
            for fn in language.functions
        ],
    }


def instance_from_json(obj, where: str = "instance") -> Instance:
    n = _expect(obj, "num_vars", where)
    raw_terms = _expect(obj, "terms", where)
    if not isinstance(raw_terms, list):
        raise StructuralError(f"{where}.terms: expected a list")
    terms = []
    for i, raw in enumerate(raw_terms):
        here = f"{where}.terms[{i}]"
        terms.append(Term(_expect(raw, "fn", here), tuple(_expect(raw, "scope", here))))
    return Instance(n, tuple(terms))


def instance_to_json(instance: Instance) -> dict:
    return {
        "num_vars": instance.num_vars,
        "terms": [{"fn": fn, "scope": list(scope)} for fn, scope in instance.terms],
    }


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def language_sha256(language: Language) -> str:
    return hashlib.sha256(canonical_json(language_to_json(language)).encode()).hexdigest()
