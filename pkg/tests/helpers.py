"""Shared builders for the test suite: canonical languages and seeded
random generators (kept independent of the CLI's generator on purpose)."""

import random
from fractions import Fraction

from cvcsp import (
    INF,
    CostFunction,
    Instance,
    Language,
    OpPair,
    Term,
    binary_from_fn,
    cost_function,
    crisp_relation,
    ternary_from_fn,
)


def submodular_language() -> Language:
    """f(0,0)=0, f(0,1)=f(1,0)=2, f(1,1)=2: admits <min, max>."""
    return Language(2, (cost_function(2, 2, [0, 2, 2, 2]),), "finite")


def cut_language() -> Language:
    """f(0,0)=f(1,1)=1, f(0,1)=f(1,0)=0: the max-cut style objective."""
    return Language(2, (cost_function(2, 2, [1, 0, 0, 1]),), "finite")


def diseq_language() -> Language:
    return Language(2, (crisp_relation(2, 2, [(0, 1), (1, 0)]),), "finite")


def parity_language() -> Language:
    """Crisp ternary even-parity relation on {0,1}."""
    triples = [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)
               if a ^ b ^ c == 0]
    return Language(2, (crisp_relation(2, 3, triples),), "finite")


def min_max_pair(d: int = 2) -> OpPair:
    return OpPair(binary_from_fn(d, min), binary_from_fn(d, max))


def projection_pair(d: int = 2) -> OpPair:
    return OpPair(binary_from_fn(d, lambda a, b: a), binary_from_fn(d, lambda a, b: b))


def boolean_majority():
    return ternary_from_fn(2, lambda a, b, c: (a + b + c) // 2)


def boolean_parity_op():
    return ternary_from_fn(2, lambda a, b, c: a ^ b ^ c)


def random_cost(rng: random.Random, style: str):
    r = rng.random()
    if style == "crisp":
        return Fraction(0) if r < 0.6 else INF
    if style == "finite":
        return Fraction(rng.randint(0, 6))
    return INF if r < 0.25 else Fraction(rng.randint(0, 6))


def random_language(rng: random.Random, domain_size: int, n_functions: int = 1,
                    max_arity: int = 2, style: str = "general") -> Language:
    fns = []
    for _ in range(n_functions):
        arity = rng.randint(1, max_arity)
        table = tuple(random_cost(rng, style)
                      for _ in range(domain_size ** arity))
        fns.append(CostFunction(arity, domain_size, table))
    return Language(domain_size, tuple(fns), "finite")


def random_instance(rng: random.Random, language: Language, num_vars: int,
                    n_terms: int) -> Instance:
    terms = []
    for _ in range(n_terms):
        fi = rng.randrange(len(language.functions))
        arity = language.functions[fi].arity
        terms.append(Term(fi, tuple(rng.randrange(num_vars) for _ in range(arity))))
    return Instance(num_vars, tuple(terms))
