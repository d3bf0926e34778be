import json
import random
from fractions import Fraction

import pytest

from cvcsp import (
    INF,
    CapabilityError,
    CostFunction,
    Instance,
    Language,
    StructuralError,
    Term,
    as_cost,
    cost_function,
    cost_str,
    crisp_relation,
    effective_domain,
    evaluate,
    instance_from_json,
    instance_to_json,
    language_from_json,
    language_to_json,
    unary,
)
from helpers import random_instance, random_language


class TestCosts:
    def test_parsing(self):
        assert as_cost(3) == Fraction(3)
        assert as_cost("7/2") == Fraction(7, 2)
        assert as_cost("inf") == INF
        assert as_cost(INF) == INF

    def test_rejects_bad_inputs(self):
        for bad in (-1, "-1/2", 0.5, "1/0", None, True):
            with pytest.raises(StructuralError):
                as_cost(bad)

    def test_display_is_exact(self):
        assert cost_str(Fraction(7, 2)) == "7/2"
        assert cost_str(Fraction(3)) == "3"
        assert cost_str(INF) == "inf"

    def test_addition_properties_random_triples(self):
        # associative, commutative, and absorbing on randomized triples
        rng = random.Random(7)
        pool = [Fraction(rng.randint(0, 50), rng.randint(1, 9)) for _ in range(40)]
        pool += [INF] * 8
        for _ in range(300):
            a, b, c = rng.choice(pool), rng.choice(pool), rng.choice(pool)
            assert (a + b) + c == a + (b + c)
            assert a + b == b + a
        assert INF + Fraction(5) == INF


class TestCostFunction:
    def test_table_length_enforced(self):
        with pytest.raises(StructuralError):
            CostFunction(2, 2, (0, 0, 0))

    def test_table_cap(self):
        with pytest.raises(CapabilityError):
            CostFunction(21, 2, ())

    def test_effective_domain_examples(self):
        neq = crisp_relation(2, 2, [(0, 1), (1, 0)])
        assert effective_domain(neq) == [(0, 1), (1, 0)]
        full = cost_function(2, 2, [1, 2, 3, 4])
        assert len(effective_domain(full)) == 4
        empty = cost_function(2, 1, [INF, INF])
        assert effective_domain(empty) == []

    def test_transpose(self):
        f = cost_function(2, 2, [0, 1, 2, 3])
        assert f.transpose().table == (Fraction(0), Fraction(2), Fraction(1), Fraction(3))


class TestEvaluate:
    def test_single_unary_identity(self):
        lang = Language(2, (unary([0, 5]),))
        inst = Instance(1, (Term(0, (0,)),))
        assert evaluate(inst, lang, (0,)) == 0

    def test_sum_of_two_reads(self):
        u = unary([0, 1])
        lang = Language(2, (u,))
        inst = Instance(2, (Term(0, (0,)), Term(0, (1,))))
        assert evaluate(inst, lang, (1, 1)) == 2

    def test_infinity_absorbs(self):
        f = cost_function(2, 2, [0, INF, 0, 0])
        lang = Language(2, (f,))
        inst = Instance(2, (Term(0, (0, 1)),))
        assert evaluate(inst, lang, (0, 1)) == INF

    def test_dimension_mismatch_rejected(self):
        lang = Language(2, (unary([0, 1]),))
        inst = Instance(2, (Term(0, (0,)),))
        with pytest.raises(StructuralError):
            evaluate(inst, lang, (0,))

    def test_finite_iff_every_term_in_domain(self):
        rng = random.Random(11)
        for _ in range(60):
            lang = random_language(rng, rng.choice([2, 3]), 2, 2, "general")
            inst = random_instance(rng, lang, 3, 3)
            for x in [(0, 0, 0), (1, 0, 1), (0, 1, 1)]:
                total = evaluate(inst, lang, x)
                in_dom = all(
                    tuple(x[v] for v in scope) in set(lang.functions[fn].effective_domain())
                    for fn, scope in inst.terms)
                assert (total != INF) == in_dom


class TestSerialization:
    def test_language_round_trip(self):
        rng = random.Random(3)
        for _ in range(40):
            lang = random_language(rng, rng.choice([2, 3]), 2, 2, "general")
            again = language_from_json(json.loads(json.dumps(language_to_json(lang))))
            assert again == lang

    def test_instance_round_trip(self):
        rng = random.Random(4)
        lang = random_language(rng, 2, 2, 2)
        for _ in range(20):
            inst = random_instance(rng, lang, 4, 5)
            again = instance_from_json(json.loads(json.dumps(instance_to_json(inst))))
            assert again == inst

    def test_cost_forms_accepted(self):
        obj = {"domain_size": 2, "unary_closure": "finite",
               "functions": [{"arity": 1, "table": [3, "7/2"]},
                             {"arity": 1, "table": ["inf", 0]}]}
        lang = language_from_json(obj)
        assert lang.functions[0].table == (Fraction(3), Fraction(7, 2))
        assert lang.functions[1].table == (INF, Fraction(0))

    def test_float_cost_rejected_with_path(self):
        obj = {"domain_size": 2, "unary_closure": "none",
               "functions": [{"arity": 1, "table": [0.5, 1]}]}
        with pytest.raises(StructuralError, match=r"functions\[0\]"):
            language_from_json(obj)

    def test_scope_validation(self):
        lang = Language(2, (unary([0, 1]),))
        Instance(1, (Term(0, (0,)),)).validate(lang)
        with pytest.raises(StructuralError):
            Instance(1, (Term(0, (1,)),)).validate(lang)
        with pytest.raises(StructuralError):
            Instance(1, (Term(0, (0, 0)),)).validate(lang)
        with pytest.raises(StructuralError):
            Instance(1, (Term(3, (0,)),)).validate(lang)
