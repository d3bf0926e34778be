import random
from fractions import Fraction

import pytest

from cvcsp import (
    CapabilityError,
    Language,
    OpPair,
    OpTriple,
    binary_from_fn,
    check_mjn_on,
    check_multimorphism,
    check_stp_on,
    op_properties,
    search_majority,
    search_stp,
    ternary_from_fn,
    unary,
)
from helpers import (
    boolean_majority,
    boolean_parity_op,
    cut_language,
    diseq_language,
    min_max_pair,
    parity_language,
    projection_pair,
    random_language,
    submodular_language,
)


class TestOpProperties:
    def test_min_is_lattice_like(self):
        props = op_properties(binary_from_fn(2, min))
        assert props == {"conservative", "commutative", "idempotent"}

    def test_parity_is_minority(self):
        props = op_properties(boolean_parity_op())
        assert "minority" in props and "conservative" in props and "idempotent" in props
        assert "majority" not in props

    def test_first_projection(self):
        props = op_properties(binary_from_fn(2, lambda a, b: a))
        assert props == {"conservative", "idempotent"}

    def test_boolean_majority_flags(self):
        assert "majority" in op_properties(boolean_majority())


class TestCheckMultimorphism:
    def test_min_max_on_submodular_holds(self):
        assert check_multimorphism(min_max_pair(), submodular_language()).holds

    def test_min_max_on_cut_violates(self):
        report = check_multimorphism(min_max_pair(), cut_language())
        assert not report.holds
        v = report.violation
        assert v.args == ((0, 1), (1, 0))
        assert v.lhs == Fraction(2) and v.rhs == Fraction(0)

    def test_mjn_on_diseq_holds_with_equality(self):
        triple = OpTriple(boolean_majority(), boolean_majority(), boolean_parity_op())
        assert check_multimorphism(triple, diseq_language()).holds

    def test_polymorphism_form(self):
        maj = boolean_majority()
        assert check_multimorphism(maj, diseq_language()).holds
        assert not check_multimorphism(maj, parity_language()).holds

    def test_domain_mismatch_is_structural(self):
        from cvcsp import StructuralError
        with pytest.raises(StructuralError):
            check_multimorphism(min_max_pair(3), submodular_language())

    def test_monotone_under_language_extension(self):
        # a violation for a sub-language stays a violation for the superset
        rng = random.Random(5)
        for _ in range(40):
            lang = random_language(rng, 2, 2, 2, "general")
            sub = Language(lang.domain_size, lang.functions[:1], lang.unary_closure)
            rep_sub = check_multimorphism(min_max_pair(), sub)
            if not rep_sub.holds and rep_sub.violation.fn_index is not None:
                rep_full = check_multimorphism(min_max_pair(), lang)
                assert not rep_full.holds

    def test_unary_closure_rejects_non_multiset_preserving_pair(self):
        # meet = join = min collapses {0,1} to {0,0}: some finite unary objects
        collapse = OpPair(binary_from_fn(2, min), binary_from_fn(2, min))
        lang = Language(2, (), "finite")
        report = check_multimorphism(collapse, lang)
        assert not report.holds
        v = report.violation
        assert v.fn_index is None and v.witness_fn is not None
        # the synthesized unary reproduces the failed inequality
        u = v.witness_fn
        lhs = sum((u.value(o) for o in v.outputs), Fraction(0))
        rhs = sum((u.value(a) for a in v.args), Fraction(0))
        assert lhs > rhs

    def test_general_closure_requires_conservative_polymorphism(self):
        const0 = binary_from_fn(2, lambda a, b: 0)
        assert check_multimorphism(const0, Language(2, (), "finite")).holds
        assert not check_multimorphism(const0, Language(2, (), "general")).holds


class TestCheckShapes:
    def test_min_max_is_stp_on_all_pairs(self):
        assert check_stp_on(min_max_pair(), [(0, 1)]).holds

    def test_projections_pass_with_empty_m(self):
        assert check_stp_on(projection_pair(), []).holds
        assert not check_stp_on(projection_pair(), [(0, 1)]).holds

    def test_mjn_shape_rejects_projection_minority(self):
        proj = ternary_from_fn(2, lambda a, b, c: a)
        triple = OpTriple(boolean_majority(), boolean_majority(), proj)
        report = check_mjn_on(triple, [])  # complement = {{0,1}}
        assert not report.holds
        assert report.violation.args == ((0,), (0,), (1,))  # mn3(0,0,1) must be 1

    def test_mjn_shape_accepts_maj_maj_parity(self):
        triple = OpTriple(boolean_majority(), boolean_majority(), boolean_parity_op())
        assert check_mjn_on(triple, []).holds
        # with the pair inside m_set nothing is required there
        assert check_mjn_on(triple, [(0, 1)]).holds


class TestSearchMajority:
    def test_diseq_has_the_unique_boolean_majority(self):
        result = search_majority(diseq_language())
        assert result.op is not None
        assert result.op.table == boolean_majority().table

    def test_parity_refuted_exhaustively(self):
        result = search_majority(parity_language())
        assert result.op is None and result.exhaustive
        assert len(result.refutations) == 1  # the unique Boolean majority
        r = result.refutations[0]
        assert r.output not in set(parity_language().functions[0].effective_domain())

    def test_empty_language_vacuous(self):
        result = search_majority(Language(2, (), "finite"))
        assert result.op is not None

    def test_backtracking_agrees_with_exhaustive(self):
        rng = random.Random(9)
        for _ in range(30):
            lang = random_language(rng, rng.choice([2, 3]), 1, 2, "crisp")
            a = search_majority(lang, "exhaustive")
            b = search_majority(lang, "backtracking")
            assert (a.op is None) == (b.op is None)
            if a.op is not None:
                assert check_multimorphism(a.op, lang).holds

    def test_exhaustive_capped_at_three(self):
        with pytest.raises(CapabilityError):
            search_majority(random_language(random.Random(0), 4), "exhaustive")

    def test_node_cap_reports_non_exhaustive(self):
        result = search_majority(parity_language(), "backtracking", node_cap=0)
        assert result.op is None and not result.exhaustive


class TestSearchStp:
    def test_submodular_finds_min_max(self):
        pair = search_stp(submodular_language(), [(0, 1)])
        assert pair is not None
        assert pair.meet.table == binary_from_fn(2, min).table
        assert pair.join.table == binary_from_fn(2, max).table

    def test_cut_has_no_orientation(self):
        assert search_stp(cut_language(), [(0, 1)]) is None

    def test_empty_m_set_projections_on_diseq(self):
        pair = search_stp(diseq_language(), [])
        assert pair is not None
        assert pair.meet.table == projection_pair().meet.table
        assert pair.join.table == projection_pair().join.table

    def test_found_pair_reverifies(self):
        rng = random.Random(21)
        for _ in range(30):
            lang = random_language(rng, 2, 1, 2, "finite")
            pair = search_stp(lang, [(0, 1)])
            if pair is not None:
                assert check_multimorphism(pair, lang).holds
                assert check_stp_on(pair, [(0, 1)]).holds

    def test_pair_cap(self):
        big = Language(10, (unary([0] * 10),), "finite")
        pairs = [(a, b) for a in range(10) for b in range(a + 1, 10)][:21]
        with pytest.raises(CapabilityError):
            search_stp(big, pairs)
