import random

import pytest

from cvcsp import (
    CapabilityError,
    Language,
    StructuralError,
    check_mjn_on,
    check_multimorphism,
    check_stp_on,
    crisp_relation,
    verify_mjn,
)
from cvcsp.classify import (
    Budgets,
    NPHard,
    SoftSelfLoopWitness,
    Tractable,
    UnknownAtBudget,
    certificate,
    classify,
    replay_certificate,
)
from cvcsp.graph import edge_witness
from helpers import (
    cut_language,
    diseq_language,
    parity_language,
    random_language,
    submodular_language,
)


class TestVerdicts:
    def test_submodular_tractable_with_min_max(self):
        v = classify(submodular_language())
        assert isinstance(v, Tractable)
        assert v.m_set == frozenset({(0, 1)})
        assert v.stp.meet.table == (0, 0, 0, 1)
        assert v.stp.join.table == (0, 1, 1, 1)
        assert v.exit_code == 0

    def test_cut_np_hard_via_soft_self_loop_at_one_round(self):
        v = classify(cut_language(), Budgets(closure_rounds=1))
        assert isinstance(v, NPHard)
        assert isinstance(v.reason, SoftSelfLoopWitness)
        assert v.reason.node == (0, 1)
        assert v.exit_code == 2

    def test_parity_np_hard_via_majority_refutation(self):
        v = classify(parity_language())
        assert isinstance(v, NPHard)
        assert v.reason_kind == "no-majority"
        assert v.reason.exhaustive and v.reason.op is None

    def test_diseq_tractable_with_empty_m(self):
        v = classify(diseq_language())
        assert isinstance(v, Tractable)
        assert v.m_set == frozenset()
        # the constructed triple is majority/majority/parity
        assert v.triple.mj1.table == v.triple.mj2.table == (0, 0, 0, 1, 0, 1, 1, 1)
        assert v.triple.mn3.table == (0, 1, 1, 0, 1, 0, 0, 1)

    def test_three_domain_tractable_with_minority_witness(self):
        # a three-point pattern against a hard-looped pair routes triples
        # through the minority cases; the witness lands in the certificate
        pat = crisp_relation(3, 2, [(0, 0), (1, 0), (2, 1)])
        neq01 = crisp_relation(3, 2, [(0, 1), (1, 0)])
        lang = Language(3, (pat, neq01), "finite")
        v = classify(lang, Budgets(closure_rounds=3, closure_size=256))
        assert isinstance(v, Tractable)
        assert any(set(labels) == {0, 1, 2} and set(pair) == {0, 1}
                   for labels, pair, _, _ in v.minority_witnesses)
        ok, message = replay_certificate(certificate(v, lang), lang)
        assert ok, message

    def test_non_conservative_rejected(self):
        with pytest.raises(StructuralError):
            classify(Language(2, (), "none"))

    def test_domain_cap(self):
        lang = Language(5, (crisp_relation(5, 1, [(0,)]),), "finite")
        with pytest.raises(CapabilityError):
            classify(lang)

    def test_unknown_when_majority_search_capped(self):
        eq4 = crisp_relation(4, 2, [(a, a) for a in range(4)])
        lang = Language(4, (eq4,), "finite")
        v = classify(lang, Budgets(majority_nodes=0, closure_rounds=1, closure_size=64))
        assert isinstance(v, UnknownAtBudget)
        assert v.stage == "majority-search"
        assert v.exit_code == 3


class TestSoundness:
    def test_tractable_certificates_reverify(self):
        for lang in (submodular_language(), diseq_language()):
            v = classify(lang)
            assert isinstance(v, Tractable)
            assert check_multimorphism(v.stp, lang).holds
            assert check_stp_on(v.stp, v.m_set).holds
            assert check_mjn_on(v.triple, v.m_set).holds
            assert verify_mjn(v.triple, lang, m_set=v.m_set).holds

    def test_soft_loop_witness_replays(self):
        v = classify(cut_language(), Budgets(closure_rounds=1))
        assert edge_witness(v.reason.table, v.reason.node, v.reason.node) == "soft"

    def test_verdicts_deterministic(self):
        rng = random.Random(43)
        for _ in range(10):
            lang = random_language(rng, 2, 1, 2, "general")
            budgets = Budgets(closure_rounds=2, closure_size=48)
            a = classify(lang, budgets)
            b = classify(lang, budgets)
            assert a.kind == b.kind and a.trace == b.trace

    def test_finite_valued_tractable_has_full_m(self):
        # without infinities no hard loop can exist, so a tractable verdict
        # must carry every pair
        rng = random.Random(47)
        seen = 0
        for _ in range(30):
            lang = random_language(rng, 2, 1, 2, "finite")
            v = classify(lang, Budgets(closure_rounds=2, closure_size=48))
            if isinstance(v, Tractable):
                seen += 1
                assert v.m_set == frozenset({(0, 1)})
        assert seen > 0


class TestCertificates:
    def test_tractable_replay(self):
        for lang in (submodular_language(), diseq_language()):
            v = classify(lang)
            cert = certificate(v, lang)
            ok, message = replay_certificate(cert, lang)
            assert ok, message

    def test_np_hard_replays(self):
        for lang, budgets in ((cut_language(), Budgets(closure_rounds=1)),
                              (parity_language(), Budgets())):
            v = classify(lang, budgets)
            ok, message = replay_certificate(certificate(v, lang), lang)
            assert ok, message

    def test_wrong_language_rejected(self):
        v = classify(submodular_language())
        cert = certificate(v, submodular_language())
        ok, message = replay_certificate(cert, cut_language())
        assert not ok and "different language" in message

    def test_version_mismatch_fails_loudly(self):
        v = classify(submodular_language())
        cert = certificate(v, submodular_language())
        cert["tool_version"] = "0.0.0"
        ok, message = replay_certificate(cert, submodular_language())
        assert not ok and "version" in message

    def test_tampered_tables_rejected(self):
        lang = diseq_language()
        cert = certificate(classify(lang), lang)
        cert["triple"]["mn3"] = cert["triple"]["mj1"]
        ok, _ = replay_certificate(cert, lang)
        assert not ok

    def test_tampered_refutation_rejected(self):
        lang = parity_language()
        cert = certificate(classify(lang), lang)
        cert["reason"]["refutations"][0]["output"] = [0, 0, 0]
        ok, message = replay_certificate(cert, lang)
        assert not ok
