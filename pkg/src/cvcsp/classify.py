"""The tractable / NP-hard / unknown-at-budget classification pipeline.

A conservative language is NP-hard as soon as its pair graph shows a soft
self-loop, or when exhaustive search refutes every majority polymorphism of
its feasibility relations.  Otherwise the pipeline hunts for the tractability
certificate: a commutative conservative pair on the loop-free pairs plus a
majority/majority/minority triple on the rest, both verified against the
language by brute force.  Because the expressive-power closure is budgeted,
"unknown at budget" is an honest third verdict; it records the stage and
budgets so a retry can be targeted.

Verdicts serialize to replayable certificates: replaying performs zero
search, only direct verification of the stored witnesses.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

from .core import (
    CapabilityError,
    CostFunction,
    Language,
    StructuralError,
    cost_to_json,
    as_cost,
    language_sha256,
)
from .express import binary_closure
from .graph import (
    build_pair_graph,
    check_graph_consistency,
    edge_witness,
    find_soft_self_loop,
)
from .mjn import (
    MinorityConflictError,
    _pattern,
    compute_minority_map,
    construct_mjn,
    verify_mjn,
)
from .ops import (
    BinaryOp,
    MajoritySearch,
    OpPair,
    OpTriple,
    TernaryOp,
    _majority_fixed_table,
    check_multimorphism,
    check_stp_on,
    normalize_pairs,
    search_majority,
    search_stp,
)

TOOL_VERSION = "0.1.0"


@dataclass(frozen=True)
class Budgets:
    closure_rounds: int = 4
    closure_size: int = 256
    magnitude_bits: int = 128
    majority_nodes: int = 2_000_000
    max_domain: int = 4

    def to_json(self) -> dict:
        return {"closure_rounds": self.closure_rounds,
                "closure_size": self.closure_size,
                "magnitude_bits": self.magnitude_bits,
                "majority_nodes": self.majority_nodes,
                "max_domain": self.max_domain}


@dataclass(frozen=True)
class SoftSelfLoopWitness:
    node: tuple[int, int]
    member_index: int
    table: CostFunction
    provenance: str


@dataclass
class Tractable:
    m_set: frozenset
    stp: OpPair
    triple: OpTriple
    minority_witnesses: tuple  # (labels, pair, member_index, CostFunction)
    saturated: bool
    budgets: Budgets
    trace: tuple[str, ...]

    kind = "tractable"
    exit_code = 0


@dataclass
class NPHard:
    reason: object  # SoftSelfLoopWitness | MajoritySearch
    budgets: Budgets
    trace: tuple[str, ...]

    kind = "np-hard"
    exit_code = 2

    @property
    def reason_kind(self) -> str:
        return ("soft-self-loop" if isinstance(self.reason, SoftSelfLoopWitness)
                else "no-majority")


@dataclass
class UnknownAtBudget:
    stage: str
    budgets: Budgets
    trace: tuple[str, ...]

    kind = "unknown"
    exit_code = 3


Verdict = object  # Tractable | NPHard | UnknownAtBudget


def _m_subsets(m_set):
    """Candidate commutative-pair sets: subsets in decreasing size, then
    lexicographic, starting with the full set."""
    pairs = sorted(m_set)
    for size in range(len(pairs), -1, -1):
        for combo in combinations(pairs, size):
            yield frozenset(combo)


def classify(language: Language, budgets: Budgets = Budgets(),
             strategy: str | None = None) -> Verdict:
    """Deterministic verdict for a conservative language at the given budgets."""
    if not language.is_conservative:
        raise StructuralError(
            "classification requires a conservative language "
            "(unary_closure 'finite' or 'general')")
    d = language.domain_size
    if d > budgets.max_domain:
        raise CapabilityError(f"domain size {d} exceeds max_domain {budgets.max_domain}")

    trace = []
    closure = binary_closure(language, budgets.closure_rounds,
                             budgets.closure_size, budgets.magnitude_bits)
    trace.append(f"closure: {len(closure.members)} members after "
                 f"{closure.rounds_run} round(s), saturated={closure.saturated}")

    g = build_pair_graph(closure)
    trace.append(f"graph: {len(g.edges)} edge(s), m_set={sorted(g.m_set)}, "
                 f"truncated={g.truncated}")
    diag = check_graph_consistency(g)
    trace.append("graph diagnostics: ok" if diag.ok else
                 f"graph diagnostics: {len(diag.violations)} violation(s)")

    loop = find_soft_self_loop(g)
    if loop is not None:
        node, info = loop
        member = closure.members[info.member]
        trace.append(f"soft self-loop at {node} witnessed by member m{info.member} "
                     f"({member.provenance})")
        return NPHard(SoftSelfLoopWitness(node, info.member, member.fn,
                                          member.provenance),
                      budgets, tuple(trace))
    trace.append("no soft self-loop at this budget")

    strategy = strategy or ("exhaustive" if d <= 3 else "backtracking")
    search = search_majority(language, strategy, node_cap=budgets.majority_nodes)
    conservative = search_majority(language, strategy, conservative_only=True,
                                   node_cap=budgets.majority_nodes)
    trace.append(f"majority search ({strategy}): "
                 f"{'found' if search.op else 'none'} "
                 f"[{search.nodes} node(s), exhaustive={search.exhaustive}]; "
                 f"conservative-only variant: "
                 f"{'found' if conservative.op else 'none'}")
    if search.op is None:
        if search.exhaustive:
            return NPHard(search, budgets, tuple(trace))
        return UnknownAtBudget("majority-search", budgets, tuple(trace))

    for m_try in _m_subsets(g.m_set):
        label = sorted(m_try)
        stp = search_stp(language, m_try)
        if stp is None:
            trace.append(f"m={label}: no commutative orientation is a multimorphism")
            continue
        try:
            mm = compute_minority_map(closure, m_set=m_try)
        except MinorityConflictError as exc:
            trace.append(f"m={label}: minority-map inconsistency: {exc}")
            return UnknownAtBudget("minority-map", budgets, tuple(trace))
        triple = construct_mjn(mm, stp, m_try, d)
        rep_pair = check_multimorphism(stp, language)
        rep_shape = check_stp_on(stp, m_try)
        rep_triple = verify_mjn(triple, language, m_set=m_try)
        if rep_pair.holds and rep_shape.holds and rep_triple.holds:
            trace.append(f"m={label}: certificate verified "
                         f"({len(mm.entries)} minority entr(ies))")
            witnesses = tuple(
                (w.labels, w.pair, w.member, closure.members[w.member].fn)
                for w in sorted(mm.entries.values(), key=lambda w: w.labels))
            return Tractable(frozenset(m_try), stp, triple, witnesses,
                             closure.saturated, budgets, tuple(trace))
        failed = ("pair inequality" if not rep_pair.holds else
                  "pair shape" if not rep_shape.holds else "triple verification")
        trace.append(f"m={label}: {failed} failed")

    trace.append(f"all {2 ** len(g.m_set)} candidate commutative-pair sets failed "
                 f"(closure saturated={closure.saturated}, majority present)")
    return UnknownAtBudget("certificate-verification", budgets, tuple(trace))


# ---------------------------------------------------------------------------
# Certificates: serialization and zero-search replay
# ---------------------------------------------------------------------------


def _table_json(fn: CostFunction) -> list:
    return [cost_to_json(v) for v in fn.table]


def _op_json(op) -> list:
    return list(op.table)


def certificate(verdict: Verdict, language: Language) -> dict:
    cert = {
        "tool_version": TOOL_VERSION,
        "language_sha256": language_sha256(language),
        "domain_size": language.domain_size,
        "budgets": verdict.budgets.to_json(),
        "verdict": verdict.kind,
        "trace": list(verdict.trace),
    }
    if isinstance(verdict, Tractable):
        cert["m_set"] = sorted([list(p) for p in verdict.m_set])
        cert["stp"] = {"meet": _op_json(verdict.stp.meet),
                       "join": _op_json(verdict.stp.join)}
        cert["triple"] = {"mj1": _op_json(verdict.triple.mj1),
                          "mj2": _op_json(verdict.triple.mj2),
                          "mn3": _op_json(verdict.triple.mn3)}
        cert["minority_witnesses"] = [
            {"labels": list(labels), "pair": list(pair), "member": mi,
             "table": _table_json(fn)}
            for labels, pair, mi, fn in verdict.minority_witnesses]
        cert["closure_saturated"] = verdict.saturated
    elif isinstance(verdict, NPHard):
        if isinstance(verdict.reason, SoftSelfLoopWitness):
            w = verdict.reason
            cert["reason"] = {"kind": "soft-self-loop",
                              "node": list(w.node),
                              "member": w.member_index,
                              "provenance": w.provenance,
                              "table": _table_json(w.table)}
        else:
            s: MajoritySearch = verdict.reason
            cert["reason"] = {
                "kind": "no-majority",
                "strategy": s.strategy,
                "free_positions": [list(t) for t in s.free_positions],
                "nodes": s.nodes,
                "refutations": [
                    {"assignment": list(r.assignment), "fn": r.fn_index,
                     "args": [list(a) for a in r.args], "output": list(r.output)}
                    for r in s.refutations],
            }
    else:
        cert["stage"] = verdict.stage
    return cert


def _replay_tractable(cert: dict, language: Language):
    d = language.domain_size
    m_set = normalize_pairs(tuple(map(tuple, cert["m_set"])))
    stp = OpPair(BinaryOp(d, tuple(cert["stp"]["meet"])),
                 BinaryOp(d, tuple(cert["stp"]["join"])))
    triple = OpTriple(TernaryOp(d, tuple(cert["triple"]["mj1"])),
                      TernaryOp(d, tuple(cert["triple"]["mj2"])),
                      TernaryOp(d, tuple(cert["triple"]["mn3"])))
    if not check_multimorphism(stp, language).holds:
        return False, "stored pair is not a multimorphism of the language"
    if not check_stp_on(stp, m_set).holds:
        return False, "stored pair is not commutative/conservative as claimed"
    if not verify_mjn(triple, language, m_set=m_set).holds:
        return False, "stored triple fails verification against the language"
    for w in cert.get("minority_witnesses", []):
        fn = CostFunction(2, d, tuple(as_cost(v) for v in w["table"]))
        match = _pattern(fn.effective_domain())
        if match is None:
            return False, f"minority witness for {w['labels']} lacks the three-point pattern"
        (a, b, c), (a2, b2) = match
        if sorted((a, b, c)) != sorted(w["labels"]) or c != w["labels"][2]:
            return False, f"minority witness mismatch for {w['labels']}"
        if (min(a2, b2), max(a2, b2)) in m_set:
            return False, f"minority witness pair {w['pair']} is not self-looped"
    return True, "certificate valid"


def _replay_soft_self_loop(reason: dict, language: Language):
    d = language.domain_size
    fn = CostFunction(2, d, tuple(as_cost(v) for v in reason["table"]))
    node = tuple(reason["node"])
    if edge_witness(fn, node, node) != "soft":
        return False, "stored witness does not produce a soft self-loop"
    return True, "certificate valid"


def _replay_no_majority(reason: dict, language: Language):
    d = language.domain_size
    doms = [set(fn.effective_domain()) for fn in language.functions]

    def violates(entry, op_value) -> str | None:
        fn = entry["fn"]
        if not 0 <= fn < len(doms):
            return f"refutation references function {fn}"
        args = [tuple(a) for a in entry["args"]]
        output = tuple(entry["output"])
        if any(a not in doms[fn] for a in args):
            return "refutation argument outside the effective domain"
        if output in doms[fn]:
            return "claimed violation is not a violation"
        for i, coords in enumerate(zip(*args)):
            expected = op_value(coords)
            if expected is None:
                return "refutation depends on an unassigned table position"
            if expected != output[i]:
                return "output inconsistent with the candidate operation"
        return None

    fixed = _majority_fixed_table(d)
    free = [tuple(t) for t in reason["free_positions"]]
    refutations = reason["refutations"]

    if reason["strategy"] == "exhaustive":
        expected = list(product(range(d), repeat=len(free))) if free else [()]
        if len(refutations) != len(expected):
            return False, (f"refutation log covers {len(refutations)} of "
                           f"{len(expected)} candidates")
        for cand, entry in zip(expected, refutations):
            if tuple(entry["assignment"]) != cand:
                return False, "refutation log out of order"
            values = dict(zip(free, cand))

            def op_value(coords, values=values):
                return fixed.get(coords, values.get(coords))

            problem = violates(entry, op_value)
            if problem:
                return False, problem
        return True, "certificate valid"

    # Backtracking: refuted prefixes must tile the whole assignment space.
    leaves = []
    for entry in refutations:
        prefix = tuple(entry["assignment"])
        values = dict(zip(free[:len(prefix)], prefix))

        def op_value(coords, values=values):
            return fixed.get(coords, values.get(coords))

        problem = violates(entry, op_value)
        if problem:
            return False, problem
        leaves.append(prefix)

    leaf_set = set(leaves)

    def covered(prefix) -> bool:
        if prefix in leaf_set:
            return True
        if len(prefix) == len(free):
            return False
        return all(covered(prefix + (v,)) for v in range(d))

    if not covered(()):
        return False, "refuted prefixes do not cover the whole candidate space"
    return True, "certificate valid"


def replay_certificate(cert: dict, language: Language):
    """Re-verify a stored certificate with zero search.

    Fails loudly on any version or language mismatch rather than
    reinterpreting old data.
    """
    if cert.get("tool_version") != TOOL_VERSION:
        return False, (f"certificate version {cert.get('tool_version')!r} does not "
                       f"match tool version {TOOL_VERSION!r}")
    if cert.get("language_sha256") != language_sha256(language):
        return False, "certificate was issued for a different language"
    verdict = cert.get("verdict")
    if verdict == "tractable":
        return _replay_tractable(cert, language)
    if verdict == "np-hard":
        reason = cert.get("reason", {})
        if reason.get("kind") == "soft-self-loop":
            return _replay_soft_self_loop(reason, language)
        if reason.get("kind") == "no-majority":
            return _replay_no_majority(reason, language)
        return False, f"unknown hardness reason {reason.get('kind')!r}"
    if verdict == "unknown":
        return True, "certificate valid (records an unknown-at-budget verdict)"
    return False, f"unknown verdict {verdict!r}"
