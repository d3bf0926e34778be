"""Operation tables on the label set and multimorphism machinery.

Binary pairs <meet, join> and ternary triples <mj1, mj2, mn3> are checked
against languages exactly: a pair must satisfy
``f(x meet y) + f(x join y) <= f(x) + f(y)`` for all x, y in the effective
domain of every function (componentwise application), and a triple the
analogous three-term inequality.  Single operations are checked as
polymorphisms (effective-domain preservation only).

All enumeration is lexicographic so the first violation found is the same
on every run.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import (
    INF,
    CapabilityError,
    CostFunction,
    Language,
    StructuralError,
    cost_str,
    crisp_unary,
    unary,
)


@dataclass(frozen=True)
class BinaryOp:
    domain_size: int
    table: tuple[int, ...]  # d*d labels, row-major

    def __post_init__(self):
        d = self.domain_size
        if len(self.table) != d * d:
            raise StructuralError(f"binary table needs {d * d} entries, got {len(self.table)}")
        if any(not 0 <= v < d for v in self.table):
            raise StructuralError("binary table entry outside the domain")

    def __call__(self, a: int, b: int) -> int:
        return self.table[a * self.domain_size + b]


@dataclass(frozen=True)
class TernaryOp:
    domain_size: int
    table: tuple[int, ...]  # d*d*d labels, row-major

    def __post_init__(self):
        d = self.domain_size
        if len(self.table) != d ** 3:
            raise StructuralError(f"ternary table needs {d ** 3} entries, got {len(self.table)}")
        if any(not 0 <= v < d for v in self.table):
            raise StructuralError("ternary table entry outside the domain")

    def __call__(self, a: int, b: int, c: int) -> int:
        d = self.domain_size
        return self.table[(a * d + b) * d + c]


def binary_from_fn(domain_size: int, fn) -> BinaryOp:
    return BinaryOp(domain_size, tuple(fn(a, b)
                                       for a in range(domain_size)
                                       for b in range(domain_size)))


def ternary_from_fn(domain_size: int, fn) -> TernaryOp:
    return TernaryOp(domain_size, tuple(fn(a, b, c)
                                        for a in range(domain_size)
                                        for b in range(domain_size)
                                        for c in range(domain_size)))


@dataclass(frozen=True)
class OpPair:
    """Candidate <meet, join>; being an STP is checked, never assumed."""

    meet: BinaryOp
    join: BinaryOp

    def __post_init__(self):
        if self.meet.domain_size != self.join.domain_size:
            raise StructuralError("meet and join operate on different domains")

    @property
    def domain_size(self) -> int:
        return self.meet.domain_size


@dataclass(frozen=True)
class OpTriple:
    """Candidate <mj1, mj2, mn3>; being an MJN is checked, never assumed."""

    mj1: TernaryOp
    mj2: TernaryOp
    mn3: TernaryOp

    def __post_init__(self):
        sizes = {self.mj1.domain_size, self.mj2.domain_size, self.mn3.domain_size}
        if len(sizes) != 1:
            raise StructuralError("triple members operate on different domains")

    @property
    def domain_size(self) -> int:
        return self.mj1.domain_size


@dataclass(frozen=True)
class Violation:
    """One concrete failed inequality, exactly reproducible from the data.

    ``fn_index`` is None when the offending function is a synthesized unary
    standing in for the language's implicit unary closure; that unary is then
    carried in ``witness_fn``.
    """

    fn_index: int | None
    args: tuple[tuple[int, ...], ...]
    outputs: tuple[tuple[int, ...], ...]
    lhs: object
    rhs: object
    witness_fn: CostFunction | None = None
    note: str = ""

    def to_json(self) -> dict:
        return {
            "fn": self.fn_index,
            "args": [list(a) for a in self.args],
            "outputs": [list(o) for o in self.outputs],
            "lhs": cost_str(self.lhs),
            "rhs": cost_str(self.rhs),
            "note": self.note,
        }


@dataclass(frozen=True)
class MmReport:
    holds: bool
    violation: Violation | None = None

    def __post_init__(self):
        if not self.holds and self.violation is None:
            raise StructuralError("a failing report must carry its violation")

    def to_json(self) -> dict:
        return {"holds": self.holds,
                "violation": None if self.violation is None else self.violation.to_json()}


OK = MmReport(True)


def all_label_pairs(domain_size: int) -> list[tuple[int, int]]:
    """Unordered distinct label pairs as (a, b) with a < b, lexicographic."""
    return [(a, b) for a in range(domain_size) for b in range(a + 1, domain_size)]


def normalize_pairs(pairs) -> frozenset[tuple[int, int]]:
    out = set()
    for p in pairs:
        a, b = p
        if a == b:
            raise StructuralError(f"label pair must be distinct, got {p!r}")
        out.add((min(a, b), max(a, b)))
    return frozenset(out)


def op_properties(op) -> frozenset[str]:
    """Exhaustively computed flags from {conservative, commutative, majority,
    minority, idempotent}."""
    d = op.domain_size
    props = set()
    if isinstance(op, BinaryOp):
        if all(op(a, a) == a for a in range(d)):
            props.add("idempotent")
        if all(op(a, b) in (a, b) for a in range(d) for b in range(d)):
            props.add("conservative")
        if all(op(a, b) == op(b, a) for a in range(d) for b in range(d)):
            props.add("commutative")
        return frozenset(props)
    if isinstance(op, TernaryOp):
        if all(op(a, a, a) == a for a in range(d)):
            props.add("idempotent")
        if all(op(a, b, c) in (a, b, c)
               for a in range(d) for b in range(d) for c in range(d)):
            props.add("conservative")
        majority = True
        minority = True
        for a, b, c in product(range(d), repeat=3):
            if len({a, b, c}) != 2:
                continue
            twice = a if (a == b or a == c) else b
            once = ({a, b, c} - {twice}).pop()
            if op(a, b, c) != twice:
                majority = False
            if op(a, b, c) != once:
                minority = False
        if majority:
            props.add("majority")
        if minority:
            props.add("minority")
        return frozenset(props)
    raise StructuralError(f"not an operation table: {op!r}")


def _apply_componentwise(op, args: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    return tuple(op(*coords) for coords in zip(*args))


def _multiset_pair_witness(pair: OpPair) -> Violation | None:
    """First (a, b) whose image multiset {{meet, join}} differs from {{a, b}}.

    Such a point yields an explicit finite-valued unary violating the pair
    inequality, so it is exactly what the implicit unary closure forbids.
    """
    d = pair.domain_size
    for a, b in product(range(d), repeat=2):
        m, j = pair.meet(a, b), pair.join(a, b)
        if sorted((m, j)) != sorted((a, b)):
            u = _indicator_unary(d, (m, j), (a, b))
            lhs = u.value((m,)) + u.value((j,))
            rhs = u.value((a,)) + u.value((b,))
            return Violation(None, ((a,), (b,)), ((m,), (j,)), lhs, rhs,
                             witness_fn=u, note="implicit unary closure")
    return None


def _multiset_triple_witness(triple: OpTriple) -> Violation | None:
    d = triple.domain_size
    for a, b, c in product(range(d), repeat=3):
        outs = (triple.mj1(a, b, c), triple.mj2(a, b, c), triple.mn3(a, b, c))
        if sorted(outs) != sorted((a, b, c)):
            u = _indicator_unary(d, outs, (a, b, c))
            lhs = sum((u.value((o,)) for o in outs), Fraction(0))
            rhs = sum((u.value((v,)) for v in (a, b, c)), Fraction(0))
            return Violation(None, ((a,), (b,), (c,)), tuple((o,) for o in outs),
                             lhs, rhs, witness_fn=u, note="implicit unary closure")
    return None


def _indicator_unary(d: int, outs, ins) -> CostFunction:
    # Weight a label that occurs more often among the outputs than among the
    # inputs; the resulting finite unary then fails the cost inequality.
    for label in range(d):
        if list(outs).count(label) > list(ins).count(label):
            return unary(tuple(Fraction(1) if v == label else Fraction(0)
                               for v in range(d)))
    raise AssertionError("multisets differ, so an over-represented label exists")


def _unary_closure_report(ops, language: Language) -> MmReport:
    if language.unary_closure == "none":
        return OK
    if isinstance(ops, OpPair):
        v = _multiset_pair_witness(ops)
        return OK if v is None else MmReport(False, v)
    if isinstance(ops, OpTriple):
        v = _multiset_triple_witness(ops)
        return OK if v is None else MmReport(False, v)
    # Single operation as polymorphism: finite-valued unaries never constrain
    # it (their effective domain is everything); general ones force conservativity.
    if language.unary_closure == "general":
        d = ops.domain_size
        if isinstance(ops, BinaryOp):
            tuples = product(range(d), repeat=2)
        else:
            tuples = product(range(d), repeat=3)
        for args in tuples:
            out = ops(*args)
            if out not in args:
                u = crisp_unary(d, set(args))
                return MmReport(False, Violation(
                    None, tuple((v,) for v in args), ((out,),), INF, Fraction(0),
                    witness_fn=u, note="implicit unary closure"))
    return OK


def check_multimorphism(ops, language: Language) -> MmReport:
    """Verify ops against every listed function plus the implicit unary
    closure; returns the first violation under lexicographic enumeration."""
    d = getattr(ops, "domain_size", None)
    if d != language.domain_size:
        raise StructuralError(
            f"operation domain {d} != language domain {language.domain_size}")

    if isinstance(ops, OpPair):
        k, appliers = 2, (ops.meet, ops.join)
    elif isinstance(ops, OpTriple):
        k, appliers = 3, (ops.mj1, ops.mj2, ops.mn3)
    elif isinstance(ops, BinaryOp):
        k, appliers = 2, None
    elif isinstance(ops, TernaryOp):
        k, appliers = 3, None
    else:
        raise StructuralError(f"not an operation or operation tuple: {ops!r}")

    for fi, fn in enumerate(language.functions):
        dom = fn.effective_domain()
        domset = set(dom)
        for args in product(dom, repeat=k):
            if appliers is None:
                out = _apply_componentwise(ops, args)
                if out not in domset:
                    rhs = sum((fn.value(a) for a in args), Fraction(0))
                    return MmReport(False, Violation(fi, args, (out,), INF, rhs))
            else:
                outs = tuple(_apply_componentwise(op, args) for op in appliers)
                lhs = sum((fn.value(o) for o in outs), Fraction(0))
                rhs = sum((fn.value(a) for a in args), Fraction(0))
                if not lhs <= rhs:
                    return MmReport(False, Violation(fi, args, outs, lhs, rhs))
    return _unary_closure_report(ops, language)


def check_stp_on(pair: OpPair, m_set, domain_size: int | None = None) -> MmReport:
    """Conservative everywhere, commutative on the given unordered pairs."""
    d = pair.domain_size
    if domain_size is not None and domain_size != d:
        raise StructuralError("domain size mismatch")
    v = _conservative_pair_witness(pair)
    if v is not None:
        return MmReport(False, v)
    for a, b in sorted(normalize_pairs(m_set)):
        for x, y in ((a, b), (b, a)):
            if pair.meet(x, y) != pair.meet(y, x) or pair.join(x, y) != pair.join(y, x):
                return MmReport(False, Violation(
                    None, ((x,), (y,)),
                    ((pair.meet(x, y), pair.join(x, y)),
                     (pair.meet(y, x), pair.join(y, x))),
                    INF, Fraction(0), note="not commutative on a listed pair"))
    return OK


def _conservative_pair_witness(pair: OpPair) -> Violation | None:
    d = pair.domain_size
    for a, b in product(range(d), repeat=2):
        m, j = pair.meet(a, b), pair.join(a, b)
        if sorted((m, j)) != sorted((a, b)):
            return Violation(None, ((a,), (b,)), ((m,), (j,)), INF, Fraction(0),
                             note="pair not conservative")
    return None


def check_mjn_on(triple: OpTriple, m_set, domain_size: int | None = None) -> MmReport:
    """Conservative everywhere; majority/majority/minority behaviour on every
    two-valued triple whose label pair is *outside* ``m_set``."""
    d = triple.domain_size
    if domain_size is not None and domain_size != d:
        raise StructuralError("domain size mismatch")
    m_set = normalize_pairs(m_set)
    complement = [p for p in all_label_pairs(d) if p not in m_set]
    for op in (triple.mj1, triple.mj2, triple.mn3):
        for a, b, c in product(range(d), repeat=3):
            if op(a, b, c) not in (a, b, c):
                return MmReport(False, Violation(
                    None, ((a,), (b,), (c,)), ((op(a, b, c),),), INF, Fraction(0),
                    note="triple not conservative"))
    for a, b, c in product(range(d), repeat=3):
        if len({a, b, c}) != 2:
            continue
        twice = a if (a == b or a == c) else b
        once = ({a, b, c} - {twice}).pop()
        if (min(twice, once), max(twice, once)) in m_set:
            continue
        got = (triple.mj1(a, b, c), triple.mj2(a, b, c), triple.mn3(a, b, c))
        if got != (twice, twice, once):
            return MmReport(False, Violation(
                None, ((a,), (b,), (c,)), (got,), INF, Fraction(0),
                note="majority/minority behaviour required on this pair"))
    return OK


# ---------------------------------------------------------------------------
# Majority polymorphism search
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Refutation:
    """One candidate (or candidate prefix) killed by a concrete violation."""

    assignment: tuple[int, ...]  # values for free positions, possibly a prefix
    fn_index: int
    args: tuple[tuple[int, ...], ...]
    output: tuple[int, ...]


@dataclass(frozen=True)
class MajoritySearch:
    op: TernaryOp | None
    exhaustive: bool
    strategy: str
    free_positions: tuple[tuple[int, int, int], ...]
    refutations: tuple[Refutation, ...]
    nodes: int

    @property
    def refuted(self) -> bool:
        return self.op is None and self.exhaustive


def _majority_fixed_table(d: int) -> dict[tuple[int, int, int], int]:
    """Values forced on every majority operation: diagonal and two-valued
    tuples."""
    fixed = {}
    for a, b, c in product(range(d), repeat=3):
        s = {a, b, c}
        if len(s) == 1:
            fixed[(a, b, c)] = a
        elif len(s) == 2:
            fixed[(a, b, c)] = a if (a == b or a == c) else b
    return fixed


def _constraints(language: Language):
    """Deduplicated effective domains that actually constrain polymorphisms
    (full domains never do)."""
    seen = {}
    for fi, fn in enumerate(language.functions):
        dom = tuple(fn.effective_domain())
        if len(dom) == fn.domain_size ** fn.arity:
            continue
        if dom not in seen:
            seen[dom] = fi
    return [(fi, dom) for dom, fi in seen.items()]


def search_majority(language: Language, strategy: str = "exhaustive",
                    conservative_only: bool = False,
                    node_cap: int = 2_000_000) -> MajoritySearch:
    """Look for a majority operation preserving every effective domain.

    ``exhaustive`` enumerates every candidate (|D| <= 3) and records one
    refutation per refuted candidate, so a None answer is a replayable
    certificate.  ``backtracking`` (|D| <= 4) runs a complete pruned search;
    a finished run is likewise exhaustive, with the refuted prefixes as the
    certificate.
    """
    d = language.domain_size
    fixed = _majority_fixed_table(d)
    free = [t for t in product(range(d), repeat=3) if len(set(t)) == 3]
    constraints = _constraints(language)

    if strategy == "exhaustive":
        if d > 3:
            raise CapabilityError("exhaustive majority search is capped at |D| <= 3")
        return _search_majority_exhaustive(language, fixed, free, constraints,
                                           conservative_only)
    if strategy == "backtracking":
        if d > 4:
            raise CapabilityError("backtracking majority search is capped at |D| <= 4")
        return _search_majority_backtracking(language, fixed, free, constraints,
                                             conservative_only, node_cap)
    raise StructuralError(f"unknown strategy {strategy!r}")


def _op_from(d, fixed, free, values) -> TernaryOp:
    entries = dict(fixed)
    entries.update(zip(free, values))
    return TernaryOp(d, tuple(entries[t] for t in product(range(d), repeat=3)))


def _first_violation(op: TernaryOp, constraints) -> Refutation | None:
    for fi, dom in constraints:
        domset = set(dom)
        for args in product(dom, repeat=3):
            out = tuple(op(*coords) for coords in zip(*args))
            if out not in domset:
                return Refutation((), fi, args, out)
    return None


def _search_majority_exhaustive(language, fixed, free, constraints,
                                conservative_only) -> MajoritySearch:
    d = language.domain_size
    choice_sets = [tuple(sorted(set(t))) if conservative_only else tuple(range(d))
                   for t in free]
    refutations = []
    nodes = 0
    for values in product(*choice_sets) if free else iter([()]):
        nodes += 1
        op = _op_from(d, fixed, free, values)
        bad = _first_violation(op, constraints)
        if bad is None:
            return MajoritySearch(op, True, "exhaustive", tuple(free),
                                  tuple(refutations), nodes)
        refutations.append(Refutation(tuple(values), bad.fn_index, bad.args, bad.output))
    return MajoritySearch(None, True, "exhaustive", tuple(free),
                          tuple(refutations), nodes)


def _search_majority_backtracking(language, fixed, free, constraints,
                                  conservative_only, node_cap) -> MajoritySearch:
    d = language.domain_size

    # Every application of the operation to rows of an effective domain pins
    # down which table positions it reads; group them for incremental checks.
    apps = []  # (fi, args, positions_needed)
    for fi, dom in constraints:
        domset = set(dom)
        for args in product(dom, repeat=3):
            positions = tuple(zip(*args))
            apps.append((fi, args, positions, domset))

    occurrences = {t: 0 for t in free}
    for _, _, positions, _ in apps:
        for pos in positions:
            if pos in occurrences:
                occurrences[pos] += 1
    order = sorted(free, key=lambda t: (-occurrences[t], t))
    rank = {t: i for i, t in enumerate(order)}

    # Applications become checkable once their deepest free position is set.
    by_depth: list[list] = [[] for _ in range(len(order) + 1)]
    for fi, args, positions, domset in apps:
        deepest = -1
        for pos in positions:
            if pos in rank:
                deepest = max(deepest, rank[pos])
        by_depth[deepest + 1].append((fi, args, positions, domset))

    assigned = dict(fixed)
    refutations = []
    nodes = 0

    def violated_at(depth) -> Refutation | None:
        for fi, args, positions, domset in by_depth[depth]:
            out = tuple(assigned[pos] for pos in positions)
            if out not in domset:
                prefix = tuple(assigned[t] for t in order[:depth])
                return Refutation(prefix, fi, args, out)
        return None

    def dfs(depth) -> TernaryOp | None:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap:
            raise _NodeCapReached
        bad = violated_at(depth)
        if bad is not None:
            refutations.append(bad)
            return None
        if depth == len(order):
            values = tuple(assigned[t] for t in order)
            entries = dict(fixed)
            entries.update(zip(order, values))
            return TernaryOp(d, tuple(entries[t] for t in product(range(d), repeat=3)))
        pos = order[depth]
        choices = sorted(set(pos)) if conservative_only else range(d)
        for v in choices:
            assigned[pos] = v
            found = dfs(depth + 1)
            if found is not None:
                return found
            del assigned[pos]
        return None

    try:
        op = dfs(0)
    except _NodeCapReached:
        return MajoritySearch(None, False, "backtracking", tuple(order),
                              tuple(refutations), nodes)
    return MajoritySearch(op, True, "backtracking", tuple(order),
                          tuple(refutations), nodes)


class _NodeCapReached(Exception):
    pass


# ---------------------------------------------------------------------------
# STP search over tournament orientations
# ---------------------------------------------------------------------------

STP_PAIR_CAP = 20


def search_stp(language: Language, m_set) -> OpPair | None:
    """Try all 2^|m_set| commutative orientations on ``m_set`` (projection
    behaviour elsewhere); return the first pair that is a multimorphism of
    the language."""
    d = language.domain_size
    pairs = sorted(normalize_pairs(m_set))
    for a, b in pairs:
        if not (0 <= a < d and 0 <= b < d):
            raise StructuralError(f"pair {(a, b)} outside the domain")
    if len(pairs) > STP_PAIR_CAP:
        raise CapabilityError(
            f"{len(pairs)} orientable pairs exceed the search cap of {STP_PAIR_CAP}")

    for mask in range(1 << len(pairs)):
        meet = {}
        join = {}
        for a in range(d):
            meet[(a, a)] = a
            join[(a, a)] = a
        for a in range(d):
            for b in range(d):
                if a == b:
                    continue
                lo, hi = min(a, b), max(a, b)
                if (lo, hi) in pairs:
                    bit = (mask >> pairs.index((lo, hi))) & 1
                    low = lo if bit == 0 else hi
                    high = hi if bit == 0 else lo
                    meet[(a, b)] = low
                    join[(a, b)] = high
                else:
                    meet[(a, b)] = a
                    join[(a, b)] = b
        pair = OpPair(
            BinaryOp(d, tuple(meet[(a, b)] for a in range(d) for b in range(d))),
            BinaryOp(d, tuple(join[(a, b)] for a in range(d) for b in range(d))))
        if check_multimorphism(pair, language).holds:
            if not check_stp_on(pair, pairs).holds:
                raise AssertionError("constructed orientation fails its own shape")
            return pair
    return None
