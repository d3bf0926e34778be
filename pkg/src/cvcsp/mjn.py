"""Minority-map computation and construction of the majority/minority triple.

For a 3-element label set {a, b, c}, the label c is *minority-expressible*
when some binary closure member has effective domain exactly
{(a, a'), (b, a'), (c, b')} for a self-looped pair {a', b'}: the gadget can
then tell c apart from a and b.  The map never holds two labels for one set
(two witnesses would chain into a soft edge at a self-looped pair, which is
impossible); finding two is therefore reported as an inconsistency with the
composed counterexample attached.

The triple construction routes every argument tuple through one of four
cases: two-valued tuples over a self-looped pair keep majority/minority
behaviour, tuples whose 3-set has a minority-expressible label isolate it,
and everything else follows the commutative pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .core import CostFunction, Language, StructuralError
from .express import BinaryClosure, min_compose
from .graph import PairGraph, edge_witness
from .ops import (
    MmReport,
    OpPair,
    OpTriple,
    TernaryOp,
    all_label_pairs,
    check_mjn_on,
    check_multimorphism,
    check_stp_on,
    normalize_pairs,
)


@dataclass(frozen=True)
class MinorityWitness:
    member: int                 # closure member exhibiting the pattern
    pair: tuple[int, int]       # the self-looped pair (a', b') used
    labels: tuple[int, int, int]  # (a, b, c) with c the minority label


@dataclass
class MinorityMap:
    domain_size: int
    entries: dict[frozenset, MinorityWitness]

    def minority(self, labels) -> int | None:
        """The minority-expressible label of a 3-set, or None.

        Sets of fewer than three labels never have one, by convention.
        """
        key = frozenset(labels)
        if len(key) <= 2:
            return None
        w = self.entries.get(key)
        return None if w is None else w.labels[2]


class MinorityConflictError(Exception):
    """Two labels of one 3-set both matched the minority pattern.

    Impossible for a sound graph; carries both witnesses and their chained
    composition, which exhibits a soft edge at a self-looped pair.
    """

    def __init__(self, labels, first: MinorityWitness, second: MinorityWitness,
                 composed: CostFunction, nodes, kind):
        self.labels = labels
        self.first = first
        self.second = second
        self.composed = composed
        self.nodes = nodes
        self.kind = kind
        super().__init__(
            f"labels {sorted(labels)}: both {first.labels[2]} and {second.labels[2]} "
            f"match the minority pattern; composition exhibits a {kind} edge "
            f"between {nodes[0]} and {nodes[1]}")


def _pattern(dom) -> tuple[tuple[int, int, int], tuple[int, int]] | None:
    """Match a 3-point effective domain against {(a,a'), (b,a'), (c,b')}.

    Returns ((a, b, c), (a', b')) with c the minority label, or None.
    """
    if len(dom) != 3:
        return None
    firsts = [p[0] for p in dom]
    if len(set(firsts)) != 3:
        return None
    seconds = [p[1] for p in dom]
    for lone in range(3):
        others = [k for k in range(3) if k != lone]
        if seconds[others[0]] == seconds[others[1]] and seconds[lone] != seconds[others[0]]:
            a, b = firsts[others[0]], firsts[others[1]]
            c = firsts[lone]
            return (a, b, c), (seconds[others[0]], seconds[lone])
    return None


def compute_minority_map(closure: BinaryClosure, g: PairGraph | None = None,
                         m_set=None) -> MinorityMap:
    """Scan closure members for the three-point pattern against the
    self-looped pairs (the complement of ``m_set``)."""
    d = closure.domain_size
    if m_set is None:
        if g is None:
            raise StructuralError("need a pair graph or an explicit m_set")
        m_set = g.m_set
    m_set = normalize_pairs(m_set)
    looped = [p for p in all_label_pairs(d) if p not in m_set]

    entries: dict[frozenset, MinorityWitness] = {}
    for mi, member in enumerate(closure.members):
        match = _pattern(member.fn.effective_domain())
        if match is None:
            continue
        (a, b, c), (a2, b2) = match
        if (min(a2, b2), max(a2, b2)) not in looped:
            continue
        key = frozenset((a, b, c))
        witness = MinorityWitness(mi, (a2, b2), (a, b, c))
        prior = entries.get(key)
        if prior is None:
            entries[key] = witness
        elif prior.labels[2] != c:
            raise _conflict(closure, key, prior, witness)
    return MinorityMap(d, entries)


def _conflict(closure, key, first: MinorityWitness, second: MinorityWitness):
    """Build the chained counterexample for two clashing witnesses.

    Transposing the first witness and chaining it into the second yields a
    three-point function whose missing corner produces a soft edge at the
    first witness's self-looped pair.
    """
    f = closure.members[first.member].fn.transpose()
    h = min_compose(f, closure.members[second.member].fn)
    a2, b2 = first.pair
    c2, d2 = second.pair
    p = (b2, a2)
    q = (d2, c2)
    kind = edge_witness(h, p, q)
    return MinorityConflictError(key, first, second, h, (p, q), kind or "no")


def check_minority_map(mm: MinorityMap, g: PairGraph) -> list[str]:
    """Diagnostic: each minority entry must pair its minority label with both
    other labels on the self-looped side of the graph."""
    problems = []
    for key, w in sorted(mm.entries.items(), key=lambda kv: sorted(kv[0])):
        a, b, c = w.labels
        for other in (a, b):
            pair = (min(other, c), max(other, c))
            if pair in g.m_set:
                problems.append(
                    f"minority entry {sorted(key)} -> {c}: pair {pair} has no "
                    f"self-loop in the graph"
                    + (" (closure truncated; may be under-approximation)"
                       if g.truncated else " (closure saturated: engine bug)"))
    return problems


def construct_mjn(mm: MinorityMap, stp: OpPair, m_set, domain_size: int | None = None) -> OpTriple:
    """Total triple over all label tuples, case by case.

    The commutative pair must be conservative; the construction then
    guarantees the identity MJN(a, a, b) = (a, a, b) and multiset
    preservation by exhaustive case analysis.
    """
    d = domain_size if domain_size is not None else stp.domain_size
    if stp.domain_size != d or (mm.domain_size != d):
        raise StructuralError("domain size mismatch")
    if not check_stp_on(stp, ()).holds:
        raise StructuralError("the pair must be conservative everywhere")
    m_set = normalize_pairs(m_set)
    looped = {p for p in all_label_pairs(d) if p not in m_set}
    meet, join = stp.meet, stp.join

    t1, t2, t3 = [], [], []
    for a, b, c in product(range(d), repeat=3):
        if len({a, b, c}) == 2:
            x = a if (a == b or a == c) else b
            y = ({a, b, c} - {x}).pop()
            if (min(x, y), max(x, y)) in looped:
                t1.append(x)
                t2.append(x)
                t3.append(y)
                continue
        minority = mm.minority((a, b, c))
        if minority == a:
            t1.append(meet(b, c))
            t2.append(join(b, c))
            t3.append(a)
        elif minority == b:
            t1.append(meet(a, c))
            t2.append(join(a, c))
            t3.append(b)
        else:
            t1.append(meet(a, b))
            t2.append(join(a, b))
            t3.append(c)
    return OpTriple(TernaryOp(d, tuple(t1)), TernaryOp(d, tuple(t2)),
                    TernaryOp(d, tuple(t3)))


def verify_mjn(triple: OpTriple, language: Language, g: PairGraph | None = None,
               m_set=None) -> MmReport:
    """Full check: the three-term cost inequality over every function's
    effective domain plus the majority/minority shape on self-looped pairs."""
    if m_set is None:
        if g is None:
            raise StructuralError("need a pair graph or an explicit m_set")
        m_set = g.m_set
    shape = check_mjn_on(triple, m_set, language.domain_size)
    if not shape.holds:
        return shape
    return check_multimorphism(triple, language)
