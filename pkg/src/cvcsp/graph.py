"""The pair graph over ordered distinct label pairs.

Nodes are the ordered pairs (a, b), a != b.  Two nodes (a, b), (a', b')
are joined when some binary member f of the expressive-power closure
satisfies the rectangle inequality

    f(a, a') + f(b, b') > f(a, b') + f(b, a')   with (a, b'), (b, a') finite,

and the edge is *soft* when additionally one of the diagonal points
(a, a'), (b, b') is finite.  Pairs whose nodes carry no self-loop make up
``m_set``; the classifier demands commutative lattice behaviour there and
majority/minority behaviour on the rest.

Because the closure is budgeted, the computed graph can miss edges; it can
never contain a spurious one (every edge stores a replayable witness).
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import CostFunction, StructuralError, is_finite
from .express import BinaryClosure
from .ops import all_label_pairs

Node = tuple[int, int]


def pair_nodes(domain_size: int) -> list[Node]:
    return [(a, b) for a in range(domain_size) for b in range(domain_size) if a != b]


def edge_witness(f: CostFunction, p: Node, q: Node) -> str | None:
    """Kind of edge ("soft"/"hard") that f witnesses between p and q, if any.

    An infinite left side with both right-side points finite counts as a
    strict inequality.
    """
    if f.arity != 2:
        raise StructuralError("edge tests need a binary function")
    a, b = p
    a2, b2 = q
    d = f.domain_size
    for lab in (a, b, a2, b2):
        if not 0 <= lab < d:
            raise StructuralError(f"label {lab} outside the domain")
    f_ab2 = f.table[a * d + b2]
    f_ba2 = f.table[b * d + a2]
    if not (is_finite(f_ab2) and is_finite(f_ba2)):
        return None
    f_aa2 = f.table[a * d + a2]
    f_bb2 = f.table[b * d + b2]
    if not f_aa2 + f_bb2 > f_ab2 + f_ba2:
        return None
    if is_finite(f_aa2) or is_finite(f_bb2):
        return "soft"
    return "hard"


@dataclass(frozen=True)
class EdgeInfo:
    kind: str           # "soft" | "hard"
    member: int         # index of the witnessing closure member
    orientation: tuple[Node, Node]  # (p, q) the witness was verified at


@dataclass
class PairGraph:
    domain_size: int
    nodes: tuple[Node, ...]
    edges: dict[tuple[Node, Node], EdgeInfo]  # key is the sorted node pair
    m_set: frozenset[tuple[int, int]]
    truncated: bool

    def has_self_loop(self, node: Node) -> bool:
        return (node, node) in self.edges

    def loop_kind(self, node: Node) -> str | None:
        info = self.edges.get((node, node))
        return None if info is None else info.kind


def build_pair_graph(closure: BinaryClosure) -> PairGraph:
    """Union of edge witnesses over every closure member; soft beats hard.

    The closure is transpose-closed, so testing each unordered node pair in
    one orientation covers both.
    """
    d = closure.domain_size
    if d < 2:
        raise StructuralError("pair graph needs a domain of size >= 2")
    nodes = tuple(pair_nodes(d))
    edges: dict[tuple[Node, Node], EdgeInfo] = {}
    for pi, p in enumerate(nodes):
        for q in nodes[pi:]:
            found: EdgeInfo | None = None
            for mi, member in enumerate(closure.members):
                kind = edge_witness(member.fn, p, q)
                if kind == "soft":
                    found = EdgeInfo("soft", mi, (p, q))
                    break
                if kind == "hard" and found is None:
                    found = EdgeInfo("hard", mi, (p, q))
            if found is not None:
                edges[(p, q)] = found

    looped = {node for node in nodes if (node, node) in edges}
    m_set = frozenset(
        (a, b) for a, b in all_label_pairs(d)
        if (a, b) not in looped and (b, a) not in looped)
    return PairGraph(d, nodes, edges, m_set, truncated=not closure.saturated)


@dataclass(frozen=True)
class GraphViolation:
    check: str      # "loop-symmetry" | "cross-edge" | "soft-at-loop-node"
    detail: str
    key: tuple[Node, Node]


@dataclass
class GraphReport:
    violations: tuple[GraphViolation, ...]
    truncated: bool
    soft_loop_gated: bool  # graph has a soft self-loop; segregation checks vacuous

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            note = (" (soft self-loop present; segregation checks do not apply)"
                    if self.soft_loop_gated else "")
            return "pair graph diagnostics: all applicable checks pass" + note
        cause = ("incomplete closure (retry with a larger budget) or an engine bug"
                 if self.truncated else "an engine bug (closure was saturated)")
        lines = [f"pair graph diagnostics: {len(self.violations)} violation(s); "
                 f"a violation here indicates {cause}"]
        lines += [f"  [{v.check}] {v.detail}" for v in self.violations]
        return "\n".join(lines)


def check_graph_consistency(g: PairGraph) -> GraphReport:
    """Structural facts of the pair graph: symmetric loop status always; no
    edges between loop-free and looped pairs and no soft edges at looped
    nodes whenever the graph is free of soft self-loops.

    The segregation checks are guaranteed only in the no-soft-self-loop
    regime (where the classifier uses them); a soft self-loop already makes
    the language NP-hard and voids them, so they are skipped then.
    """
    violations = []
    for a, b in all_label_pairs(g.domain_size):
        if g.has_self_loop((a, b)) != g.has_self_loop((b, a)):
            violations.append(GraphViolation(
                "loop-symmetry",
                f"nodes {(a, b)} and {(b, a)} disagree on self-loop status",
                ((a, b), (b, a))))

    gated = find_soft_self_loop(g) is not None
    if gated:
        return GraphReport(tuple(violations), g.truncated, True)

    def in_m(node: Node) -> bool:
        a, b = node
        return (min(a, b), max(a, b)) in g.m_set

    for (p, q), info in sorted(g.edges.items()):
        if p == q:
            continue
        if in_m(p) != in_m(q):
            violations.append(GraphViolation(
                "cross-edge",
                f"{info.kind} edge joins {p} (no self-loop side: {in_m(p)}) "
                f"and {q} (no self-loop side: {in_m(q)}), member m{info.member}",
                (p, q)))
        if info.kind == "soft" and (not in_m(p) or not in_m(q)):
            violations.append(GraphViolation(
                "soft-at-loop-node",
                f"soft edge {p} -- {q} touches a self-looped pair, member m{info.member}",
                (p, q)))
    return GraphReport(tuple(violations), g.truncated, False)


def find_soft_self_loop(g: PairGraph):
    """Lexicographically least node with a soft self-loop, with its witness."""
    for node in sorted(g.nodes):
        info = g.edges.get((node, node))
        if info is not None and info.kind == "soft":
            return node, info
    return None


def graph_to_json(g: PairGraph, closure: BinaryClosure | None = None) -> dict:
    edges = []
    for (p, q), info in sorted(g.edges.items()):
        entry = {"p": list(p), "q": list(q), "kind": info.kind, "member": info.member}
        edges.append(entry)
    out = {
        "domain_size": g.domain_size,
        "nodes": [list(n) for n in g.nodes],
        "edges": edges,
        "m_set": sorted([list(p) for p in g.m_set]),
        "truncated": g.truncated,
    }
    if closure is not None:
        from .express import member_to_json
        out["members"] = [member_to_json(m, with_gadget=False) for m in closure.members]
    return out


def graph_to_dot(g: PairGraph) -> str:
    """DOT rendering for documentation figures."""
    lines = ["graph pairs {"]
    for a, b in g.nodes:
        shape = "doublecircle" if g.has_self_loop((a, b)) else "circle"
        lines.append(f'  "n{a}_{b}" [label="({a},{b})", shape={shape}];')
    for (p, q), info in sorted(g.edges.items()):
        if p == q:
            continue
        style = "solid" if info.kind == "soft" else "dashed"
        lines.append(f'  "n{p[0]}_{p[1]}" -- "n{q[0]}_{q[1]}" [style={style}];')
    lines.append("}")
    return "\n".join(lines)
