"""Bounded computation of the binary fragment of a language's expressive
power: the set of binary cost functions obtainable by summing language terms
and minimizing out auxiliary variables.

The true expressive power is infinite, so ``binary_closure`` computes an
explicitly budgeted under-approximation: it seeds with every binary
projection of the listed functions (coordinates optionally restricted by
crisp unaries), then repeatedly applies pointwise sum, chained minimization
(``min_compose``), transposition, and crisp unary restriction, normalizing
each result by subtracting row/column minima so that unary cost shifts -
which cancel in every rectangle-inequality test downstream - do not inflate
the member set.

Every member keeps an audit gadget: an instance (over the base language
plus the finitely many unaries the derivation instantiated) whose
minimization reproduces the member's table up to the recorded normalization
shifts.  Derivations through ``min_compose`` insert a compensating
finite-valued unary on the middle variable so the bookkeeping stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from .core import (
    INF,
    CapabilityError,
    Cost,
    CostFunction,
    Instance,
    Language,
    StructuralError,
    Term,
    crisp_unary,
    is_finite,
    unary as unary_fn,
)

EXPRESS_CAP = 10 ** 7
CLOSURE_DOMAIN_CAP = 4
MAGNITUDE_BITS = 128


@dataclass(frozen=True)
class Gadget:
    """An instance with some variables exposed; the rest are minimized out."""

    instance: Instance
    exposed: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "exposed", tuple(self.exposed))
        if len(set(self.exposed)) != len(self.exposed):
            raise StructuralError("exposed variables must be distinct")
        for v in self.exposed:
            if not 0 <= v < self.instance.num_vars:
                raise StructuralError(f"exposed variable {v} outside the instance")

    @property
    def auxiliary(self) -> tuple[int, ...]:
        exposed = set(self.exposed)
        return tuple(v for v in range(self.instance.num_vars) if v not in exposed)


def express_gadget(gadget: Gadget, language: Language, cap: int = EXPRESS_CAP) -> CostFunction:
    """Exact table of the function the gadget expresses."""
    gadget.instance.validate(language)
    d = language.domain_size
    n = gadget.instance.num_vars
    if d ** n > cap:
        raise CapabilityError(f"{d}^{n} assignments exceed the evaluation cap {cap}")
    aux = gadget.auxiliary
    tables = [language.functions[fn].table for fn, _ in gadget.instance.terms]
    scopes = [scope for _, scope in gadget.instance.terms]
    x = [0] * n
    out = []
    for vals in product(range(d), repeat=len(gadget.exposed)):
        for v, lab in zip(gadget.exposed, vals):
            x[v] = lab
        best: Cost = INF
        for aux_vals in product(range(d), repeat=len(aux)):
            for v, lab in zip(aux, aux_vals):
                x[v] = lab
            total: Cost = Fraction(0)
            for table, scope in zip(tables, scopes):
                idx = 0
                for v in scope:
                    idx = idx * d + x[v]
                c = table[idx]
                if c is INF:
                    total = INF
                    break
                total += c
            if total < best:
                best = total
        out.append(best)
    return CostFunction(len(gadget.exposed), d, tuple(out))


def min_compose(f: CostFunction, g: CostFunction) -> CostFunction:
    """h(x, z) = min over the shared middle label of f(x, y) + g(y, z)."""
    if f.arity != 2 or g.arity != 2:
        raise StructuralError("min_compose needs two binary functions")
    if f.domain_size != g.domain_size:
        raise StructuralError("min_compose needs matching domains")
    d = f.domain_size
    out = []
    for x in range(d):
        for z in range(d):
            best: Cost = INF
            for y in range(d):
                a = f.table[x * d + y]
                b = g.table[y * d + z]
                if a is INF or b is INF:
                    continue
                c = a + b
                if c < best:
                    best = c
            out.append(best)
    return CostFunction(2, d, tuple(out))


def pin_project(f: CostFunction, keep, pins=None) -> CostFunction:
    """Restrict or penalize the non-kept coordinates, then minimize them out.

    ``pins`` maps a coordinate to ``("fix", label)`` or
    ``("penalty", label, amount)``; unpinned non-kept coordinates are
    minimized over the whole domain.  The kept pair orders the output table.
    """
    pins = dict(pins or {})
    keep = tuple(keep)
    if len(keep) != 2 or keep[0] == keep[1]:
        raise StructuralError("keep must name two distinct coordinates")
    for k in keep:
        if not 0 <= k < f.arity:
            raise StructuralError(f"kept coordinate {k} outside arity {f.arity}")
    allowed = {}
    penalties = {}
    for k, pin in pins.items():
        if k in keep or not 0 <= k < f.arity:
            raise StructuralError(f"pin on invalid coordinate {k}")
        if pin[0] == "fix":
            allowed[k] = (pin[1],)
        elif pin[0] == "penalty":
            _, label, amount = pin
            amount = Fraction(amount)
            if amount < 0:
                raise StructuralError("penalty must be non-negative")
            penalties[k] = (label, amount)
        else:
            raise StructuralError(f"unknown pin kind {pin[0]!r}")
    table = _project_table(f, keep, allowed, penalties)
    return CostFunction(2, f.domain_size, table)


def _project_table(f: CostFunction, keep, allowed, penalties) -> tuple[Cost, ...]:
    d = f.domain_size
    others = [k for k in range(f.arity) if k not in keep]
    ranges = [allowed.get(k, tuple(range(d))) for k in others]
    u = [0] * f.arity
    out = []
    for va in range(d):
        for vb in range(d):
            u[keep[0]], u[keep[1]] = va, vb
            best: Cost = INF
            for vals in product(*ranges):
                for k, lab in zip(others, vals):
                    u[k] = lab
                c = f.table[f.index(u)]
                if c is INF:
                    continue
                for k, (label, amount) in penalties.items():
                    if u[k] == label:
                        c = c + amount
                if c < best:
                    best = c
            out.append(best)
    return tuple(out)


# ---------------------------------------------------------------------------
# The budgeted closure
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosureMember:
    """A normalized binary member plus everything needed to audit it.

    The audit gadget expresses ``fn + row_shift + col_shift`` exactly; the
    shifts are the unary normalization subtracted during the derivation.
    """

    fn: CostFunction
    row_shift: tuple[Fraction, ...]
    col_shift: tuple[Fraction, ...]
    language: Language
    gadget: Gadget
    provenance: str
    uses_crisp_pins: bool

    def raw_value(self, a: int, b: int) -> Cost:
        v = self.fn.table[a * self.fn.domain_size + b]
        if v is INF:
            return INF
        return v + self.row_shift[a] + self.col_shift[b]


@dataclass
class BinaryClosure:
    domain_size: int
    members: list[ClosureMember]
    budget_rounds: int
    budget_size: int
    saturated: bool
    rounds_run: int

    def tables(self) -> list[CostFunction]:
        return [m.fn for m in self.members]


def _normalize(table: tuple[Cost, ...], d: int):
    """Subtract row minima, then column minima.  The result has a zero in
    every finite row and column, entries stay non-negative, and infinite
    entries stay infinite."""
    rows = []
    t1 = list(table)
    for a in range(d):
        entries = [t1[a * d + b] for b in range(d) if is_finite(t1[a * d + b])]
        shift = min(entries) if entries else Fraction(0)
        rows.append(shift)
        if entries:
            for b in range(d):
                if t1[a * d + b] is not INF:
                    t1[a * d + b] -= shift
    cols = []
    for b in range(d):
        entries = [t1[a * d + b] for a in range(d) if is_finite(t1[a * d + b])]
        shift = min(entries) if entries else Fraction(0)
        cols.append(shift)
        if entries:
            for a in range(d):
                if t1[a * d + b] is not INF:
                    t1[a * d + b] -= shift
    return tuple(t1), tuple(rows), tuple(cols)


def _within_magnitude(table, bits: int) -> bool:
    for v in table:
        if v is INF:
            continue
        if v.numerator.bit_length() > bits or v.denominator.bit_length() > bits:
            return False
    return True


def _vec_add(*vecs):
    return tuple(sum(parts, Fraction(0)) for parts in zip(*vecs))


def _combine(lang1: Language, inst1: Instance, lang2: Language, inst2: Instance,
             var_map2: dict, num_vars: int):
    offset = len(lang1.functions)
    fns = lang1.functions + lang2.functions
    terms = inst1.terms + tuple(
        Term(fn + offset, tuple(var_map2[v] for v in scope))
        for fn, scope in inst2.terms)
    lang = Language(lang1.domain_size, fns, lang1.unary_closure)
    return lang, Instance(num_vars, terms)


def _member(fn_raw: CostFunction, language, gadget, provenance, crisp,
            extra_row=None, extra_col=None) -> ClosureMember:
    d = fn_raw.domain_size
    table, rows, cols = _normalize(fn_raw.table, d)
    zero = tuple(Fraction(0) for _ in range(d))
    rows = _vec_add(rows, extra_row or zero)
    cols = _vec_add(cols, extra_col or zero)
    return ClosureMember(CostFunction(2, d, table), rows, cols,
                         language, gadget, provenance, crisp)


def _sum_table(m1: ClosureMember, m2: ClosureMember) -> tuple[Cost, ...]:
    return tuple(INF if (a is INF or b is INF) else a + b
                 for a, b in zip(m1.fn.table, m2.fn.table))


def _sum_members(m1: ClosureMember, m2: ClosureMember, label: str) -> ClosureMember:
    d = m1.fn.domain_size
    raw = CostFunction(2, d, _sum_table(m1, m2))
    n1 = m1.gadget.instance.num_vars
    n2 = m2.gadget.instance.num_vars
    var_map2 = {}
    fresh = n1
    for v in range(n2):
        if v == m2.gadget.exposed[0]:
            var_map2[v] = m1.gadget.exposed[0]
        elif v == m2.gadget.exposed[1]:
            var_map2[v] = m1.gadget.exposed[1]
        else:
            var_map2[v] = fresh
            fresh += 1
    lang, inst = _combine(m1.language, m1.gadget.instance,
                          m2.language, m2.gadget.instance, var_map2, fresh)
    return _member(raw, lang, Gadget(inst, m1.gadget.exposed), label,
                   m1.uses_crisp_pins or m2.uses_crisp_pins,
                   extra_row=_vec_add(m1.row_shift, m2.row_shift),
                   extra_col=_vec_add(m1.col_shift, m2.col_shift))


def _compose_members(m1: ClosureMember, m2: ClosureMember, label: str) -> ClosureMember:
    d = m1.fn.domain_size
    raw = min_compose(m1.fn, m2.fn)
    # The middle variable carries both operands' normalization shifts; a
    # compensating finite unary levels them so the minimization is exact.
    mid_shift = _vec_add(m1.col_shift, m2.row_shift)
    k = max(mid_shift)

    n1 = m1.gadget.instance.num_vars
    n2 = m2.gadget.instance.num_vars
    middle = m1.gadget.exposed[1]
    var_map2 = {}
    fresh = n1
    for v in range(n2):
        if v == m2.gadget.exposed[0]:
            var_map2[v] = middle
        else:
            var_map2[v] = fresh
            fresh += 1
    lang, inst = _combine(m1.language, m1.gadget.instance,
                          m2.language, m2.gadget.instance, var_map2, fresh)
    if k > 0:
        compensator = unary_fn(tuple(k - s for s in mid_shift))
        comp_index = len(lang.functions)
        lang = lang.extended([compensator])
        inst = Instance(inst.num_vars, inst.terms + (Term(comp_index, (middle,)),))
    exposed = (m1.gadget.exposed[0], var_map2[m2.gadget.exposed[1]])
    zero = tuple(Fraction(0) for _ in range(d))
    return _member(raw, lang, Gadget(inst, exposed), label,
                   m1.uses_crisp_pins or m2.uses_crisp_pins,
                   extra_row=_vec_add(m1.row_shift, tuple(k for _ in range(d))),
                   extra_col=_vec_add(m2.col_shift, zero))


def _transpose_member(m: ClosureMember, label: str) -> ClosureMember:
    # A normalized table stays normalized under transposition, so the shifts
    # simply swap sides.
    return ClosureMember(m.fn.transpose(), m.col_shift, m.row_shift,
                         m.language, Gadget(m.gadget.instance,
                                            (m.gadget.exposed[1], m.gadget.exposed[0])),
                         label, m.uses_crisp_pins)


def _restricted_table(fn: CostFunction, side: int, subset) -> tuple[Cost, ...]:
    d = fn.domain_size
    keep = set(subset)
    table = list(fn.table)
    for a in range(d):
        for b in range(d):
            lab = a if side == 0 else b
            if lab not in keep:
                table[a * d + b] = INF
    return tuple(table)


def _restrict_member(m: ClosureMember, side: int, subset: tuple[int, ...],
                     label: str) -> ClosureMember:
    d = m.fn.domain_size
    raw = CostFunction(2, d, _restricted_table(m.fn, side, subset))
    u = crisp_unary(d, set(subset))
    idx = len(m.language.functions)
    lang = m.language.extended([u])
    inst = Instance(m.gadget.instance.num_vars,
                    m.gadget.instance.terms + (Term(idx, (m.gadget.exposed[side],)),))
    return _member(raw, lang, Gadget(inst, m.gadget.exposed), label, True,
                   extra_row=m.row_shift, extra_col=m.col_shift)


def _seed_zero(language: Language) -> ClosureMember:
    d = language.domain_size
    zero_table = CostFunction(2, d, tuple(Fraction(0) for _ in range(d * d)))
    lang = Language(d, (), language.unary_closure)
    return _member(zero_table, lang, Gadget(Instance(2, ()), (0, 1)),
                   "zero", False)


def _seed_unary_lift(language, fi, flip: bool) -> ClosureMember:
    d = language.domain_size
    fn = language.functions[fi]
    raw = CostFunction(2, d, tuple(
        fn.table[b if flip else a] for a in range(d) for b in range(d)))
    lang = Language(d, (fn,), language.unary_closure)
    inst = Instance(2, (Term(0, (1 if flip else 0,)),))
    exposed = (0, 1)
    return _member(raw, lang, Gadget(inst, exposed),
                   f"lift(f{fi}{', flipped' if flip else ''})", False)


def _subsets(d: int):
    """Nonempty label subsets in a fixed order (full domain last)."""
    subs = [tuple(lab for lab in range(d) if mask >> lab & 1)
            for mask in range(1, 1 << d)]
    subs.sort(key=lambda s: (len(s), s))
    return subs


def _seed_projection(language, fi, keep, restriction) -> ClosureMember:
    d = language.domain_size
    fn = language.functions[fi]
    others = [k for k in range(fn.arity) if k not in keep]
    allowed = {k: restriction[k] for k in others if len(restriction[k]) < d}
    raw = CostFunction(2, d, _project_table(fn, keep, allowed, {}))

    extra = []
    terms = [Term(0, tuple(range(fn.arity)))]
    for k in others:
        if len(restriction[k]) < d:
            terms.append(Term(1 + len(extra), (k,)))
            extra.append(crisp_unary(d, restriction[k]))
    lang = Language(d, (fn, *extra), language.unary_closure)
    inst = Instance(fn.arity, tuple(terms))
    desc = ",".join(f"x{k} in {{{','.join(map(str, restriction[k]))}}}"
                    for k in others if len(restriction[k]) < d)
    label = f"project(f{fi}; keep={keep}" + (f"; {desc}" if desc else "") + ")"
    return _member(raw, lang, Gadget(inst, keep), label, bool(allowed))


def binary_closure(language: Language, budget_rounds: int = 4,
                   budget_size: int = 256,
                   magnitude_bits: int = MAGNITUDE_BITS) -> BinaryClosure:
    """Budgeted binary fragment of the language's expressive power.

    Runs until a full round adds nothing (saturated) or a budget trips.
    Members whose entries outgrow ``magnitude_bits`` are dropped and the
    closure is then never reported saturated.
    """
    d = language.domain_size
    if d > CLOSURE_DOMAIN_CAP:
        raise CapabilityError(f"closure is capped at |D| <= {CLOSURE_DOMAIN_CAP}")

    members: list[ClosureMember] = []
    index: dict[tuple, int] = {}
    state = {"dropped": False, "full": False}

    def fresh(raw_table) -> bool:
        """Cheap pre-check so audit gadgets are only built for real additions."""
        key = _normalize(raw_table, d)[0]
        if key in index:
            return False
        if not _within_magnitude(key, magnitude_bits):
            state["dropped"] = True
            return False
        if len(members) >= budget_size:
            state["full"] = True
            return False
        return True

    def add(member: ClosureMember) -> bool:
        key = member.fn.table
        if key in index:
            return False
        if not _within_magnitude(key, magnitude_bits):
            state["dropped"] = True
            return False
        if len(members) >= budget_size:
            state["full"] = True
            return False
        index[key] = len(members)
        members.append(member)
        return True

    add(_seed_zero(language))
    subs = _subsets(d)
    for fi, fn in enumerate(language.functions):
        if state["full"]:
            break
        if fn.arity == 1:
            add(_seed_unary_lift(language, fi, False))
            add(_seed_unary_lift(language, fi, True))
            continue
        coords = range(fn.arity)
        for keep in product(coords, repeat=2):
            if keep[0] == keep[1]:
                continue
            others = [k for k in coords if k not in keep]
            for combo in product(subs, repeat=len(others)):
                if state["full"]:
                    break
                restriction = dict(zip(others, combo))
                add(_seed_projection(language, fi, keep, restriction))

    saturated = False
    rounds_run = 0
    start = 0
    for _ in range(budget_rounds):
        if state["full"]:
            break
        rounds_run += 1
        n = len(members)
        added = 0
        dropped_before = state["dropped"]

        for i in range(start, n):
            if fresh(members[i].fn.transpose().table):
                added += add(_transpose_member(members[i], f"transpose(m{i})"))
        for j in range(start, n):
            for i in range(j + 1):
                if fresh(_sum_table(members[i], members[j])):
                    added += add(_sum_members(members[i], members[j],
                                              f"sum(m{i},m{j})"))
        for i in range(n):
            for j in range(n):
                if i >= start or j >= start:
                    if fresh(min_compose(members[i].fn, members[j].fn).table):
                        added += add(_compose_members(members[i], members[j],
                                                      f"compose(m{i},m{j})"))
        for i in range(start, n):
            for side in (0, 1):
                for s in subs:
                    if len(s) == d:
                        continue
                    if fresh(_restricted_table(members[i].fn, side, s)):
                        added += add(_restrict_member(
                            members[i], side, s,
                            f"restrict(m{i}; {'row' if side == 0 else 'col'} in "
                            f"{{{','.join(map(str, s))}}})"))
        start = n

        if added == 0 and state["dropped"] == dropped_before and not state["full"]:
            saturated = True
            break

    if state["dropped"] or state["full"]:
        saturated = False
    return BinaryClosure(d, members, budget_rounds, budget_size, saturated, rounds_run)


def audit_member(member: ClosureMember, cap: int = EXPRESS_CAP) -> bool:
    """Replay the member's gadget and compare against table + shifts."""
    expressed = express_gadget(member.gadget, member.language, cap=cap)
    d = member.fn.domain_size
    for a in range(d):
        for b in range(d):
            if expressed.table[a * d + b] != member.raw_value(a, b):
                return False
    return True


def member_to_json(member: ClosureMember, with_gadget: bool = True) -> dict:
    from .core import cost_to_json, instance_to_json, language_to_json
    out = {
        "arity": 2,
        "table": [cost_to_json(v) for v in member.fn.table],
        "row_shift": [cost_to_json(v) for v in member.row_shift],
        "col_shift": [cost_to_json(v) for v in member.col_shift],
        "provenance": member.provenance,
        "uses_crisp_pins": member.uses_crisp_pins,
    }
    if with_gadget:
        out["gadget"] = {
            "exposed": list(member.gadget.exposed),
            "instance": instance_to_json(member.gadget.instance),
            "language": language_to_json(member.language),
        }
    return out
