"""Multilinear polynomials over pair variables x_uv and the degree-bounded
refutation engines (Nullstellensatz, monomial calculus, polynomial calculus)
for graph-isomorphism axiom systems.

Variables are ordered vertex pairs: x_uv asserts "u maps to v".  The axiom
system for a graph says the x_uv form a permutation matrix (one image and
one preimage each), that no two assignments break a pair color (A3), and
that variables are 0/1 (A4, realized by working in the multilinear
quotient).  Pinning axioms (A5) fix the images of a tuple's coordinates.

All engines run in the multilinear quotient and, for graph instances, in
the further quotient by monomials containing an A3-forbidden assignment
pair: such monomials are an A3 axiom times a monomial, hence always
derivable within the degree bound, so span answers are unchanged while the
monomial universe shrinks enough to make CFI-scale runs feasible.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field as dc_field

from .exactla import ResourceGuardError, RrefBasis
from .field import Field
from .graphcore import ColoredGraph, atomic_type_partition

CONST = frozenset()


# ---------------------------------------------------------------------------
# polynomials


@dataclass
class Polynomial:
    """Sparse multilinear polynomial: monomial (frozenset of variable
    pairs) -> nonzero coefficient."""

    field: Field
    terms: dict

    def __post_init__(self):
        zero = self.field.zero
        self.terms = {frozenset(m): self.field.elem(c)
                      for m, c in self.terms.items() if self.field.elem(c) != zero}

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms


def multilinear_reduce(field: Field, raw: dict) -> Polynomial:
    """Collapse exponents: keys may be variable sequences with repeats;
    x^e becomes x for every e >= 1."""
    acc = {}
    zero = field.zero
    for key, coef in raw.items():
        mon = frozenset(key)
        v = field.add(acc.get(mon, zero), field.elem(coef))
        if v == zero:
            acc.pop(mon, None)
        else:
            acc[mon] = v
    return Polynomial(field, acc)


def poly_mul(a: Polynomial, b: Polynomial) -> Polynomial:
    f = a.field
    raw = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            mon = m1 | m2
            raw[mon] = f.add(raw.get(mon, f.zero), f.mul(c1, c2))
    return Polynomial(f, raw)


def poly_add(a: Polynomial, b: Polynomial) -> Polynomial:
    f = a.field
    out = dict(a.terms)
    for m, c in b.terms.items():
        v = f.add(out.get(m, f.zero), c)
        if v == f.zero:
            out.pop(m, None)
        else:
            out[m] = v
    return Polynomial(f, out)


def poly_eval(p: Polynomial, assignment: dict):
    """Evaluate at a point; assignment maps variable pairs to field values."""
    f = p.field
    total = f.zero
    for mon, coef in p.terms.items():
        v = coef
        for var in mon:
            v = f.mul(v, f.elem(assignment[var]))
        total = f.add(total, v)
    return total


# ---------------------------------------------------------------------------
# axioms


def local_iso_pair(g: ColoredGraph, a, b) -> bool:
    """Is the partial map {a[0] -> a[1], b[0] -> b[1]} a local isomorphism?

    Checks well-definedness, injectivity, and preservation of both
    directed pair colors (loop colors included via the diagonal)."""
    (u1, v1), (u2, v2) = a, b
    if g.colors[u1, u1] != g.colors[v1, v1] or g.colors[u2, u2] != g.colors[v2, v2]:
        return False
    if u1 == u2:
        return v1 == v2
    if v1 == v2:
        return False
    return (g.colors[u1, u2] == g.colors[v1, v2]
            and g.colors[u2, u1] == g.colors[v2, v1])


def plausible_pairs(g: ColoredGraph):
    """Variables x_uv whose singleton map is a local isomorphism."""
    return [(u, v) for u in range(g.n) for v in range(g.n)
            if g.colors[u, u] == g.colors[v, v]]


@dataclass
class AxiomSet:
    """Tagged polynomials encoding isomorphism constraints.

    For graph instances A3 is huge (all non-local-isomorphism variable
    pairs); it is materialized only for small graphs and always available
    through forbidden-pair queries on the graph.  A4 (x^2 - x) is listed
    for every variable; the engines realize it by multilinear reduction.
    """

    field: Field
    polys: list                      # (tag, Polynomial) pairs
    graph: ColoredGraph | None = None
    target: tuple | None = None      # (u_tuple, v_tuple) for pinning axioms
    a3_materialized: bool = False

    def tagged(self, tag: str):
        return [p for t, p in self.polys if t == tag]


_A3_MATERIALIZE_LIMIT = 8


def ax_graph(g: ColoredGraph, field: Field) -> AxiomSet:
    f = field
    one, mone = f.one, f.neg(f.one)
    polys = []
    for v in range(g.n):
        terms = {frozenset({(u, v)}): one for u in range(g.n)}
        terms[CONST] = mone
        polys.append(("A1", Polynomial(f, terms)))
    for v in range(g.n):
        terms = {frozenset({(v, u)}): one for u in range(g.n)}
        terms[CONST] = mone
        polys.append(("A2", Polynomial(f, terms)))
    materialize = g.n <= _A3_MATERIALIZE_LIMIT
    if materialize:
        allv = [(u, v) for u in range(g.n) for v in range(g.n)]
        for i, a in enumerate(allv):
            for b in allv[i:]:
                if not local_iso_pair(g, a, b):
                    # a == b gives x^2, whose multilinear image is x itself
                    polys.append(("A3", Polynomial(f, {frozenset({a, b}): one})))
    for u in range(g.n):
        for v in range(g.n):
            # x^2 - x: listed for completeness, zero in the multilinear quotient
            polys.append(("A4", Polynomial(f, {})))
    return AxiomSet(f, polys, graph=g, a3_materialized=materialize)


def ax_iso(g: ColoredGraph, u, v, field: Field) -> AxiomSet:
    """Ax for an isomorphism pinned on tuples: adds x_{v_i u_i} - 1."""
    if len(u) != len(v):
        raise ValueError("tuples have different widths")
    base = ax_graph(g, field)
    polys = list(base.polys)
    one, mone = field.one, field.neg(field.one)
    for ui, vi in zip(u, v):
        polys.append(("A5", Polynomial(
            field, {frozenset({(int(vi), int(ui))}): one, CONST: mone})))
    return AxiomSet(field, polys, graph=g, target=(tuple(u), tuple(v)),
                    a3_materialized=base.a3_materialized)


# ---------------------------------------------------------------------------
# monomial workspaces


class Workspace:
    """The degree-bounded monomial universe and its column order.

    Columns are ordered degree-descending, ties broken lexicographically on
    the sorted variable list, so a basis row whose pivot monomial has
    degree < d is supported entirely on monomials of degree < d.
    """

    def __init__(self, field: Field, degree: int, variables,
                 forbidden=None, guard_monomials: int | None = None):
        if degree < 0:
            raise ValueError("degree must be >= 0")
        self.field = field
        self.degree = degree
        self.vars = sorted(set(variables))
        nvars = len(self.vars)
        compat = None
        if forbidden is not None:
            compat = [set() for _ in range(nvars)]
            for i in range(nvars):
                for j in range(i + 1, nvars):
                    if not forbidden(self.vars[i], self.vars[j]):
                        compat[i].add(j)
        # good monomials = cliques of the compatibility graph, by size
        levels = [[()]]
        if degree >= 1:
            levels.append([(i,) for i in range(nvars)])
        for d in range(2, degree + 1):
            nxt = []
            for mon in levels[d - 1]:
                last = mon[-1]
                opts = range(last + 1, nvars) if compat is None else sorted(
                    set.intersection(*(compat[i] for i in mon)))
                for j in opts:
                    if j > last:
                        nxt.append(mon + (j,))
            levels.append(nxt)
        self.monomials = []
        for d in range(degree, -1, -1):
            for mon in sorted(levels[d]) if d <= degree else []:
                self.monomials.append(frozenset(self.vars[i] for i in mon))
        if guard_monomials is not None and len(self.monomials) > guard_monomials:
            raise ResourceGuardError(
                f"monomial universe {len(self.monomials)} exceeds cap {guard_monomials}")
        self.col = {m: i for i, m in enumerate(self.monomials)}
        self.coldeg = [len(m) for m in self.monomials]
        self.const_col = self.col[CONST]
        # children[c] = columns of good monomials one variable larger
        self.children = [[] for _ in self.monomials]
        for c, mon in enumerate(self.monomials):
            for var in mon:
                self.children[self.col[mon - {var}]].append(c)

    def product_vector(self, terms: dict, mult: frozenset):
        """Quotient image of X_mult times a polynomial, as a column vector,
        plus the true (pre-quotient) degree of the product."""
        f = self.field
        zero = f.zero
        vec = {}
        deg = 0
        for mon, coef in terms.items():
            full = mon | mult
            if len(full) > deg:
                deg = len(full)
            c = self.col.get(full)
            if c is None:
                continue  # forbidden monomial: zero in the quotient
            v = f.add(vec.get(c, zero), coef)
            if v == zero:
                vec.pop(c, None)
            else:
                vec[c] = v
        return vec, deg

    def multipliers(self, max_deg: int):
        """Good monomials of degree <= max_deg, ascending degree.

        Ascending order lets refutations short-circuit before the large
        high-degree multiplier sweeps, which matters on big instances."""
        out = [m for m in self.monomials if len(m) <= max_deg]
        out.reverse()
        return out

    def multipliers_at(self, deg: int):
        """Good monomials of degree exactly deg, deterministic order."""
        return [m for m in self.monomials if len(m) == deg]


def graph_workspace(g: ColoredGraph, field: Field, degree: int,
                    guard_monomials: int | None = None) -> Workspace:
    return Workspace(field, degree, plausible_pairs(g),
                     forbidden=lambda a, b: not local_iso_pair(g, a, b),
                     guard_monomials=guard_monomials)


def generic_workspace(axioms: AxiomSet, degree: int,
                      guard_monomials: int | None = None) -> Workspace:
    variables = set()
    for _, p in axioms.polys:
        for mon in p.terms:
            variables.update(mon)
    return Workspace(axioms.field, degree, variables,
                     guard_monomials=guard_monomials)


# ---------------------------------------------------------------------------
# refutation engines


@dataclass
class RefutationResult:
    result: str                 # REFUTE | NOREFUTE
    degree: int
    witness: list | None = None


class Engine:
    """Span-closure engine over a Workspace; one RrefBasis, checkpointable
    so pinned-pair runs can share the graph-axiom base."""

    def __init__(self, ws: Workspace, track: bool = False,
                 guard_rows: int | None = None):
        self.ws = ws
        self.basis = RrefBasis(ws.field, track=track, max_rows=guard_rows)
        self.track = track
        self.gen_info = []       # per grew-generator tag: (axiom_tag, terms, mult)
        self.mc_found = set()    # column ids of monomials known in span
        self.pc_done = set()     # content keys of rows already multiplied out

    # -- state sharing -----------------------------------------------------

    def checkpoint(self):
        self.basis.checkpoint()
        return (len(self.gen_info), set(self.mc_found), set(self.pc_done))

    def rollback(self, mark):
        self.basis.rollback()
        del self.gen_info[mark[0]:]
        self.mc_found = mark[1]
        self.pc_done = mark[2]

    # -- insertion ---------------------------------------------------------

    @property
    def refuted(self) -> bool:
        # the constant column is the largest id, so a pivot there is a row
        # supported on the constant monomial alone: 1 is in the span
        return self.basis.has_pivot(self.ws.const_col)

    def _insert(self, vec, info=None) -> bool:
        tag = len(self.gen_info) if self.track else None
        grew = self.basis.insert(vec, tag)
        if grew and self.track:
            self.gen_info.append(info)
        return grew

    def add_axiom_products(self, tag: str, poly: Polynomial,
                           mult_bound: int | None = None):
        """Insert X_M * poly for every good multiplier within the degree cap.

        mult_bound trims multiplier enumeration when the caller knows
        larger multipliers give illegal or zero products (true for the
        degree-1 graph axioms); the exact degree check still runs."""
        if poly.is_zero():
            return
        if mult_bound is None:
            mult_bound = self.ws.degree
        for mult in self.ws.multipliers(mult_bound):
            vec, deg = self.ws.product_vector(poly.terms, mult)
            if deg > self.ws.degree or not vec:
                continue
            self._insert(vec, (tag, poly.terms, mult))
            if self.refuted:
                return

    def add_axioms(self, axioms: AxiomSet, tags=None):
        """Insert all in-degree axiom products.

        Products are enumerated pinning axioms first, then by multiplier
        degree level interleaved across axioms, with multipliers touching
        the pinned vertices ahead of the rest within each level.  The final
        span is order-independent; the ordering only makes refutations
        trigger early, keeping the basis small on large instances."""
        chosen = [(t, p) for t, p in axioms.polys
                  if (tags is None or t in tags) and t != "A4"
                  and not p.is_zero()]
        rank = {"A5": 0, "A1": 1, "A2": 2}
        chosen.sort(key=lambda tp: rank.get(tp[0], 3))
        touched = set()
        if axioms.target is not None:
            for part in axioms.target:
                touched.update(int(x) for x in part)
        for d in range(0, self.ws.degree + 1):
            mults = self.ws.multipliers_at(d)
            if touched and d >= 1:
                mults = sorted(
                    mults, key=lambda m: -sum(1 for a, b in m
                                              if a in touched or b in touched))
            for tag, poly in chosen:
                # degree-1 graph axioms: larger multipliers only give
                # illegal or zero products, so trim the enumeration
                bound = (self.ws.degree - 1 if tag in ("A1", "A2", "A5")
                         else self.ws.degree)
                if d > bound:
                    continue
                for mult in mults:
                    vec, deg = self.ws.product_vector(poly.terms, mult)
                    if deg > self.ws.degree or not vec:
                        continue
                    self._insert(vec, (tag, poly.terms, mult))
                    if self.refuted:
                        return

    # -- closures ----------------------------------------------------------

    def saturate_mc(self):
        """Monomial closure: find monomials of degree < d in the span, add
        all their good supermonomials, repeat to a fixed point."""
        ws = self.ws
        low = [c for c in range(len(ws.monomials)) if ws.coldeg[c] < ws.degree]
        one = ws.field.one
        changed = True
        while changed and not self.refuted:
            changed = False
            for c in low:
                if c in self.mc_found:
                    continue
                if not self.basis.contains({c: one}):
                    continue
                self.mc_found.add(c)
                stack = [c]
                seen = {c}
                while stack:
                    b = stack.pop()
                    if self._insert({b: one}):
                        changed = True
                    for child in ws.children[b]:
                        if child not in seen:
                            seen.add(child)
                            stack.append(child)
                if self.refuted:
                    return

    def saturate_pc(self):
        """Polynomial closure: multiply every basis row supported on
        degree-< d monomials by every variable, insert, repeat."""
        ws = self.ws
        f = ws.field
        changed = True
        while changed and not self.refuted:
            changed = False
            for row in list(self.basis.rows):
                if ws.coldeg[min(row)] >= ws.degree:
                    continue
                key = tuple(sorted(row.items()))
                if key in self.pc_done:
                    continue
                self.pc_done.add(key)
                for var in ws.vars:
                    vec = {}
                    for c, coef in row.items():
                        full = ws.monomials[c] | {var}
                        nc = ws.col.get(full)
                        if nc is None:
                            continue
                        v = f.add(vec.get(nc, f.zero), coef)
                        if v == f.zero:
                            vec.pop(nc, None)
                        else:
                            vec[nc] = v
                    if vec and self._insert(vec):
                        changed = True
                if self.refuted:
                    return

    def saturate(self, calculus: str):
        if calculus == "mc":
            self.saturate_mc()
        elif calculus == "pc":
            self.saturate_pc()
        elif calculus != "nc":
            raise ValueError(f"unknown calculus {calculus!r}")


def _make_engine(axioms: AxiomSet, degree: int, track=False,
                 guard_monomials=None, guard_rows=None) -> Engine:
    if axioms.graph is not None:
        ws = graph_workspace(axioms.graph, axioms.field, degree, guard_monomials)
    else:
        ws = generic_workspace(axioms, degree, guard_monomials)
    eng = Engine(ws, track=track, guard_rows=guard_rows)
    if axioms.graph is not None:
        eng.add_axioms(axioms, tags={"A1", "A2", "A5"})
    else:
        eng.add_axioms(axioms)
    return eng


def _extract_witness(eng: Engine, axioms: AxiomSet):
    """Generator combination deriving 1, verified by full re-expansion.

    The basis works in the quotient by forbidden monomials; the raw
    combination re-expands to 1 plus a forbidden-supported remainder,
    which is cancelled by explicit A3-times-monomial generators."""
    ws = eng.ws
    f = ws.field
    if f.characteristic == 2:
        res, combo_bits = eng.basis.reduce_bits(1 << ws.const_col)
        assert res == 0
        combo = {}
        t = combo_bits
        while t:
            low = t & -t
            combo[low.bit_length() - 1] = f.one
            t ^= low
    else:
        res, combo = eng.basis.reduce({ws.const_col: f.one})
        assert not res
    entries = []
    expansion = {}

    def accumulate(coef, terms, mult):
        for mon, c in terms.items():
            full = mon | mult
            v = f.add(expansion.get(full, f.zero), f.mul(coef, c))
            if v == f.zero:
                expansion.pop(full, None)
            else:
                expansion[full] = v

    for tag_id, coef in combo.items():
        atag, terms, mult = eng.gen_info[tag_id]
        entries.append({"axiom": atag, "terms": dict(terms),
                        "multiplier": mult, "coefficient": coef})
        accumulate(coef, terms, mult)
    # cancel forbidden-supported remainder with A3 generators
    g = axioms.graph
    for mon in [m for m in expansion if m != CONST]:
        coef = expansion.get(mon)
        if coef is None or mon in ws.col:
            raise AssertionError("witness remainder is not forbidden-supported")
        core = None
        for a, b in itertools.combinations(sorted(mon), 2):
            if not local_iso_pair(g, a, b):
                core = frozenset({a, b})
                break
        if core is None:
            for a in sorted(mon):
                if not local_iso_pair(g, a, a):
                    core = frozenset({a})
                    break
        if core is None:
            raise AssertionError("witness remainder is not forbidden-supported")
        terms = {core: f.one}
        mult = mon - core
        entries.append({"axiom": "A3", "terms": terms, "multiplier": mult,
                        "coefficient": f.neg(coef)})
        accumulate(f.neg(coef), terms, mult)
    if expansion != {CONST: f.one}:
        raise AssertionError("witness does not re-expand to 1")
    return entries


def nc_refute(axioms: AxiomSet, degree: int, want_witness: bool = False,
              guard_monomials=None, guard_rows=None) -> RefutationResult:
    """Is 1 in the span of {axiom times monomial, degree <= d}?"""
    eng = _make_engine(axioms, degree, track=want_witness,
                       guard_monomials=guard_monomials, guard_rows=guard_rows)
    if not eng.refuted:
        return RefutationResult("NOREFUTE", degree)
    witness = _extract_witness(eng, axioms) if want_witness else None
    return RefutationResult("REFUTE", degree, witness)


def mc_refute(axioms: AxiomSet, degree: int,
              guard_monomials=None, guard_rows=None) -> RefutationResult:
    eng = _make_engine(axioms, degree, guard_monomials=guard_monomials,
                       guard_rows=guard_rows)
    eng.saturate_mc()
    return RefutationResult("REFUTE" if eng.refuted else "NOREFUTE", degree)


def pc_refute(axioms: AxiomSet, degree: int,
              guard_monomials=None, guard_rows=None) -> RefutationResult:
    eng = _make_engine(axioms, degree, guard_monomials=guard_monomials,
                       guard_rows=guard_rows)
    eng.saturate_pc()
    return RefutationResult("REFUTE" if eng.refuted else "NOREFUTE", degree)


def refute(axioms: AxiomSet, calculus: str, degree: int, want_witness=False,
           guard_monomials=None, guard_rows=None) -> RefutationResult:
    if calculus == "nc":
        return nc_refute(axioms, degree, want_witness,
                         guard_monomials, guard_rows)
    if calculus == "mc":
        return mc_refute(axioms, degree, guard_monomials, guard_rows)
    if calculus == "pc":
        return pc_refute(axioms, degree, guard_monomials, guard_rows)
    raise ValueError(f"unknown calculus {calculus!r}")


# ---------------------------------------------------------------------------
# induced tuple partitions


class PairTester:
    """Shared-base refutation tests for pinned tuple pairs on one graph.

    The graph-axiom products (and, for mc/pc, their closure) are computed
    once; each pair adds its pinning products on top of a checkpoint and
    rolls back afterwards."""

    def __init__(self, g: ColoredGraph, field: Field, calculus: str,
                 degree: int, guard_monomials=None, guard_rows=None):
        if calculus not in ("nc", "mc", "pc"):
            raise ValueError(f"unknown calculus {calculus!r}")
        self.g = g
        self.field = field
        self.calculus = calculus
        self.degree = degree
        self.ws = graph_workspace(g, field, degree, guard_monomials)
        self.eng = Engine(self.ws, guard_rows=guard_rows)
        base = ax_graph(g, field)
        self.eng.add_axioms(base, tags={"A1", "A2"})
        self.eng.saturate(calculus)
        self.base_refuted = self.eng.refuted

    def refutes(self, u, v) -> bool:
        """Degree-bounded refutation of the axioms pinning u onto v?"""
        if self.base_refuted:
            return True
        f = self.field
        one, mone = f.one, f.neg(f.one)
        mark = self.eng.checkpoint()
        try:
            for ui, vi in zip(u, v):
                poly = Polynomial(
                    f, {frozenset({(int(vi), int(ui))}): one, CONST: mone})
                self.eng.add_axiom_products("A5", poly, self.degree - 1)
                if self.eng.refuted:
                    return True
            self.eng.saturate(self.calculus)
            return self.eng.refuted
        finally:
            self.eng.rollback(mark)


def calculus_equiv_partition(g: ColoredGraph, k: int, calculus: str,
                             degree: int, field: Field,
                             guard_monomials=None, guard_rows=None):
    """Partition of V^k: u ~ v iff the pinned axiom set has no refutation
    of degree <= d.  Pairs in different atomic classes are never tested
    (mismatched types are refuted separately; the tests confirm this);
    within a class, representatives are elected in tuple-rank order, valid
    because the relation is an equivalence."""
    import numpy as np

    from .graphcore import TupleIndex
    from .partition import LabelledPartition

    atomic = atomic_type_partition(g, k)
    tester = PairTester(g, field, calculus, degree, guard_monomials, guard_rows)
    tindex = TupleIndex(g.n, k)
    out = np.zeros(tindex.size, dtype=np.int64)
    next_color = 0
    for ranks in atomic.classes():
        reps = []              # (color, tuple) per representative
        for rank in sorted(int(x) for x in ranks):
            v = tindex.unrank(rank)
            for color, rep in reps:
                if not tester.refutes(rep, v):
                    out[rank] = color
                    break
            else:
                out[rank] = next_color
                reps.append((next_color, v))
                next_color += 1
    return LabelledPartition.from_raw(k, g.n, out)
