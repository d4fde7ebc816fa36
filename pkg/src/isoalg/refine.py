"""Refinement operators on labelled partitions of V^k.

Two families: counting steps (color a tuple by the multisets of colors
reachable through r-fold substitutions) and solvability steps (color a
tuple by the feasibility class of its character matrices under an
intertwining matrix with all row and column sums 1).  Fixed points of the
former are the k-dimensional Weisfeiler-Leman stable colorings; the
latter add linear-algebraic power that depends on the field.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .exactla import solve_feasible_sparse
from .field import Field
from .graphcore import TupleIndex
from .partition import (CharacterVector, LabelledPartition,
                        compare_partitions, is_invariant)


@dataclass(frozen=True)
class OperatorSpec:
    kind: str                  # counting | sol | sol_combined
    k: int
    r: int | None = None       # absent for sol_combined
    field: Field | None = None  # sol variants only

    def __post_init__(self):
        if self.kind not in ("counting", "sol", "sol_combined"):
            raise ValueError(f"unknown operator kind {self.kind!r}")
        if self.k < 1:
            raise ValueError("width must be >= 1")
        if self.kind == "counting":
            if self.r is None or not 1 <= self.r < self.k:
                raise ValueError("counting requires 1 <= r < k")
        elif self.kind == "sol":
            if self.r is None or self.r < 1 or 2 * self.r > self.k:
                raise ValueError("sol requires 1 <= r and 2r <= k")
            if self.field is None:
                raise ValueError("sol requires a field")
        else:
            if self.r is not None:
                raise ValueError("sol_combined ranges r internally")
            if self.field is None:
                raise ValueError("sol_combined requires a field")
            if self.k < 2:
                raise ValueError("sol_combined requires k >= 2")


def index_tuples(k: int, r: int):
    """[k]^(r): ordered injective r-tuples over 1..k."""
    return list(itertools.permutations(range(1, k + 1), r))


def _substituted_colors(gamma: LabelledPartition, i) -> np.ndarray:
    """(n^k, n^len(i)) array: row v, column x holds gamma(v<i, x>)."""
    n, k = gamma.n, gamma.k
    tindex = TupleIndex(n, k)
    d = tindex.digits()
    w = tindex.weights
    pos = [p - 1 for p in i]
    pos_w = w[pos]
    base = d @ w - d[:, pos] @ pos_w
    sub = TupleIndex(n, len(i))
    offsets = sub.digits() @ pos_w
    return gamma.colors[base[:, None] + offsets[None, :]]


# ---------------------------------------------------------------------------
# counting


def counting_step(gamma: LabelledPartition, r: int) -> LabelledPartition:
    """One round: append, per index tuple i, the sorted multiset of colors
    of the r-fold substitutions of each tuple."""
    k = gamma.k
    if not 1 <= r < k:
        raise ValueError("counting requires 1 <= r < k")
    parts = [gamma.colors[:, None]]
    for i in index_tuples(k, r):
        parts.append(np.sort(_substituted_colors(gamma, i), axis=1))
    key = np.concatenate(parts, axis=1)
    _, inverse = np.unique(key, axis=0, return_inverse=True)
    return LabelledPartition.from_raw(k, gamma.n, inverse)


def is_counting_stable(gamma: LabelledPartition, r: int) -> bool:
    """Substitution color counts are constant on every class: one more
    counting round changes nothing."""
    return compare_partitions(counting_step(gamma, r), gamma) == "equal"


# ---------------------------------------------------------------------------
# solvability


def _intertwiner_rows(field: Field, g1: np.ndarray, g2: np.ndarray):
    """Rows of the linear system: chi_sigma M = M xi_sigma for every color,
    all row sums of M equal 1, all column sums of M equal 1.  Unknown
    M[x, y] has id x*N + y."""
    nsq = g1.shape[0]
    one, zero = field.one, field.zero
    rows = []
    sigmas = sorted(set(np.unique(g1)) | set(np.unique(g2)))
    for s in sigmas:
        a = g1 == s
        b = g2 == s
        acols = [np.nonzero(a[x])[0] for x in range(nsq)]
        brows = [np.nonzero(b[:, y])[0] for y in range(nsq)]
        for x in range(nsq):
            ys = acols[x]
            for y in range(nsq):
                xs = brows[y]
                if not len(ys) and not len(xs):
                    continue
                coeffs = {}
                for t in ys:
                    c = int(t) * nsq + y
                    coeffs[c] = field.add(coeffs.get(c, zero), one)
                for t in xs:
                    c = x * nsq + int(t)
                    v = field.sub(coeffs.get(c, zero), one)
                    if v == zero:
                        coeffs.pop(c, None)
                    else:
                        coeffs[c] = v
                if coeffs:
                    rows.append((coeffs, zero))
    for x in range(nsq):
        rows.append(({x * nsq + y: one for y in range(nsq)}, one))
    for y in range(nsq):
        rows.append(({x * nsq + y: one for x in range(nsq)}, one))
    return rows, nsq * nsq


def _sol_equiv_grids(field: Field, g1: np.ndarray, g2: np.ndarray) -> bool:
    if g1.shape != g2.shape:
        raise ValueError("character grids have different shapes")
    if (g1 == g2).all():
        return True  # M = identity
    rows, nvars = _intertwiner_rows(field, g1, g2)
    return solve_feasible_sparse(field, rows, nvars) is not None


def sol_equiv(chi: CharacterVector, xi: CharacterVector, field: Field) -> bool:
    """Existence of an intertwiner M with unit row and column sums such
    that chi_sigma M = M xi_sigma for every color sigma."""
    if chi.num_source_colors != xi.num_source_colors:
        raise ValueError("character vectors come from different color sets")
    return _sol_equiv_grids(field, chi.grid, xi.grid)


class _EquivCache:
    """Representative election for an equivalence relation given by a
    pairwise test, with memoized pairwise answers keyed by pattern bytes."""

    def __init__(self, test):
        self.test = test
        self.memo = {}

    def classify(self, patterns):
        """patterns: list of (key_bytes, grid) in election order; returns a
        class id per entry.  Transitivity of the test lets each pattern be
        compared against one representative per class."""
        reps = []
        out = []
        byk = {}
        for key, grid in patterns:
            if key in byk:
                out.append(byk[key])
                continue
            for cid, (rkey, rgrid) in enumerate(reps):
                pair = (rkey, key)
                ans = self.memo.get(pair)
                if ans is None:
                    ans = self.test(rgrid, grid)
                    self.memo[pair] = ans
                if ans:
                    byk[key] = cid
                    out.append(cid)
                    break
            else:
                byk[key] = len(reps)
                out.append(len(reps))
                reps.append((key, grid))
        return out


def _sol_class_column(gamma: LabelledPartition, r: int, field: Field,
                      cache: _EquivCache | None = None) -> np.ndarray:
    """Per tuple: its solvability class id, combining every index tuple
    i in [k]^(2r).  Classes are local to each gamma-color."""
    k = gamma.k
    size = gamma.colors.size
    cache = cache or _EquivCache(lambda a, b: _sol_equiv_grids(field, a, b))
    nsq = gamma.n ** r
    columns = []
    class_ranks = [np.nonzero(gamma.colors == c)[0]
                   for c in range(gamma.num_colors)]
    for i in index_tuples(k, 2 * r):
        grids = _substituted_colors(gamma, i)
        col = np.zeros(size, dtype=np.int64)
        for ranks in class_ranks:
            pats = []
            for v in ranks:
                row = grids[v]
                pats.append((row.tobytes(), row.reshape(nsq, nsq)))
            ids = cache.classify(pats)
            col[ranks] = ids
        columns.append(col)
    return np.stack(columns, axis=1)


def sol_step(gamma: LabelledPartition, r: int, field: Field,
             _cache=None) -> LabelledPartition:
    """One solvability round: within each class, group tuples by the
    feasibility classes of their character matrices, for every index
    tuple.  Requires an invariant input partition."""
    if not 1 <= r or 2 * r > gamma.k:
        raise ValueError("sol requires 1 <= r and 2r <= k")
    if not is_invariant(gamma):
        raise ValueError("solvability steps are only defined on invariant partitions")
    cols = _sol_class_column(gamma, r, field, _cache)
    key = np.concatenate([gamma.colors[:, None], cols], axis=1)
    _, inverse = np.unique(key, axis=0, return_inverse=True)
    return LabelledPartition.from_raw(gamma.k, gamma.n, inverse)


def sol_combined_step(gamma: LabelledPartition, field: Field) -> LabelledPartition:
    """Product of the solvability steps for r = 1..floor(k/2)."""
    if gamma.k < 2:
        raise ValueError("combined solvability requires k >= 2")
    if not is_invariant(gamma):
        raise ValueError("solvability steps are only defined on invariant partitions")
    parts = [gamma.colors[:, None]]
    for r in range(1, gamma.k // 2 + 1):
        parts.append(_sol_class_column(gamma, r, field))
    key = np.concatenate(parts, axis=1)
    _, inverse = np.unique(key, axis=0, return_inverse=True)
    return LabelledPartition.from_raw(gamma.k, gamma.n, inverse)


def is_sol_stable(gamma: LabelledPartition, r: int, field: Field) -> bool:
    """Every same-colored pair has intertwinable character matrices for
    every index tuple: one more solvability round changes nothing."""
    return compare_partitions(sol_step(gamma, r, field), gamma) == "equal"


# ---------------------------------------------------------------------------
# fixed points


def apply_step(op: OperatorSpec, gamma: LabelledPartition) -> LabelledPartition:
    if op.k != gamma.k:
        raise ValueError("operator width does not match the partition")
    if op.kind == "counting":
        return counting_step(gamma, op.r)
    if op.kind == "sol":
        return sol_step(gamma, op.r, op.field)
    return sol_combined_step(gamma, op.field)


def fixed_point(op: OperatorSpec, gamma0: LabelledPartition,
                on_step=None) -> LabelledPartition:
    """Iterate the operator until the induced partition stops changing.

    Each step is checked to refine its input; class counts strictly
    increase until stability, so at most n^k iterations run.
    """
    gamma = gamma0.relabelled()
    for _ in range(gamma.colors.size + 1):
        nxt = apply_step(op, gamma)
        rel = compare_partitions(nxt, gamma)
        if rel not in ("equal", "first_refines_second"):
            raise AssertionError("refinement step failed to refine its input")
        if on_step is not None:
            on_step(gamma, nxt)
        if rel == "equal":
            return nxt
        gamma = nxt
    raise AssertionError("fixed-point iteration failed to terminate")
