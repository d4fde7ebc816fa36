"""Exact dense and sparse linear algebra over a Field.

Two engines live here:

* Matrix / rref / solve_feasible: small dense systems, unique reduced
  row-echelon form, feasibility with a substitution-verified solution.
* RrefBasis: an incrementally maintained row basis over integer-indexed
  coordinates supporting span-membership queries.  The column order is
  ascending coordinate id; callers that need a particular order (e.g.
  degree-descending monomial spaces) assign ids accordingly.

RrefBasis internally keeps a row-echelon representation (for GF(2) the
rows are bitmask ints, which is what makes the large proof-system runs
feasible); the `rows` view is always fully reduced, so the observable
basis is the RREF one.  Basis state is single-writer; concurrent reads
of a frozen basis are safe.
"""

from __future__ import annotations

from dataclasses import dataclass

from .field import Field, FieldError


class ResourceGuardError(RuntimeError):
    """A configured resource cap (basis rows, monomial count) was exceeded."""


# ---------------------------------------------------------------------------
# dense matrices


@dataclass
class Matrix:
    rows: int
    cols: int
    data: list  # row-major list of rows (lists of field elements)

    def __post_init__(self):
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError("entry count does not match rows x cols")

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        return cls(len(rows), len(rows[0]) if rows else 0, rows)

    def copy(self):
        return Matrix(self.rows, self.cols, [list(r) for r in self.data])


def rref(m: Matrix, field: Field):
    """Unique reduced row-echelon form of m; returns (rref, rank, pivots)."""
    a = [list(r) for r in m.data]
    zero, pivots, lead = field.zero, [], 0
    for col in range(m.cols):
        piv = next((r for r in range(lead, m.rows) if a[r][col] != zero), None)
        if piv is None:
            continue
        a[lead], a[piv] = a[piv], a[lead]
        inv = field.inv(a[lead][col])
        a[lead] = [field.mul(inv, x) for x in a[lead]]
        for r in range(m.rows):
            if r != lead and a[r][col] != zero:
                c = a[r][col]
                a[r] = [field.sub(x, field.mul(c, y)) for x, y in zip(a[r], a[lead])]
        pivots.append(col)
        lead += 1
        if lead == m.rows:
            break
    return Matrix(m.rows, m.cols, a), len(pivots), pivots


def solve_feasible(field: Field, a: Matrix, b):
    """Solve a x = b exactly; returns a solution vector or None if infeasible.

    Any returned solution is verified by substitution before being handed
    back, so a non-None answer is a certificate.
    """
    if len(b) != a.rows:
        raise ValueError(f"rhs length {len(b)} does not match {a.rows} rows")
    aug = Matrix(a.rows, a.cols + 1, [list(r) + [v] for r, v in zip(a.data, b)])
    red, _, pivots = rref(aug, field)
    zero = field.zero
    if a.cols in pivots:  # a row (0 ... 0 | 1)
        return None
    x = [zero] * a.cols
    for prow, pcol in enumerate(pivots):
        x[pcol] = red.data[prow][a.cols]
    for row, rhs in zip(a.data, b):
        acc = zero
        for coef, xi in zip(row, x):
            if coef != zero and xi != zero:
                acc = field.add(acc, field.mul(coef, xi))
        if acc != rhs:
            raise AssertionError("solver produced an invalid solution")
    return x


def solve_feasible_sparse(field: Field, rows, nvars: int):
    """Feasibility of a sparse system; rows are (coeff-dict, rhs) pairs.

    Returns a dense solution list or None.  Used for the stacked
    intertwiner systems, whose rows touch few of the unknowns.
    """
    rhs_col = nvars
    basis = RrefBasis(field)
    for coeffs, rhs in rows:
        vec = dict(coeffs)
        if rhs != field.zero:
            vec[rhs_col] = field.neg(rhs)
        basis.insert(vec)
    if rhs_col in basis.pivots:
        return None
    x = [field.zero] * nvars
    for row in basis.rows:
        pivot = min(row)
        x[pivot] = field.neg(row.get(rhs_col, field.zero))
    for coeffs, rhs in rows:
        acc = field.zero
        for c, coef in coeffs.items():
            if x[c] != field.zero:
                acc = field.add(acc, field.mul(coef, x[c]))
        if acc != rhs:
            raise AssertionError("sparse solver produced an invalid solution")
    return x


# ---------------------------------------------------------------------------
# incremental sparse basis


class RrefBasis:
    """Row basis with span-membership queries and O(1) rollback.

    Coordinates are non-negative ints ordered ascending.  With
    track=True every row carries the linear combination of inserted
    generators (by tag) that produced it, enabling witness extraction.
    Over GF(2) rows are stored as bitmask ints.
    """

    def __init__(self, field: Field, track: bool = False, max_rows: int | None = None):
        self.field = field
        self.track = track
        self.max_rows = max_rows
        self._gf2 = field.characteristic == 2
        self._rows = []      # dict rows, or bitmask ints in GF(2) mode
        self._combos = []
        self._pivots = {}    # coordinate (or bit mask in GF(2) mode) -> row index
        self._journal = None

    @property
    def rank(self) -> int:
        return len(self._rows)

    @property
    def pivots(self):
        """Pivot coordinate -> row index (indices into internal storage)."""
        if not self._gf2:
            return dict(self._pivots)
        return {m.bit_length() - 1: i for m, i in self._pivots.items()}

    def has_pivot(self, coord: int) -> bool:
        key = (1 << coord) if self._gf2 else coord
        return key in self._pivots

    # -- checkpointing -----------------------------------------------------

    def checkpoint(self):
        self._journal = {"nrows": len(self._rows), "touched": {}}

    def rollback(self):
        j = self._journal
        if j is None:
            raise RuntimeError("no checkpoint to roll back to")
        del self._rows[j["nrows"]:]
        if self.track:
            del self._combos[j["nrows"]:]
        for idx, old in j["touched"].items():
            if idx < len(self._rows):
                self._rows[idx] = old[0]
                if self.track:
                    self._combos[idx] = old[1]
        self._pivots = {c: i for c, i in self._pivots.items() if i < j["nrows"]}
        self._journal = None

    def _touch(self, idx):
        j = self._journal
        if j is not None and idx < j["nrows"] and idx not in j["touched"]:
            j["touched"][idx] = (self._rows[idx],
                                 self._combos[idx] if self.track else None)

    # -- GF(2) bitmask path ------------------------------------------------

    def _reduce2(self, v, combo):
        pivots, rows, combos = self._pivots, self._rows, self._combos
        out = 0
        while v:
            low = v & -v
            idx = pivots.get(low)
            if idx is None:
                out |= low
                v ^= low
            else:
                v ^= rows[idx]
                if self.track:
                    combo ^= combos[idx]
        return out, combo

    # -- generic dict path (rows kept fully reduced) -----------------------

    def _reduce_dict(self, vec, combo):
        f, pivots, rows = self.field, self._pivots, self._rows
        zero = f.zero
        res = {c: v for c, v in vec.items() if v != zero}
        for c in [c for c in res if c in pivots]:
            coef = res.pop(c, None)
            if coef is None:
                continue
            idx = pivots[c]
            for rc, rv in rows[idx].items():
                if rc == c:
                    continue
                nv = f.sub(res.get(rc, zero), f.mul(coef, rv))
                if nv == zero:
                    res.pop(rc, None)
                else:
                    res[rc] = nv
            if self.track:
                for t, tv in self._combos[idx].items():
                    nv = f.sub(combo.get(t, zero), f.mul(coef, tv))
                    if nv == zero:
                        combo.pop(t, None)
                    else:
                        combo[t] = nv
        return res, combo

    # -- public operations -------------------------------------------------

    def _to_bits(self, vec) -> int:
        v = 0
        for c, val in vec.items():
            if self.field.elem(val) == 1:
                v |= 1 << c
        return v

    @staticmethod
    def _from_bits(v, one):
        row = {}
        while v:
            low = v & -v
            row[low.bit_length() - 1] = one
            v ^= low
        return row

    def reduce_bits(self, v: int, tag=None):
        """GF(2) fast path: residual and combo, both as bitmask ints."""
        combo0 = 0 if tag is None or not self.track else (1 << tag)
        return self._reduce2(v, combo0)

    def contains_bits(self, v: int) -> bool:
        return self._reduce2(v, 0)[0] == 0

    def insert_bits(self, v: int, tag=None) -> bool:
        """GF(2) fast path insert; returns True if the span grew."""
        res, combo = self.reduce_bits(v, tag)
        if not res:
            return False
        if self.max_rows is not None and len(self._rows) >= self.max_rows:
            raise ResourceGuardError(f"basis row cap {self.max_rows} exceeded")
        self._pivots[res & -res] = len(self._rows)
        self._rows.append(res)
        if self.track:
            self._combos.append(combo)
        return True

    def reduce(self, vec, tag=None):
        """Residual of vec against the basis, plus the generator combination
        (combo) such that vec == residual + sum(combo[g] * generator_g)."""
        if self._gf2:
            res, combo = self.reduce_bits(self._to_bits(vec), tag)
            return self._from_bits(res, self.field.one), combo
        combo0 = {} if tag is None or not self.track else {tag: self.field.one}
        res, combo = self._reduce_dict(vec, combo0)
        if tag is None and self.track:
            combo = {t: self.field.neg(v) for t, v in combo.items()}
        return res, combo

    def contains(self, vec) -> bool:
        res, _ = self.reduce(vec)
        return not res

    def insert(self, vec, tag=None) -> bool:
        """Insert vec; returns True if the span grew."""
        if self._gf2:
            return self.insert_bits(self._to_bits(vec), tag)
        res, combo = self.reduce(vec, tag)
        if not res:
            return False
        if self.max_rows is not None and len(self._rows) >= self.max_rows:
            raise ResourceGuardError(f"basis row cap {self.max_rows} exceeded")
        pivot = min(res)
        inv = self.field.inv(res[pivot])
        if inv != self.field.one:
            res = {c: self.field.mul(inv, v) for c, v in res.items()}
            if self.track:
                combo = {t: self.field.mul(inv, v) for t, v in combo.items()}
        # keep stored rows fully reduced: clear the new pivot everywhere
        f, zero = self.field, self.field.zero
        for idx, row in enumerate(self._rows):
            coef = row.get(pivot)
            if coef is None:
                continue
            self._touch(idx)
            new = dict(row)
            for rc, rv in res.items():
                nv = f.sub(new.get(rc, zero), f.mul(coef, rv))
                if nv == zero:
                    new.pop(rc, None)
                else:
                    new[rc] = nv
            self._rows[idx] = new
            if self.track:
                nc = dict(self._combos[idx])
                for t, tv in combo.items():
                    nv = f.sub(nc.get(t, zero), f.mul(coef, tv))
                    if nv == zero:
                        nc.pop(t, None)
                    else:
                        nc[t] = nv
                self._combos[idx] = nc
        self._pivots[pivot] = len(self._rows)
        self._rows.append(res)
        if self.track:
            self._combos.append(combo)
        return True

    @property
    def rows(self):
        """RREF view: lead coefficient 1 at the pivot, pivot columns zero
        in all other rows, pivots ascending in the column order."""
        if not self._gf2:
            order = sorted(range(len(self._rows)), key=lambda i: min(self._rows[i]))
            return [self._rows[i] for i in order]
        # back-substitute, largest pivot first, then emit as coordinate dicts
        clean = {}
        for pbit, idx in sorted(self._pivots.items(), key=lambda cv: -cv[0]):
            tail, out = self._rows[idx] ^ pbit, 0
            while tail:
                low = tail & -tail
                if low in clean:
                    tail ^= clean[low] | low
                else:
                    out |= low
                    tail ^= low
            clean[pbit] = out
        one = self.field.one
        result = []
        for pbit in sorted(clean):
            v = clean[pbit] | pbit
            row = {}
            while v:
                low = v & -v
                row[low.bit_length() - 1] = one
                v ^= low
            result.append(row)
        return result
