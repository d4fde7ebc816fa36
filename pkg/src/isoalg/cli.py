"""Command-line harness.

Commands: orbits, refine, refute, partition, cfi, compare.  All
structured output is JSON (stdout or --out); human-readable tables go to
stderr.  Exit codes: 0 success, 2 input error, 3 resource guard tripped.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .cfi import CfiError, CfiSpec, cfi_build, cfi_family, load_base
from .exactla import ResourceGuardError
from .field import Field, FieldError
from .graphcore import (GraphFormatError, TupleIndex, atomic_type_partition,
                        brute_force_orbits, load_graph, project_partition,
                        save_graph)
from .partition import compare_partitions, partition_doc
from .polycalc import ax_iso, calculus_equiv_partition, refute
from .refine import OperatorSpec, fixed_point

PARTITION_EMBED_LIMIT = 10_000


def _read(path: str) -> str:
    with open(path, encoding="utf-8") as fh:
        return fh.read()


def _emit(doc, out: str | None):
    text = json.dumps(doc, indent=2, sort_keys=True, default=str)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _field(char: int) -> Field:
    return Field(char)


def _parse_tuple_map(g, text: str):
    """"a:b,c:d" -> tuples (a,c), (b,d) of vertex ids."""
    left, right = [], []
    for token in text.split(","):
        token = token.strip()
        if ":" not in token:
            raise GraphFormatError(f"bad map entry {token!r}, expected u:v")
        a, b = token.split(":", 1)
        left.append(g.vertex_id(a.strip()))
        right.append(g.vertex_id(b.strip()))
    return tuple(left), tuple(right)


def _witness_doc(witness, vertex_names):
    if witness is None:
        return None
    def mon(m):
        return sorted([vertex_names[u], vertex_names[v]] for u, v in m)
    return [{"axiom": e["axiom"],
             "axiom_terms": [{"monomial": mon(m), "coefficient": str(c)}
                             for m, c in sorted(e["terms"].items(),
                                                key=lambda t: sorted(t[0]))],
             "multiplier": mon(e["multiplier"]),
             "coefficient": str(e["coefficient"])} for e in witness]


# ---------------------------------------------------------------------------
# simple commands


def cmd_orbits(args) -> int:
    g = load_graph(_read(args.input))
    p = brute_force_orbits(g, args.width, limit=args.limit)
    _emit(partition_doc(p, g.vertex_names), args.out)
    return 0


def cmd_refine(args) -> int:
    g = load_graph(_read(args.input))
    if args.combined:
        op = OperatorSpec("sol_combined", args.width, field=_field(args.char))
    elif args.operator == "counting":
        op = OperatorSpec("counting", args.width, args.r)
    else:
        op = OperatorSpec("sol", args.width, args.r, _field(args.char))
    p = fixed_point(op, atomic_type_partition(g, args.width))
    _emit(partition_doc(p, g.vertex_names), args.out)
    return 0


def cmd_refute(args) -> int:
    g = load_graph(_read(args.input))
    u, v = _parse_tuple_map(g, args.map)
    axioms = ax_iso(g, u, v, _field(args.char))
    res = refute(axioms, args.calculus, args.degree,
                 want_witness=args.calculus == "nc",
                 guard_monomials=args.guard_monomials,
                 guard_rows=args.guard_rows)
    _emit({"result": res.result, "degree": res.degree,
           "witness": _witness_doc(res.witness, g.vertex_names)}, args.out)
    return 0


def cmd_partition(args) -> int:
    g = load_graph(_read(args.input))
    p = calculus_equiv_partition(g, args.width, args.calculus, args.degree,
                                 _field(args.char),
                                 guard_monomials=args.guard_monomials,
                                 guard_rows=args.guard_rows)
    _emit(partition_doc(p, g.vertex_names), args.out)
    return 0


def cmd_cfi(args) -> int:
    vertices, edges = load_base(_read(args.base))
    if args.family:
        copies, union = cfi_family(vertices, edges, args.p)
        prefix = args.out_prefix or "cfi"
        for j, g in enumerate(copies):
            with open(f"{prefix}{j}.json", "w", encoding="utf-8") as fh:
                fh.write(save_graph(g) + "\n")
        with open(f"{prefix}_union.json", "w", encoding="utf-8") as fh:
            fh.write(save_graph(union) + "\n")
        print(f"wrote {len(copies)} copies and the union with prefix {prefix}",
              file=sys.stderr)
        return 0
    twists = {}
    if args.twist:
        for token in args.twist.split(","):
            e, t = token.strip().split(":", 1)
            twists[int(e.lstrip("e"))] = int(t)
    g = cfi_build(CfiSpec(vertices, edges, args.p, twists))
    text = save_graph(g)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


# ---------------------------------------------------------------------------
# comparison reports


@dataclass
class MethodResult:
    descriptor: dict
    partition: object = None    # LabelledPartition
    error: str | None = None

    @property
    def mid(self) -> str:
        return self.descriptor["id"]


def _method_plan(widths, degrees, chars):
    plan = []
    for k in widths:
        plan.append({"id": f"counting:k{k}", "kind": "counting", "width": k})
        for c in chars:
            if k >= 2:
                plan.append({"id": f"sol:k{k}:c{c}", "kind": "sol",
                             "width": k, "char": c})
            for d in degrees:
                for calc in ("nc", "mc", "pc"):
                    plan.append({"id": f"{calc}:k{k}:d{d}:c{c}",
                                 "kind": calc, "width": k, "degree": d,
                                 "char": c})
    return plan


def _run_method(g, desc, guard_monomials, guard_rows):
    kind, k = desc["kind"], desc["width"]
    try:
        if kind == "counting":
            p = fixed_point(OperatorSpec("counting", k, 1) if k > 1 else
                            OperatorSpec("counting", 2, 1),
                            atomic_type_partition(g, max(k, 2)))
            if k == 1:
                p = project_partition(p, 1)
        elif kind == "sol":
            p = fixed_point(OperatorSpec("sol_combined", k, field=Field(desc["char"])),
                            atomic_type_partition(g, k))
        else:
            p = calculus_equiv_partition(g, k, kind, desc["degree"],
                                         Field(desc["char"]),
                                         guard_monomials=guard_monomials,
                                         guard_rows=guard_rows)
        return MethodResult(desc, p)
    except ResourceGuardError as e:
        return MethodResult(desc, None, f"resource guard: {e}")


def _at_width(result: MethodResult, k: int):
    p = result.partition
    return p if p.k == k else project_partition(p, k)


def _least_witness_pair(fine, coarse):
    """Lexicographically least tuple pair separated by `fine` and merged
    by `coarse`, or None."""
    size = fine.colors.size
    for a in range(size):
        for b in range(a + 1, size):
            if fine.colors[a] != fine.colors[b] and coarse.colors[a] == coarse.colors[b]:
                return a, b
    return None


def cmd_compare(args) -> int:
    g = load_graph(_read(args.input))
    digest = hashlib.sha256(save_graph(g).encode()).hexdigest()
    widths = [int(x) for x in args.widths.split(",")]
    degrees = [int(x) for x in args.degrees.split(",")]
    chars = [int(x) for x in args.chars.split(",")]
    plan = _method_plan(widths, degrees, chars)
    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        results = list(pool.map(
            lambda d: _run_method(g, d, args.guard_monomials, args.guard_rows),
            plan))
    if g.n <= 8:
        for k in sorted(set(widths)):
            results.append(MethodResult(
                {"id": f"orbits:k{k}", "kind": "orbits", "width": k},
                brute_force_orbits(g, k)))

    ok = [r for r in results if r.partition is not None]
    matrix = {}
    witnesses = {}
    for i, r1 in enumerate(ok):
        for r2 in ok[i + 1:]:
            k = min(r1.descriptor["width"], r2.descriptor["width"])
            p1, p2 = _at_width(r1, k), _at_width(r2, k)
            rel = compare_partitions(p1, p2)
            matrix[f"{r1.mid}|{r2.mid}"] = rel
            tindex = TupleIndex(g.n, k)
            for fine, coarse, key in ((p1, p2, f"{r1.mid}>{r2.mid}"),
                                      (p2, p1, f"{r2.mid}>{r1.mid}")):
                pair = _least_witness_pair(fine, coarse)
                if pair is not None:
                    witnesses[key] = [
                        [g.vertex_names[x] for x in tindex.unrank(pair[0])],
                        [g.vertex_names[x] for x in tindex.unrank(pair[1])]]

    methods = []
    for r in results:
        entry = dict(r.descriptor)
        if r.partition is not None:
            entry["classes"] = r.partition.num_colors
            if r.partition.colors.size <= PARTITION_EMBED_LIMIT:
                entry["partition"] = partition_doc(r.partition, g.vertex_names)
        if r.error:
            entry["error"] = r.error
        methods.append(entry)
    report = {"graph_digest": digest, "methods": methods,
              "order_matrix": matrix, "witness_pairs": witnesses}
    for key in sorted(matrix):
        print(f"{key}: {matrix[key]}", file=sys.stderr)
    _emit(report, args.out)
    return 0


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="isoalg")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write JSON output to this file")
    common.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for independent cells")
    common.add_argument("--guard-monomials", type=int, default=None,
                        help="abort if the monomial universe exceeds this")
    common.add_argument("--guard-rows", type=int, default=None,
                        help="abort if a basis exceeds this many rows")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("orbits", parents=[common],
                       help="orbit partition of V^k (brute-force oracle)")
    p.add_argument("--input", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--limit", type=int, default=8)
    p.set_defaults(fn=cmd_orbits)

    p = sub.add_parser("refine", parents=[common],
                       help="fixed point of a refinement operator")
    p.add_argument("--input", required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--operator", choices=["counting", "sol"], default="counting")
    p.add_argument("--r", type=int, default=1)
    p.add_argument("--char", type=int, default=0)
    p.add_argument("--combined", action="store_true",
                   help="product of sol steps over all admissible r")
    p.set_defaults(fn=cmd_refine)

    p = sub.add_parser("refute", parents=[common],
                       help="degree-bounded refutation of a pinned map")
    p.add_argument("--input", required=True)
    p.add_argument("--calculus", choices=["nc", "mc", "pc"], required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--char", type=int, default=0)
    p.add_argument("--map", required=True,
                   help='pinned coordinates, e.g. "a:b,c:d" maps a to b and c to d')
    p.set_defaults(fn=cmd_refute)

    p = sub.add_parser("partition", parents=[common],
                       help="tuple partition induced by a proof system")
    p.add_argument("--input", required=True)
    p.add_argument("--calculus", choices=["nc", "mc", "pc"], required=True)
    p.add_argument("--width", type=int, required=True)
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--char", type=int, default=0)
    p.set_defaults(fn=cmd_partition)

    p = sub.add_parser("cfi", parents=[common],
                       help="generalized CFI instance generation")
    p.add_argument("--base", required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--twist", default="",
                   help='edge twists, e.g. "0:1,2:1" (edge index:amount)')
    p.add_argument("--family", action="store_true",
                   help="emit all p twist classes and their disjoint union")
    p.add_argument("--out-prefix", default=None)
    p.set_defaults(fn=cmd_cfi)

    p = sub.add_parser("compare", parents=[common],
                       help="side-by-side method comparison report")
    p.add_argument("--input", required=True)
    p.add_argument("--widths", default="2")
    p.add_argument("--degrees", default="2")
    p.add_argument("--chars", default="0")
    p.set_defaults(fn=cmd_compare)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ResourceGuardError as e:
        print(f"resource guard: {e}", file=sys.stderr)
        return 3
    except (GraphFormatError, CfiError, FieldError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
