"""Command-line interface: enumeration, algebra tables, and numerical reports.

All output is JSON with sorted keys and floats printed with 17 significant
digits, so identical configurations produce byte-identical reports.  Exit
codes: 0 when every configured tolerance holds, 1 on a tolerance violation,
2 on schema or precondition errors, 3 on IO errors.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .multiindex import (
    ExponentialFn,
    Flavor,
    MultiIndex,
    Nonlinearity,
    PolynomialFn,
    SinusoidFn,
    enumerate_populated,
    flavor_instance,
    t_instance,
)
from .prelie import GOIndex, table_to_json
from .roughpath import (
    Driver,
    TranslationSpec,
    build_signature,
    chen_defect,
    dyadic_pairs,
    extend_level,
    holder_report,
    named_driver,
    select_pairs,
    translate,
    translated_hierarchy_check,
)
from .trees import dictionary_check, enumerate_trees, expansion_check


# -- deterministic JSON --------------------------------------------------------


def render_json(obj: Any, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if not math.isfinite(value):
            raise ValueError("cannot serialize non-finite float")
        return format(value, ".17g")
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [
            f"{inner}{json.dumps(str(k))}: {render_json(v, indent + 1)}"
            for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))
        ]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        rows = [f"{inner}{render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(rows) + f"\n{pad}]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def emit(report: dict, out: str | None) -> None:
    text = render_json(report) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- configuration loading ------------------------------------------------------


@dataclass
class RunConfig:
    command: str
    labels: tuple[str, ...]
    levels: int
    grid: int
    quadrature: str
    pairs: str
    seed: int
    tol: float
    out: str | None


def _load_json(path: str) -> Any:
    return json.loads(Path(path).read_text())


def load_driver(path: str, grid: int) -> Driver:
    if path.endswith(".csv"):
        return Driver.from_csv(Path(path).read_text())
    config = _load_json(path)
    if not isinstance(config, dict) or not config:
        raise ValueError("driver config must map labels to closed forms")
    return named_driver(config, grid)


def load_nonlinearity(path: str) -> Nonlinearity:
    config = _load_json(path)
    kinds = {
        "poly": lambda spec: PolynomialFn(spec["coefficients"]),
        "sin": lambda spec: SinusoidFn(
            spec.get("amplitude", 1.0), spec.get("rate", 1.0), spec.get("phase", 0.0)
        ),
        "exp": lambda spec: ExponentialFn(spec.get("amplitude", 1.0), spec.get("rate", 1.0)),
    }
    functions = {}
    for label, spec in config.items():
        kind = spec.get("kind")
        if kind not in kinds:
            raise ValueError(f"unknown nonlinearity kind {kind!r}")
        functions[label] = kinds[kind](spec)
    return Nonlinearity(functions)


_QUAD = {"trap": "trapezoid", "trapezoid": "trapezoid", "simpson": "simpson"}


def _labels(args) -> list[str]:
    return [s.strip() for s in args.labels.split(",") if s.strip()]


def _pair_bases(pairs: Sequence[tuple[int, int]]) -> tuple[int, ...]:
    return tuple(sorted({0} | {s for s, _ in pairs}))


# -- commands --------------------------------------------------------------------


def cmd_enumerate(args) -> int:
    labels = _labels(args)
    if args.kind == "multiindices":
        items = enumerate_populated(labels, args.max_size)
        counts: dict[int, int] = {}
        for beta in items:
            counts[beta.length] = counts.get(beta.length, 0) + 1
        listing = [beta.to_json() for beta in items]
    else:
        trees = enumerate_trees(labels, args.max_size)
        counts = {}
        for tree in trees:
            counts[tree.node_count] = counts.get(tree.node_count, 0) + 1
        listing = [t.serialize() for t in trees]
    report = {
        "kind": args.kind,
        "labels": labels,
        "max_size": args.max_size,
        "counts": [counts.get(n, 0) for n in range(1, args.max_size + 1)],
        "items": listing,
    }
    emit(report, args.out)
    return 0


def cmd_tables(args) -> int:
    labels = _labels(args)
    if args.algebra == "tmulti":
        inst = t_instance(labels, args.degree)
        key_json = lambda beta: beta.to_json()  # noqa: E731
    else:
        inst = flavor_instance(labels, Flavor("r2"), args.degree + 1, complete=True)
        key_json = lambda r: r.to_json()  # noqa: E731
    rows = table_to_json(inst, args.degree, key_json)
    report = {"algebra": args.algebra, "degree": args.degree, "rows": rows}
    if args.audit:
        report["coassociative"] = _audit_coassociativity(inst, args.degree)
    emit(report, args.out)
    return 0 if report.get("coassociative", True) else 1


def _audit_coassociativity(inst, degree: int) -> bool:
    for index in inst.go_indices(degree):
        left: dict = {}
        right: dict = {}
        for i1, i2, c in inst.coproduct_table(index, degree):
            for a, b, c2 in inst.coproduct_table(i1, degree):
                key = (a, b, i2)
                left[key] = left.get(key, 0) + c * c2
            for a, b, c2 in inst.coproduct_table(i2, degree):
                key = (i1, a, b)
                right[key] = right.get(key, 0) + c * c2
        left = {k: v for k, v in left.items() if v}
        right = {k: v for k, v in right.items() if v}
        if left != right:
            return False
    return True


def _signature_rows(sig, pairs):
    rows = []
    for s, t in pairs:
        vec = sig.values_at(s, t)
        for i, beta in enumerate(sig.basis):
            rows.append(
                {
                    "s": float(sig.driver.times[s]),
                    "t": float(sig.driver.times[t]),
                    "beta": beta.to_json(),
                    "value": float(vec[i]),
                }
            )
    return rows


def cmd_signature(args) -> int:
    driver = load_driver(args.driver, args.grid)
    pairs = select_pairs(driver.grid_size, args.pairs, args.seed)
    bases = _pair_bases(pairs)
    sig = build_signature(driver, args.levels, _QUAD[args.quadrature], bases)
    report = {
        "levels": args.levels,
        "grid": driver.grid_size,
        "quadrature": _QUAD[args.quadrature],
        "values": _signature_rows(sig, pairs),
        "holder": {
            str(beta.to_json()): sup
            for beta, sup in holder_report(sig, args.alpha, pairs).items()
        },
    }
    emit(report, args.out)
    return 0


def _chen_triples(grid: int) -> list[tuple[int, int, int]]:
    nodes = sorted({grid * k // 8 for k in range(9)})
    return [
        (s, u, t)
        for i, s in enumerate(nodes)
        for j, u in enumerate(nodes[i + 1 :], i + 1)
        for t in nodes[j + 1 :]
    ]


def cmd_chen(args) -> int:
    driver = load_driver(args.driver, args.grid)
    triples = _chen_triples(driver.grid_size)
    bases = tuple(sorted({s for s, _, _ in triples} | {u for _, u, _ in triples}))
    sig = build_signature(driver, args.levels, _QUAD[args.quadrature], bases)
    per_level: dict[int, float] = {}
    for s, u, t in triples:
        for beta, value in chen_defect(sig, s, u, t).items():
            n = beta.length
            per_level[n] = max(per_level.get(n, 0.0), abs(value))
    worst = max(per_level.values(), default=0.0)
    report = {
        "levels": args.levels,
        "grid": driver.grid_size,
        "quadrature": _QUAD[args.quadrature],
        "max_defect": worst,
        "per_level": {str(n): v for n, v in sorted(per_level.items())},
        "tolerance": args.tol,
        "pass": worst <= args.tol,
    }
    emit(report, args.out)
    return 0 if report["pass"] else 1


def cmd_translate(args) -> int:
    driver = load_driver(args.driver, args.grid)
    spec = TranslationSpec.from_json(_load_json(args.spec))
    pairs = select_pairs(driver.grid_size, args.pairs, args.seed)
    bases = _pair_bases(pairs)
    sig = build_signature(driver, args.levels, _QUAD[args.quadrature], bases)
    moved = translate(sig, spec)
    defect = 0.0
    for s, u, t in _chen_triples(driver.grid_size):
        if s in moved.values and u in moved.values:
            defect = max(defect, max(abs(v) for v in chen_defect(moved, s, u, t).values()))
    hierarchy_gap = translated_hierarchy_check(
        driver, spec, args.levels, _QUAD[args.quadrature], (0,)
    )
    report = {
        "levels": args.levels,
        "grid": driver.grid_size,
        "spec": spec.to_json(),
        "values": _signature_rows(moved, pairs),
        "chen_defect": defect,
        "hierarchy_gap": hierarchy_gap,
        "tolerance": args.tol,
        "pass": defect <= args.tol and hierarchy_gap <= args.tol,
    }
    emit(report, args.out)
    return 0 if report["pass"] else 1


def cmd_dict(args) -> int:
    driver = load_driver(args.driver, args.grid)
    gap = dictionary_check(driver, args.levels, _QUAD[args.quadrature])
    report = {
        "levels": args.levels,
        "grid": driver.grid_size,
        "discrepancy": gap,
        "tolerance": args.tol,
        "pass": gap <= args.tol,
    }
    emit(report, args.out)
    return 0 if report["pass"] else 1


def cmd_expansion(args) -> int:
    driver = load_driver(args.driver, args.grid)
    nonlinearity = load_nonlinearity(args.nonlinearity)
    result = expansion_check(driver, nonlinearity, args.y0, args.levels)
    threshold = args.levels + 0.5
    orders = result["tree_orders"] + result["index_orders"]
    passed = bool(orders) and all(o >= threshold for o in orders)
    report = {
        "levels": args.levels,
        "grid": driver.grid_size,
        "y0": args.y0,
        "rows": result["rows"],
        "tree_orders": result["tree_orders"],
        "index_orders": result["index_orders"],
        "order_threshold": threshold,
        "pass": passed,
    }
    emit(report, args.out)
    return 0 if passed else 1


def cmd_extend(args) -> int:
    from .roughpath import ExtensionError

    driver = load_driver(args.driver, args.grid)
    low = build_signature(driver, args.levels, _QUAD[args.quadrature], (0,))
    direct = build_signature(driver, args.levels + 1, _QUAD[args.quadrature], (0,))
    targets = [b for b in direct.basis if b.length == args.levels + 1]
    pairs = [(0, driver.grid_size), (0, driver.grid_size // 2)]
    worst = 0.0
    rows = []
    failure = None
    for beta in targets:
        try:
            rebuilt = extend_level(low, beta, pairs, max_depth=args.depth)
        except ExtensionError as exc:
            failure = str(exc)
            break
        for (s, t), value in rebuilt.items():
            gap = abs(value - direct.value(s, t, beta))
            worst = max(worst, gap)
            rows.append(
                {
                    "beta": beta.to_json(),
                    "s": float(driver.times[s]),
                    "t": float(driver.times[t]),
                    "sewn": value,
                    "direct": direct.value(s, t, beta),
                    "gap": gap,
                }
            )
    report = {
        "levels": args.levels,
        "depth": args.depth,
        "grid": driver.grid_size,
        "rows": rows,
        "max_gap": worst,
        "tolerance": args.tol,
        "converged": failure is None,
        "pass": failure is None and worst <= args.tol,
    }
    if failure:
        report["error"] = failure
    emit(report, args.out)
    return 0 if report["pass"] else 1


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirp",
        description="multi-index rough path toolkit: exact algebra and numerical reports",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, driver=True):
        p.add_argument("--out", default=None, help="write the JSON report to this path")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--tol", type=float, default=1e-6)
        if driver:
            p.add_argument("--driver", required=True, help="driver CSV or closed-form JSON config")
            p.add_argument("--levels", type=int, default=3)
            p.add_argument("--grid", type=int, default=1024)
            p.add_argument("--quadrature", choices=sorted(_QUAD), default="trap")
            p.add_argument("--pairs", default="dyadic", help="dyadic | all | random:k")

    p = sub.add_parser("enumerate", help="list populated multi-indices or trees")
    p.add_argument("--kind", choices=["multiindices", "trees"], default="multiindices")
    p.add_argument("--labels", default="l")
    p.add_argument("--max-size", type=int, default=6, dest="max_size")
    common(p, driver=False)
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("tables", help="envelope product / coproduct structure constants")
    p.add_argument("--algebra", choices=["tmulti", "r2"], default="tmulti")
    p.add_argument("--labels", default="l")
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--audit", action="store_true", help="verify coassociativity")
    common(p, driver=False)
    p.set_defaults(fn=cmd_tables)

    p = sub.add_parser("signature", help="signature values over sampled pairs")
    common(p)
    p.add_argument("--alpha", type=float, default=1.0)
    p.set_defaults(fn=cmd_signature)

    p = sub.add_parser("chen", help="max Chen defect over dyadic triples")
    common(p)
    p.set_defaults(fn=cmd_chen)

    p = sub.add_parser("translate", help="translated signature and consistency checks")
    common(p)
    p.add_argument("--spec", required=True, help="translation spec JSON")
    p.set_defaults(fn=cmd_translate)

    p = sub.add_parser("dict", help="tree/multi-index dictionary discrepancy")
    common(p)
    p.set_defaults(fn=cmd_dict)

    p = sub.add_parser("expansion", help="local expansion remainder orders")
    common(p)
    p.add_argument("--nonlinearity", required=True, help="nonlinearity JSON config")
    p.add_argument("--y0", type=float, default=1.0)
    p.set_defaults(fn=cmd_expansion)

    p = sub.add_parser("extend", help="rebuild one extra level by sewing")
    common(p)
    p.add_argument("--depth", type=int, default=12)
    p.set_defaults(fn=cmd_extend)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ValueError, KeyError) as exc:
        print(f"error: invalid input: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
