"""Command-line front end.

Reports are fully deterministic: no timestamps, no absolute paths, stable
key order, so repeated runs on the same input are byte-identical. All
diagnostics go to stderr; the report goes to stdout or --out.

Exit codes: 0 ok, 1 unreadable or malformed input, 2 invalid model,
3 not identifiable, 4 no verified allocation, 5 oracle budget exceeded,
6 oracle disagreement.
"""

from __future__ import annotations

import argparse
import colorsys
import json
import sys
from typing import Any, Sequence

from dynetid.allocation import allocate
from dynetid.dual import DualModelSet, InvalidDualModelError, select_measurements, measurement_bounds
from dynetid.graph import max_vertex_disjoint_paths
from dynetid.identifiability import check_generic_identifiability, excitation_bounds
from dynetid.model import ExtendedGraph, ModelSet, build_extended_graph, extended_in_neighbors, validate
from dynetid.modelfile import ModelFileError, input_digest, parse_model
from dynetid.oracle import (
    BudgetExceeded,
    OracleBudget,
    brute_disjoint_paths,
    brute_min_covering,
)
from dynetid.pseudotree import Covering, algorithm1_merge

EXIT_OK = 0
EXIT_PARSE = 1
EXIT_INVALID = 2
EXIT_NOT_IDENTIFIABLE = 3
EXIT_UNSATISFIABLE = 4
EXIT_BUDGET = 5
EXIT_DISAGREEMENT = 6


# ---- report plumbing ----


def _render_text(value: Any, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(value, dict):
        for key, val in value.items():
            if isinstance(val, (dict, list)) and val:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_text(val, indent + 1))
            else:
                lines.append(f"{pad}{key}: {json.dumps(val)}")
    elif isinstance(value, list):
        for item in value:
            if isinstance(item, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_render_text(item, indent + 1))
            else:
                lines.append(f"{pad}- {json.dumps(item)}")
    else:
        lines.append(f"{pad}{json.dumps(value)}")
    return lines


def _emit(report: dict, args: argparse.Namespace) -> None:
    if args.format == "json":
        text = json.dumps(report, indent=2) + "\n"
    else:
        text = "\n".join(_render_text(report)) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load(args: argparse.Namespace) -> tuple[ModelSet, str]:
    with open(args.model, "rb") as fh:
        data = fh.read()
    return parse_model(data.decode("utf-8")), input_digest(data)


def _invalid_report(command: str, digest: str, violations: Sequence[str]) -> dict:
    return {
        "command": command,
        "input_digest": digest,
        "result": {"ok": False, "violations": list(violations)},
    }


# ---- DOT export ----


def _palette(n: int) -> list[str]:
    colors: list[str] = []
    seen: set[str] = set()
    for k in range(n):
        r, g, b = colorsys.hsv_to_rgb(k / n, 0.65, 0.85)
        color = "#{:02x}{:02x}{:02x}".format(round(r * 255), round(g * 255), round(b * 255))
        while color in seen:  # hue collisions after rounding
            color = "#{:06x}".format((int(color[1:], 16) + 1) % 0x1000000)
        seen.add(color)
        colors.append(color)
    return colors


def covering_to_dot(eg: ExtendedGraph, covering: Covering) -> str:
    lines = ["digraph covering {"]
    for v in eg.graph.sorted_vertices():
        if v in eg.noise_vertices:
            lines.append(f"  {v} [style=dashed];")
        else:
            lines.append(f"  {v};")
    colors = _palette(len(covering.trees))
    covered: set = set()
    for k, tree in enumerate(covering.trees):
        for a, b in sorted(tree.edges):
            lines.append(f'  {a} -> {b} [color="{colors[k]}"];')
        covered |= tree.edges
    for a, b in sorted(eg.graph.edges - covered):
        lines.append(f"  {a} -> {b} [style=dotted];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---- commands ----


def _cmd_validate(args: argparse.Namespace) -> int:
    m, digest = _load(args)
    report = validate(m)
    _emit(
        {
            "command": "validate",
            "input_digest": digest,
            "result": {"ok": report.ok, "violations": list(report.violations)},
        },
        args,
    )
    return EXIT_OK if report.ok else EXIT_INVALID


def _gate(command: str, args: argparse.Namespace) -> tuple[ModelSet, str] | int:
    m, digest = _load(args)
    report = validate(m)
    if not report.ok:
        _emit(_invalid_report(command, digest, report.violations), args)
        return EXIT_INVALID
    return m, digest


def _cmd_check(args: argparse.Namespace) -> int:
    gated = _gate("check", args)
    if isinstance(gated, int):
        return gated
    m, digest = gated
    rep = check_generic_identifiability(build_extended_graph(m))
    _emit(
        {
            "command": "check",
            "input_digest": digest,
            "result": {
                "identifiable": rep.identifiable,
                "per_vertex": [
                    {"vertex": c.vertex, "required": c.required, "achieved": c.achieved}
                    for c in rep.per_vertex
                ],
                "failing": list(rep.failing_vertices),
            },
        },
        args,
    )
    return EXIT_OK if rep.identifiable else EXIT_NOT_IDENTIFIABLE


def _covering_payload(covering: Covering) -> list[dict]:
    return [
        {
            "index": k,
            "roots": sorted(t.roots),
            "edges": [list(e) for e in sorted(t.edges)],
        }
        for k, t in enumerate(covering.trees, start=1)
    ]


def _cmd_cover(args: argparse.Namespace) -> int:
    gated = _gate("cover", args)
    if isinstance(gated, int):
        return gated
    m, digest = gated
    eg = build_extended_graph(m)
    if eg.parameterized_edges:
        covering, trace = algorithm1_merge(eg)
    else:
        covering, trace = Covering(trees=(), host=eg.graph, target_edges=frozenset()), []
    _emit(
        {
            "command": "cover",
            "input_digest": digest,
            "result": {
                "tree_count": len(covering.trees),
                "trace": [list(step) for step in trace],
                "trees": _covering_payload(covering),
            },
        },
        args,
    )
    if args.emit_dot:
        with open(args.emit_dot, "w", encoding="utf-8") as fh:
            fh.write(covering_to_dot(eg, covering))
    return EXIT_OK


def _cmd_allocate(args: argparse.Namespace) -> int:
    gated = _gate("allocate", args)
    if isinstance(gated, int):
        return gated
    m, digest = gated
    eg = build_extended_graph(m)
    result = allocate(m)
    lower, upper = excitation_bounds(eg, result.covering_used)
    payload = {
        "excited": list(result.excited),
        "pruned": list(result.pruned),
        "verified": result.verified,
        "bounds": {"lower": lower, "upper": upper},
        "tree_count": len(result.covering_used.trees),
    }
    if not result.verified:
        payload["reason"] = "no excitation set passed verification"
    _emit({"command": "allocate", "input_digest": digest, "result": payload}, args)
    return EXIT_OK if result.verified else EXIT_UNSATISFIABLE


def _cmd_allocate_measurements(args: argparse.Namespace) -> int:
    gated = _gate("allocate-measurements", args)
    if isinstance(gated, int):
        return gated
    m, digest = gated
    if m.p:
        _emit(
            _invalid_report(
                "allocate-measurements",
                digest,
                ["measurement selection requires a noise-free model (p = 0)"],
            ),
            args,
        )
        return EXIT_INVALID
    dual = DualModelSet(L=m.L, g_pattern=m.g_pattern)
    try:
        selection = select_measurements(dual)
    except InvalidDualModelError as exc:
        _emit(_invalid_report("allocate-measurements", digest, str(exc).split("; ")), args)
        return EXIT_INVALID
    lower, upper = measurement_bounds(dual, selection.reversed_covering)
    payload = {
        "measured": list(selection.measured),
        "pruned": list(selection.pruned),
        "verified": selection.verified,
        "bounds": {"lower": lower, "upper": upper},
        "anti_tree_count": len(selection.anti_trees),
    }
    if not selection.verified:
        payload["reason"] = "no measurement set passed verification"
    _emit(
        {"command": "allocate-measurements", "input_digest": digest, "result": payload},
        args,
    )
    return EXIT_OK if selection.verified else EXIT_UNSATISFIABLE


def _cmd_bounds(args: argparse.Namespace) -> int:
    gated = _gate("bounds", args)
    if isinstance(gated, int):
        return gated
    m, digest = gated
    eg = build_extended_graph(m)
    if eg.parameterized_edges:
        covering, _ = algorithm1_merge(eg)
    else:
        covering = Covering(trees=(), host=eg.graph, target_edges=frozenset())
    lower, upper = excitation_bounds(eg, covering)
    _emit(
        {
            "command": "bounds",
            "input_digest": digest,
            "result": {
                "lower": lower,
                "upper": upper,
                "covering_size": len(covering.trees),
                "noise_channels": eg.p,
            },
        },
        args,
    )
    return EXIT_OK


def _cmd_oracle_compare(args: argparse.Namespace) -> int:
    gated = _gate("oracle-compare", args)
    if isinstance(gated, int):
        return gated
    m, digest = gated
    eg = build_extended_graph(m)
    if args.budget < 1:
        print("error: --budget must be at least 1", file=sys.stderr)
        return EXIT_PARSE
    budget = OracleBudget(
        max_vertices=args.budget, max_edges=max(0, 2 * args.budget - 2)
    )
    try:
        if eg.parameterized_edges:
            covering, _ = algorithm1_merge(eg)
            heuristic_size = len(covering.trees)
        else:
            heuristic_size = 0
        kappa, _ = brute_min_covering(eg.graph, eg.parameterized_edges, budget)
        paths = []
        paths_agree = True
        for j in sorted(eg.internal):
            targets = extended_in_neighbors(eg, j)
            if targets:
                flow = max_vertex_disjoint_paths(eg.graph, eg.stimulated, targets)
                brute = brute_disjoint_paths(eg.graph, eg.stimulated, targets, budget)
            else:
                flow = brute = 0
            paths.append({"vertex": j, "flow": flow, "brute": brute})
            paths_agree = paths_agree and flow == brute
    except BudgetExceeded as exc:
        print(f"oracle budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    identifiable_flow = all(
        row["flow"] == len(extended_in_neighbors(eg, row["vertex"])) for row in paths
    )
    identifiable_brute = all(
        row["brute"] == len(extended_in_neighbors(eg, row["vertex"])) for row in paths
    )
    agree = paths_agree and identifiable_flow == identifiable_brute and kappa <= heuristic_size
    _emit(
        {
            "command": "oracle-compare",
            "input_digest": digest,
            "result": {
                "kappa_oracle": kappa,
                "heuristic_size": heuristic_size,
                "paths": paths,
                "paths_agree": paths_agree,
                "identifiable_flow": identifiable_flow,
                "identifiable_brute": identifiable_brute,
                "agree": agree,
            },
        },
        args,
    )
    return EXIT_OK if agree else EXIT_DISAGREEMENT


# ---- entry point ----


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dynetid",
        description="Identifiability analysis and signal allocation for dynamic networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("model", help="path to a model JSON file")
        p.add_argument("--format", choices=("json", "text"), default="json")
        p.add_argument("--out", default=None, help="write the report here instead of stdout")

    common(sub.add_parser("validate", help="check the structural rules"))
    common(sub.add_parser("check", help="decide generic identifiability"))
    cover = sub.add_parser("cover", help="compute a disjoint pseudotree covering")
    common(cover)
    cover.add_argument("--emit-dot", default=None, help="also write a colored DOT file")
    common(sub.add_parser("allocate", help="choose excitation vertices"))
    common(sub.add_parser("allocate-measurements", help="choose measured vertices (p = 0)"))
    common(sub.add_parser("bounds", help="report excitation count bounds"))
    oracle = sub.add_parser("oracle-compare", help="cross-check against brute force")
    common(oracle)
    oracle.add_argument("--budget", type=int, default=7, help="max vertices for the oracle")
    return parser


_HANDLERS = {
    "validate": _cmd_validate,
    "check": _cmd_check,
    "cover": _cmd_cover,
    "allocate": _cmd_allocate,
    "allocate-measurements": _cmd_allocate_measurements,
    "bounds": _cmd_bounds,
    "oracle-compare": _cmd_oracle_compare,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (OSError, ModelFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    raise SystemExit(main())
