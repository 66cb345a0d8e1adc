"""Command-line front end: ``plmono``.

Exit codes: 0 on success or when every checked identity holds, 1 when a check
fails, 2 for usage, parse and lookup errors.  Structured output is JSON with
sorted keys, one document per invocation.
"""

from __future__ import annotations

import argparse
import json
import re
import sys
from pathlib import Path
from typing import Sequence

from .group_ring import GroupElem, ParseError, RingError
from .omega_linalg import LinalgError, OmegaMatrix, OmegaVector, parse_vector, vec_mat_mul
from .polygon_complex import ComplexError, boundary
from .scenario_library import (
    Scenario,
    ScenarioError,
    ScenarioRegistry,
    _split_sections,
    golden_checksum,
)
from .verify import (
    CheckReport,
    VerifyError,
    check_identity,
    evaluate_matrix,
    expand_indices,
    pham_omega,
    recover_intersection_indices,
    run_suite,
    variation,
    vanishing_polygon,
)

PROG = "plmono"

USAGE_ERRORS = (ScenarioError, ParseError, LinalgError, RingError, ComplexError, VerifyError)


class CheckFailed(Exception):
    """Raised to turn a failed check into exit code 1 after output is written."""


def _emit(args, pretty: str, structured: object) -> None:
    if args.format == "structured":
        print(json.dumps(structured, sort_keys=True, indent=2))
    else:
        print(pretty)


def _scenario(args) -> Scenario:
    return ScenarioRegistry(args.scenario_path).get(args.scenario)


def _matrix(scenario: Scenario, word: str) -> OmegaMatrix:
    if not word.strip():
        return scenario.identity()
    return evaluate_matrix(scenario, word)


def _vector(scenario: Scenario, text: str, labels: Sequence[str]) -> OmegaVector:
    """A vector literal, or the name of a golden vector of the scenario."""
    if text.strip() in scenario.golden_vectors:
        v = scenario.golden_vectors[text.strip()]
        if tuple(labels) != v.labels:
            raise LinalgError(f"vector {text.strip()} lives on {' '.join(v.labels)}, not {' '.join(labels)}")
        return v
    return parse_vector(scenario.gens, labels, text)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_scenario_list(args) -> int:
    reg = ScenarioRegistry(args.scenario_path)
    rows = list(reg.names())
    width = max(len(n) for n, _ in rows)
    _emit(
        args,
        "\n".join(f"{n.ljust(width)}  {src}" for n, src in rows),
        [{"name": n, "source": src} for n, src in rows],
    )
    return 0


def _edge_line(edge, gens) -> str:
    incs = []
    for inc in edge.incidences:
        text = f"{inc.polygon}:{'+' if inc.sign > 0 else '-'}"
        if inc.offset and any(inc.offset):
            text += f"@{GroupElem(gens, inc.offset)}"
        incs.append(text)
    return f"{edge.label} {gens.names[edge.component]} " + " ".join(incs)


def cmd_scenario_show(args) -> int:
    s = _scenario(args)
    gens_text = " ".join(
        n if o is None else f"{n} (order {o})" for n, o in zip(s.gens.names, s.gens.orders)
    )
    lines = [
        f"scenario {s.name}",
        f"description: {s.description}",
        f"generators ({len(s.gens)}): {gens_text}",
        f"polygons ({len(s.labels)}): {' '.join(s.labels)}",
    ]
    complexes = [("edges", s.complex)]
    if s.primed_complex is not None:
        complexes.append(("edges of the primed basis", s.primed_complex))
    if not s.has_edges:
        lines.append("edges: none recorded")
    else:
        for title, cx in complexes:
            lines.append(f"{title}:")
            lines.extend("  " + _edge_line(e, s.gens) for e in cx.edges)
    lines.append("loops:")
    lines.extend(f"  {name}: {loop.describe()}" for name, loop in s.loops.items())
    lines.append("golden matrices: " + (" ".join(s.golden_matrices) or "none"))
    lines.append("golden vectors: " + (" ".join(s.golden_vectors) or "none"))
    if s.identities:
        lines.append("identities:")
        lines.extend(f"  {n}: {e}" for n, e, _ in s.identities)
    if s.folds:
        lines.append("folds: " + " ".join(s.folds))
    structured = {
        "name": s.name,
        "description": s.description,
        "generators": [{"name": n, "order": o} for n, o in zip(s.gens.names, s.gens.orders)],
        "polygons": list(s.labels),
        "edges": [_edge_line(e, s.gens) for e in s.complex.edges],
        "primed_edges": [_edge_line(e, s.gens) for e in s.primed_complex.edges] if s.primed_complex else [],
        "loops": {n: l.describe() for n, l in s.loops.items()},
        "golden_matrices": {n: m.to_structured() for n, m in s.golden_matrices.items()},
        "golden_vectors": {n: v.to_structured() for n, v in s.golden_vectors.items()},
        "identities": {n: e for n, e, _ in s.identities},
        "folds": sorted(s.folds),
    }
    _emit(args, "\n".join(lines), structured)
    return 0


def cmd_matrix(args) -> int:
    s = _scenario(args)
    T = _matrix(s, args.word)
    _emit(args, str(T), T.to_structured())
    return 0


def cmd_apply(args) -> int:
    s = _scenario(args)
    T = _matrix(s, args.word)
    w = _vector(s, args.vector, T.row_labels)
    image = vec_mat_mul(w, T)
    structured = {"vector": w.to_structured(), "image": image.to_structured()}
    lines = [f"image:     {image}"]
    if T.row_labels == T.col_labels:
        var = variation(w, T)
        structured["variation"] = var.to_structured()
        lines.append(f"variation: {var}")
    else:
        structured["variation"] = None
        lines.append(f"variation: undefined (the loop maps {' '.join(T.row_labels)} to {' '.join(T.col_labels)})")
    _emit(args, "\n".join(lines), structured)
    return 0


def cmd_boundary(args) -> int:
    s = _scenario(args)
    if not s.has_edges:
        raise ScenarioError(f"scenario {s.name} carries no edge data")
    if args.primed:
        if s.primed_complex is None:
            raise ScenarioError(f"scenario {s.name} has no primed basis")
        cx = s.primed_complex
    else:
        cx = s.complex
    w = _vector(s, args.vector, cx.polygons)
    b = boundary(cx, w)
    verdict = "cycle" if b.is_zero() else "not a cycle"
    structured = {
        "boundary": str(b),
        "cycle": b.is_zero(),
        "terms": [{"edge": l, "index": str(GroupElem(s.gens, e)), "coefficient": c} for (l, e), c in b.terms],
    }
    _emit(args, f"{b} ({verdict})", structured)
    return 0


def cmd_indices(args) -> int:
    s = _scenario(args)
    T = s.matrix(args.loop)
    w = _vector(s, args.vector, T.row_labels)
    try:
        indices = recover_intersection_indices(w, s, args.loop)
    except VerifyError as exc:
        print(f"{PROG}: check failed: {exc}", file=sys.stderr)
        raise CheckFailed from None
    omega = pham_omega(s, args.loop)
    polygon = vanishing_polygon(s, args.loop)
    order = sorted(indices, key=lambda g: (sum(map(abs, g.exponents)), [(-abs(x), x < 0) for x in g.exponents]))
    lines = [f"vanishing polygon: {polygon}", f"omega: {omega}"]
    if order:
        lines += [f"  {g}: {indices[g]}" for g in order]
    else:
        lines.append("  all indices are zero")
    lines.append(f"re-expansion: {expand_indices(indices, omega)}")
    structured = {
        "polygon": polygon,
        "omega": str(omega),
        "indices": {str(g): indices[g] for g in order},
    }
    _emit(args, "\n".join(lines), structured)
    return 0


def cmd_verify(args) -> int:
    s = _scenario(args)
    if not args.identity and not args.suite:
        raise ParseError("give an identity expression or --suite")
    reports: list[CheckReport] = []
    for i, expr in enumerate(args.identity, start=1):
        reports.append(check_identity(expr, s, name=f"arg{i}" if len(args.identity) > 1 else "identity"))
    if args.suite:
        reports.extend(run_suite(s))
    failed = [r for r in reports if not r.passed]
    pretty = "\n".join(r.pretty() for r in reports)
    pretty += f"\n{len(reports)} checks, {len(failed)} failed"
    _emit(
        args,
        pretty,
        {"scenario": s.name, "checks": [r.to_structured() for r in reports], "failed": len(failed)},
    )
    if failed:
        raise CheckFailed
    return 0


def cmd_checksum(args) -> int:
    path = Path(args.file)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    _, sections = _split_sections(text, str(path))
    digest = golden_checksum([ln.text for ln in sections.get("golden", [])])
    if args.write:
        new, count = re.subn(r"^checksum[ \t].*$", f"checksum {digest}", text, count=1, flags=re.M)
        if not count:
            new, count = re.subn(r"^(scenario[ \t].*)$", rf"\1\nchecksum {digest}", text, count=1, flags=re.M)
        if not count:
            raise ScenarioError(f"{path}: no 'scenario NAME' header to attach the checksum to")
        path.write_text(new, encoding="utf-8")
    _emit(args, digest, {"file": str(path), "checksum": digest})
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subcommand's unset flag from overwriting one given before it
    common.add_argument(
        "--scenario-path",
        metavar="DIR",
        default=argparse.SUPPRESS,
        help="directory of user *.scn files (shadow built-ins)",
    )
    common.add_argument("--format", choices=("pretty", "structured"), default=argparse.SUPPRESS)

    p = argparse.ArgumentParser(
        prog=PROG,
        description="Exact monodromy matrices over group rings for polygon complexes.",
        parents=[common],
    )
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    sc = sub.add_parser("scenario", help="list or show scenarios", parents=[common])
    scsub = sc.add_subparsers(dest="action", required=True, metavar="ACTION")
    scsub.add_parser("list", help="list built-in and user scenarios", parents=[common]).set_defaults(
        func=cmd_scenario_list
    )
    show = scsub.add_parser("show", help="print polygons, edges, loops and golden data", parents=[common])
    show.add_argument("scenario")
    show.set_defaults(func=cmd_scenario_show)

    m = sub.add_parser("matrix", help="matrix of a loop word or expression", parents=[common])
    m.add_argument("scenario")
    m.add_argument("word", help="e.g. 'lplus l0 lminus' or 't1p inv(tA)'; '' is the identity")
    m.set_defaults(func=cmd_matrix)

    a = sub.add_parser("apply", help="transport a vector along a loop word", parents=[common])
    a.add_argument("scenario")
    a.add_argument("vector", help="'(x1, ..., xk)', 'A: x; B: y', or a golden vector name")
    a.add_argument("word")
    a.set_defaults(func=cmd_apply)

    b = sub.add_parser("boundary", help="boundary of a polygon chain", parents=[common])
    b.add_argument("scenario")
    b.add_argument("vector")
    b.add_argument("--primed", action="store_true", help="use the primed basis reached by a jump")
    b.set_defaults(func=cmd_boundary)

    ix = sub.add_parser("indices", help="recover intersection indices from a variation", parents=[common])
    ix.add_argument("scenario")
    ix.add_argument("vector")
    ix.add_argument("loop")
    ix.set_defaults(func=cmd_indices)

    v = sub.add_parser("verify", help="check identities", parents=[common])
    v.add_argument("scenario")
    v.add_argument("identity", nargs="*", help="e.g. 'I + t1pt*t2pt == t1pt + t2pt'")
    v.add_argument("--suite", action="store_true", help="run every check recorded in the scenario")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("checksum", help="golden-section checksum of a scenario file", parents=[common])
    c.add_argument("file")
    c.add_argument("--write", action="store_true", help="store the checksum in the file header")
    c.set_defaults(func=cmd_checksum)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.scenario_path = getattr(args, "scenario_path", None)
    args.format = getattr(args, "format", "pretty")
    try:
        return args.func(args)
    except CheckFailed:
        return 1
    except USAGE_ERRORS as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
