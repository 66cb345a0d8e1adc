"""Scenario files: polygon complexes, loops, golden matrices and identities.

A scenario file is line oriented.  ``#`` starts a comment line.  Header lines come
first, then bracketed sections in any order (each at most once)::

    scenario NAME
    description free text
    checksum SHA256-HEX          (of the [golden] section; optional in user files)

    [generators]                 one per line: NAME  or  NAME order N
    [polygons]                   labels separated by spaces (may span lines)
    [edges]                      (optional) LABEL GENERATOR POLY:SIGN[@OFFSET] [POLY:SIGN[@OFFSET]]
    [primed-edges]               same, for the basis Q' reached by a jump (labels A', B', ...)
    [vertices]                   GENERATOR GENERATOR
    [loops]                      NAME KIND [primed] [roles=S:P,...] [gens=G:W,...] [twists=P:W,...]
                                 NAME golden MATRIX-NAME
                                 NAME word WORD...
                                 NAME symmetric LOOP perm=P:Q,... [gens=G:W,...] [twists=P:W,...]
    [edge-maps]                  LOOP EDGE -> CHAIN
    [golden]                     matrix NAME / rows / end      vector NAME = (x1, ..., xk)
    [identities]                 NAME: EXPRESSION
    [folds]                      fold NAME folded-loop=LOOP ... end (see ``_parse_fold``)

SIGN is ``+`` or ``-``.  KIND is one of circle, biangle, triangle, jump_plus,
jump_minus.  Omitted roles mean the identity placement (slot X to polygon X).
Every error message names the file and line.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterator, Mapping, Sequence

from .elementary_transforms import (
    EmbedError,
    FoldMap,
    LoopSpec,
    LoopWord,
    compose,
    embed,
    parse_word,
    primed,
)
from .group_ring import GeneratorSet, ParseError, RingError, RingHom, parse_group, parse_ring
from .omega_linalg import (
    LinalgError,
    OmegaMatrix,
    OmegaVector,
    diag_conjugate,
    mat_identity,
    mat_specialize,
    parse_matrix,
    parse_vector,
)
from .polygon_complex import (
    ComplexError,
    Edge,
    EdgeTransformTable,
    Incidence,
    PolygonComplex,
    parse_chain1,
)

__all__ = [
    "Scenario",
    "ScenarioError",
    "LoopDef",
    "Relabeling",
    "BUILTIN_NAMES",
    "builtin",
    "list_builtins",
    "load_scenario",
    "parse_scenario",
    "golden_checksum",
    "derive_symmetric",
    "ScenarioRegistry",
]

BUILTIN_NAMES = (
    "triangle7",
    "biangle5",
    "circle2",
    "cross4",
    "jump7",
    "parabola8",
    "circle_two_lines8",
)

SECTIONS = (
    "generators",
    "polygons",
    "edges",
    "primed-edges",
    "vertices",
    "loops",
    "edge-maps",
    "golden",
    "identities",
    "folds",
)


class ScenarioError(ValueError):
    """Malformed scenario file or unknown scenario/loop name."""


@dataclass(frozen=True)
class Relabeling:
    """Symmetry of a configuration: polygon permutation, generator map, and base-path twists."""

    perm: Mapping[str, str]
    gen_map: Mapping[str, str] = field(default_factory=dict)
    twists: Mapping[str, str] = field(default_factory=dict)


@dataclass(frozen=True)
class LoopDef:
    name: str
    kind: str  # "embed", "golden", "word", "symmetric"
    line: int
    spec: LoopSpec | None = None
    ref: str = ""
    word: LoopWord | None = None
    relabeling: Relabeling | None = None

    def describe(self) -> str:
        if self.kind == "embed":
            s = self.spec
            parts = [s.kind + (" primed" if s.on_primed else "")]
            parts.append("roles=" + ",".join(f"{k}:{v}" for k, v in s.roles.items()))
            if s.gen_roles:
                parts.append("gens=" + ",".join(f"{k}:{v}" for k, v in s.gen_roles.items()))
            if s.twists:
                parts.append("twists=" + ",".join(f"{k}:{v}" for k, v in s.twists.items()))
            return " ".join(parts)
        if self.kind == "golden":
            return f"golden {self.ref}"
        if self.kind == "word":
            return f"word {self.word}"
        r = self.relabeling
        parts = [f"symmetric {self.ref}", "perm=" + ",".join(f"{k}:{v}" for k, v in r.perm.items())]
        if r.gen_map:
            parts.append("gens=" + ",".join(f"{k}:{v}" for k, v in r.gen_map.items()))
        if r.twists:
            parts.append("twists=" + ",".join(f"{k}:{v}" for k, v in r.twists.items()))
        return " ".join(parts)


@dataclass
class Scenario:
    name: str
    description: str
    gens: GeneratorSet
    complex: PolygonComplex
    primed_complex: PolygonComplex | None
    loops: dict[str, LoopDef]
    golden_matrices: dict[str, OmegaMatrix]
    golden_vectors: dict[str, OmegaVector]
    identities: list[tuple[str, str, int]]
    edge_map_text: dict[str, dict[str, tuple[str, int]]]
    folds: dict[str, FoldMap]
    source: str = "<memory>"
    checksum: str | None = None
    has_edges: bool = True
    _cache: dict[str, OmegaMatrix] = field(default_factory=dict, repr=False)

    @property
    def labels(self) -> tuple[str, ...]:
        return self.complex.polygons

    def identity(self, labels: Sequence[str] | None = None) -> OmegaMatrix:
        return mat_identity(self.gens, labels or self.labels)

    def names(self) -> list[str]:
        return list(self.loops) + [n for n in self.golden_matrices if n not in self.loops]

    def matrix(self, name: str) -> OmegaMatrix:
        """Matrix of a loop or golden entry, built lazily and cached."""
        if name in self._cache:
            return self._cache[name]
        if name in self.loops:
            M = self._build_loop(self.loops[name], set())
        elif name in self.golden_matrices:
            M = self.golden_matrices[name]
        else:
            raise ScenarioError(f"scenario {self.name}: unknown loop or matrix {name!r}")
        self._cache[name] = M
        return M

    def __getitem__(self, name: str) -> OmegaMatrix:
        return self.matrix(name)

    def _build_loop(self, loop: LoopDef, visiting: set[str]) -> OmegaMatrix:
        if loop.name in self._cache:
            return self._cache[loop.name]
        if loop.name in visiting:
            raise ScenarioError(f"{self.source}:{loop.line}: loop {loop.name} refers to itself")
        visiting = visiting | {loop.name}

        def resolve(n: str) -> OmegaMatrix:
            if n in self.loops:
                M = self._build_loop(self.loops[n], visiting)
                self._cache[n] = M
                return M
            if n in self.golden_matrices:
                return self.golden_matrices[n]
            raise ScenarioError(f"{self.source}:{loop.line}: unknown loop {n!r}")

        try:
            if loop.kind == "embed":
                return embed(loop.spec, self.gens, self.labels)
            if loop.kind == "golden":
                return resolve(loop.ref)
            if loop.kind == "word":
                return compose(loop.word, resolve, self.identity())
            if loop.kind == "symmetric":
                return derive_symmetric(self, loop.ref, loop.relabeling, resolve(loop.ref))
        except (EmbedError, LinalgError, RingError, ParseError) as exc:
            raise ScenarioError(f"{self.source}:{loop.line}: loop {loop.name}: {exc}") from None
        raise ScenarioError(f"{self.source}:{loop.line}: unknown loop kind {loop.kind}")

    def loop_spec(self, name: str) -> LoopSpec:
        loop = self.loops.get(name)
        if loop is None:
            raise ScenarioError(f"scenario {self.name}: unknown loop {name!r}")
        if loop.kind == "golden" and loop.ref in self.loops:
            return self.loop_spec(loop.ref)
        if loop.kind != "embed":
            raise ScenarioError(f"loop {name} is not an elementary template placement ({loop.describe()})")
        return loop.spec

    def complex_for(self, labels: Sequence[str]) -> PolygonComplex:
        if not self.has_edges:
            raise ScenarioError(f"scenario {self.name} carries no edge data")
        labels = tuple(labels)
        if labels == self.complex.polygons:
            return self.complex
        if self.primed_complex is not None and labels == self.primed_complex.polygons:
            return self.primed_complex
        raise ScenarioError(f"scenario {self.name} has no complex with polygons {' '.join(labels)}")

    def edge_table(self, loop: str) -> EdgeTransformTable:
        """Edge transform table of a loop; the source and target complexes follow the loop's labels."""
        if loop not in self.edge_map_text:
            raise ScenarioError(f"scenario {self.name} has no edge map for loop {loop!r}")
        M = self.matrix(loop)
        src = self.complex_for(M.row_labels)
        dst = self.complex_for(M.col_labels)
        images = {}
        for edge, (text, line) in self.edge_map_text[loop].items():
            try:
                src.edge(edge)
                images[edge] = parse_chain1(self.gens, text, dst)
            except (ComplexError, ParseError, RingError) as exc:
                raise ScenarioError(f"{self.source}:{line}: {exc}") from None
        return EdgeTransformTable(src, dst, images)

    def parse_vector(self, text: str, labels: Sequence[str] | None = None) -> OmegaVector:
        return parse_vector(self.gens, labels or self.labels, text)


def derive_symmetric(
    scenario: Scenario, loop_name: str, relabeling: Relabeling, matrix: OmegaMatrix | None = None
) -> OmegaMatrix:
    """Matrix of the loop related to ``loop_name`` by a symmetry of the configuration.

    Entry (n, l) of the source moves to (perm n, perm l) with generators mapped by
    gen_map, then the twists d re-express the result as D^-1·R·D, the same
    convention ``embed`` uses.  Primed labels follow their unprimed polygon.
    """
    T = matrix if matrix is not None else scenario.matrix(loop_name)
    labels = scenario.labels
    perm = dict(relabeling.perm)
    for l in labels:
        perm.setdefault(l, l)
    if set(perm) != set(labels) or sorted(perm.values()) != sorted(labels):
        raise ScenarioError(f"relabeling is not a permutation of {' '.join(labels)}")
    try:
        h = RingHom.by_name(scenario.gens, scenario.gens, relabeling.gen_map)
        twist = {l: parse_group(scenario.gens, t) for l, t in relabeling.twists.items()}
    except (ParseError, RingError) as exc:
        raise ScenarioError(f"relabeling: {exc}") from None
    for l in twist:
        if l not in labels:
            raise ScenarioError(f"twist for unknown polygon {l!r}")

    def move(label: str) -> str:
        base = label.rstrip("'")
        return perm[base] + label[len(base):]

    H = mat_specialize(h, T)
    rpos = {move(l): i for i, l in enumerate(H.row_labels)}
    cpos = {move(l): j for j, l in enumerate(H.col_labels)}
    rows = [[H.rows[rpos[r]][cpos[c]] for c in T.col_labels] for r in T.row_labels]
    R = OmegaMatrix(scenario.gens, T.row_labels, rows, T.col_labels)
    ident = scenario.gens.identity()
    d_rows = [twist.get(l.rstrip("'"), ident).inverse() for l in T.row_labels]
    d_cols = [twist.get(l.rstrip("'"), ident).inverse() for l in T.col_labels]
    return diag_conjugate(R, d_rows, d_cols)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


@dataclass
class _Line:
    number: int
    text: str


def golden_checksum(lines: Sequence[str]) -> str:
    """SHA-256 of the [golden] section: stripped, non-empty, non-comment lines joined by newlines."""
    body = "\n".join(l.strip() for l in lines if l.strip() and not l.strip().startswith("#"))
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


def _split_sections(text: str, source: str) -> tuple[list[_Line], dict[str, list[_Line]]]:
    header: list[_Line] = []
    sections: dict[str, list[_Line]] = {}
    current: list[_Line] | None = None
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        m = re.fullmatch(r"\[([a-z-]+)\]", line)
        if m:
            name = m.group(1)
            if name not in SECTIONS:
                raise ScenarioError(f"{source}:{number}: unknown section [{name}]")
            if name in sections:
                raise ScenarioError(f"{source}:{number}: section [{name}] appears twice")
            current = sections[name] = []
            continue
        if line.startswith("["):
            raise ScenarioError(f"{source}:{number}: malformed section header {line!r}")
        (header if current is None else current).append(_Line(number, line))
    return header, sections


def _kv_pairs(value: str, where: str) -> dict[str, str]:
    out = {}
    for item in value.split(","):
        k, sep, v = item.partition(":")
        if not sep or not k.strip() or not v.strip():
            raise ScenarioError(f"{where}: expected KEY:VALUE pairs, got {item!r}")
        if k.strip() in out:
            raise ScenarioError(f"{where}: key {k.strip()!r} given twice")
        out[k.strip()] = v.strip()
    return out


def _options(tokens: Sequence[str], allowed: Sequence[str], where: str) -> tuple[list[str], dict[str, dict[str, str]]]:
    flags, opts = [], {}
    for tok in tokens:
        key, sep, value = tok.partition("=")
        if sep:
            if key not in allowed:
                raise ScenarioError(f"{where}: unknown option {key!r}")
            opts[key] = _kv_pairs(value, where)
        else:
            flags.append(tok)
    return flags, opts


def _parse_generators(lines: list[_Line], source: str) -> GeneratorSet:
    names, orders = [], []
    for ln in lines:
        parts = ln.text.split()
        if len(parts) == 1:
            names.append(parts[0])
            orders.append(None)
        elif len(parts) == 3 and parts[1] == "order" and parts[2].isdigit():
            names.append(parts[0])
            orders.append(int(parts[2]))
        else:
            raise ScenarioError(f"{source}:{ln.number}: expected 'NAME' or 'NAME order N'")
    try:
        return GeneratorSet(names, orders)
    except RingError as exc:
        raise ScenarioError(f"{source}:{lines[0].number if lines else 0}: {exc}") from None


_INCIDENCE_RE = re.compile(r"(?P<poly>[A-Za-z][A-Za-z0-9_']*):(?P<sign>[-+])(?:@(?P<offset>\S+))?\Z")


def _parse_edges(lines: list[_Line], gens: GeneratorSet, polygons: tuple[str, ...], source: str) -> PolygonComplex:
    edges = []
    for ln in lines:
        parts = ln.text.split()
        where = f"{source}:{ln.number}"
        if len(parts) < 3:
            raise ScenarioError(f"{where}: expected 'EDGE GENERATOR POLY:SIGN [POLY:SIGN]'")
        label, comp, *incs = parts
        if comp not in gens.names:
            raise ScenarioError(f"{where}: unknown generator {comp!r}")
        built = []
        for inc in incs:
            m = _INCIDENCE_RE.match(inc)
            if not m:
                raise ScenarioError(f"{where}: bad incidence {inc!r}; expected POLY:+ or POLY:-[@OFFSET]")
            offset = ()
            if m.group("offset"):
                try:
                    offset = parse_group(gens, m.group("offset")).exponents
                except (ParseError, RingError) as exc:
                    raise ScenarioError(f"{where}: {exc}") from None
            built.append(Incidence(m.group("poly"), 1 if m.group("sign") == "+" else -1, offset))
        edges.append(Edge(label, gens.index(comp), tuple(built)))
    try:
        return PolygonComplex(gens, polygons, tuple(edges))
    except ComplexError as exc:
        raise ScenarioError(f"{source}:{lines[0].number if lines else 0}: {exc}") from None


def _parse_loops(lines: list[_Line], source: str) -> dict[str, LoopDef]:
    loops: dict[str, LoopDef] = {}
    for ln in lines:
        where = f"{source}:{ln.number}"
        parts = ln.text.split()
        if len(parts) < 2:
            raise ScenarioError(f"{where}: expected 'NAME KIND ...'")
        name, kind, *rest = parts
        if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name) or name == "I" or name == "inv":
            raise ScenarioError(f"{where}: invalid loop name {name!r}")
        if name in loops:
            raise ScenarioError(f"{where}: loop {name} defined twice")
        try:
            if kind == "golden":
                if len(rest) != 1:
                    raise ScenarioError(f"{where}: expected 'NAME golden MATRIX'")
                loops[name] = LoopDef(name, "golden", ln.number, ref=rest[0])
            elif kind == "word":
                loops[name] = LoopDef(name, "word", ln.number, word=parse_word(" ".join(rest)))
            elif kind == "symmetric":
                if not rest:
                    raise ScenarioError(f"{where}: expected 'NAME symmetric LOOP perm=...'")
                flags, opts = _options(rest[1:], ("perm", "gens", "twists"), where)
                if flags:
                    raise ScenarioError(f"{where}: unexpected {' '.join(flags)}")
                if "perm" not in opts:
                    raise ScenarioError(f"{where}: symmetric loop needs perm=...")
                rel = Relabeling(opts["perm"], opts.get("gens", {}), opts.get("twists", {}))
                loops[name] = LoopDef(name, "symmetric", ln.number, ref=rest[0], relabeling=rel)
            else:
                flags, opts = _options(rest, ("roles", "gens", "twists"), where)
                if flags not in ([], ["primed"]):
                    raise ScenarioError(f"{where}: unexpected {' '.join(flags)}")
                roles = opts.get("roles")
                if roles is None:
                    from .elementary_transforms import template

                    try:
                        slots = template(kind).row_labels
                    except EmbedError as exc:
                        raise ScenarioError(f"{where}: {exc}") from None
                    roles = {s.rstrip("'"): s.rstrip("'") for s in slots}
                spec = LoopSpec(kind, roles, opts.get("gens", {}), opts.get("twists", {}), bool(flags))
                loops[name] = LoopDef(name, "embed", ln.number, spec=spec)
        except (EmbedError, ParseError) as exc:
            raise ScenarioError(f"{where}: {exc}") from None
    return loops


def _parse_golden(
    lines: list[_Line], gens: GeneratorSet, labels: tuple[str, ...], source: str
) -> tuple[dict[str, OmegaMatrix], dict[str, OmegaVector]]:
    matrices: dict[str, OmegaMatrix] = {}
    vectors: dict[str, OmegaVector] = {}
    i = 0
    while i < len(lines):
        ln = lines[i]
        where = f"{source}:{ln.number}"
        parts = ln.text.split(None, 1)
        if parts[0] == "matrix" and len(parts) == 2:
            name = parts[1].strip()
            body: list[_Line] = []
            i += 1
            while i < len(lines) and lines[i].text != "end":
                body.append(lines[i])
                i += 1
            if i == len(lines):
                raise ScenarioError(f"{where}: matrix {name} has no 'end'")
            if name in matrices or name in vectors:
                raise ScenarioError(f"{where}: golden entry {name} defined twice")
            try:
                M = _parse_matrix_lines(gens, body, source)
            except ParseError as exc:
                raise ScenarioError(str(exc)) from None
            for side in (M.row_labels, M.col_labels):
                if side not in (labels, primed(labels)):
                    raise ScenarioError(f"{where}: matrix {name} labels {' '.join(side)} are not the scenario polygons")
            matrices[name] = M
        elif parts[0] == "vector" and len(parts) == 2:
            name, sep, value = parts[1].partition("=")
            name = name.strip()
            if not sep:
                raise ScenarioError(f"{where}: expected 'vector NAME = (...)'")
            if name in matrices or name in vectors:
                raise ScenarioError(f"{where}: golden entry {name} defined twice")
            try:
                vectors[name] = parse_vector(gens, labels, value)
            except (ParseError, LinalgError, RingError) as exc:
                raise ScenarioError(f"{where}: {exc}") from None
        else:
            raise ScenarioError(f"{where}: expected 'matrix NAME' or 'vector NAME = (...)'")
        i += 1
    return matrices, vectors


def _parse_matrix_lines(gens: GeneratorSet, body: list[_Line], source: str) -> OmegaMatrix:
    # parse the cells row by row first so that errors carry the file line number
    for ln in body:
        if ln.text.startswith("columns:"):
            continue
        _, sep, cells = ln.text.partition(":")
        if not sep:
            raise ParseError(f"{source}:{ln.number}: expected 'LABEL: entry; entry; ...'")
        try:
            for cell in cells.split(";"):
                parse_ring(gens, cell)
        except ParseError as exc:
            raise ParseError(f"{source}:{ln.number}: {exc}") from None
    try:
        return parse_matrix(gens, [ln.text for ln in body])
    except ParseError as exc:
        first = body[0].number if body else 0
        raise ParseError(f"{source}:{first}: {exc}") from None


def _parse_fold(
    lines: list[_Line], source: str, folded_gens: GeneratorSet, folded_labels: tuple[str, ...]
) -> dict[str, FoldMap]:
    """Fold blocks::

        fold NAME folded-loop=LOOP
        generator NAME [order N]     (repeated; the free ones must equal the scenario generators)
        polygons LABEL...
        loop KIND roles=... [gens=...] [twists=...]
        image POLYGON = LABEL: x; LABEL: y
        end
    """
    folds: dict[str, FoldMap] = {}
    i = 0
    while i < len(lines):
        head = lines[i]
        where = f"{source}:{head.number}"
        m = re.fullmatch(r"fold\s+(\S+)\s+folded-loop=(\S+)", head.text)
        if not m:
            raise ScenarioError(f"{where}: expected 'fold NAME folded-loop=LOOP'")
        name, folded_loop = m.groups()
        gen_lines: list[_Line] = []
        polygons: tuple[str, ...] | None = None
        spec: LoopSpec | None = None
        image_text: dict[str, tuple[str, int]] = {}
        i += 1
        while i < len(lines) and lines[i].text != "end":
            ln = lines[i]
            w = f"{source}:{ln.number}"
            key, _, rest = ln.text.partition(" ")
            if key == "generator":
                gen_lines.append(_Line(ln.number, rest))
            elif key == "polygons":
                polygons = tuple(rest.split())
            elif key == "loop":
                parts = rest.split()
                if not parts:
                    raise ScenarioError(f"{w}: expected 'loop KIND roles=...'")
                flags, opts = _options(parts[1:], ("roles", "gens", "twists"), w)
                if flags or "roles" not in opts:
                    raise ScenarioError(f"{w}: fold loops need explicit roles=... and no flags")
                try:
                    spec = LoopSpec(parts[0], opts["roles"], opts.get("gens", {}), opts.get("twists", {}))
                except EmbedError as exc:
                    raise ScenarioError(f"{w}: {exc}") from None
            elif key == "image":
                target, sep, value = rest.partition("=")
                if not sep:
                    raise ScenarioError(f"{w}: expected 'image POLYGON = LABEL: x; ...'")
                image_text[target.strip()] = (value.strip(), ln.number)
            else:
                raise ScenarioError(f"{w}: unknown fold line {key!r}")
            i += 1
        if i == len(lines):
            raise ScenarioError(f"{where}: fold {name} has no 'end'")
        if polygons is None or spec is None or not gen_lines:
            raise ScenarioError(f"{where}: fold {name} needs generator, polygons and loop lines")
        ugens = _parse_generators(gen_lines, source)
        images = {}
        for target, (value, number) in image_text.items():
            if target not in folded_labels:
                raise ScenarioError(f"{source}:{number}: {target!r} is not a polygon of this scenario")
            try:
                images[target] = parse_vector(ugens, polygons, value)
            except (ParseError, LinalgError, RingError) as exc:
                raise ScenarioError(f"{source}:{number}: {exc}") from None
        try:
            folds[name] = FoldMap(name, folded_gens, folded_labels, ugens, polygons, images, spec, folded_loop)
        except EmbedError as exc:
            raise ScenarioError(f"{where}: {exc}") from None
        i += 1
    return folds


def parse_scenario(text: str, source: str = "<string>", require_checksum: bool = False) -> Scenario:
    header, sections = _split_sections(text, source)
    name = description = None
    checksum = None
    for ln in header:
        key, _, value = ln.text.partition(" ")
        value = value.strip()
        if key == "scenario" and value:
            name = value
        elif key == "description":
            description = value
        elif key == "checksum" and value:
            checksum = (value, ln.number)
        else:
            raise ScenarioError(f"{source}:{ln.number}: unexpected header line {ln.text!r}")
    if name is None:
        raise ScenarioError(f"{source}:1: missing 'scenario NAME' header")
    for required in ("generators", "polygons"):
        if required not in sections:
            raise ScenarioError(f"{source}: missing section [{required}]")

    golden_lines = sections.get("golden", [])
    actual = golden_checksum([ln.text for ln in golden_lines])
    if checksum is not None and checksum[0] != actual:
        raise ScenarioError(
            f"{source}:{checksum[1]}: golden checksum mismatch (file says {checksum[0][:12]}..., data hashes to {actual[:12]}...)"
        )
    if checksum is None and require_checksum:
        raise ScenarioError(f"{source}: built-in scenario without a golden checksum")

    gens = _parse_generators(sections["generators"], source)
    polygons = tuple(tok for ln in sections["polygons"] for tok in ln.text.split())
    complex_ = _parse_edges(sections.get("edges", []), gens, polygons, source)
    primed_complex = None
    if "primed-edges" in sections:
        primed_complex = _parse_edges(sections["primed-edges"], gens, primed(polygons), source)
    vertices = []
    for ln in sections.get("vertices", []):
        parts = ln.text.split()
        if len(parts) != 2 or any(p not in gens.names for p in parts):
            raise ScenarioError(f"{source}:{ln.number}: expected two generator names")
        vertices.append((gens.index(parts[0]), gens.index(parts[1])))
    if vertices:
        try:
            complex_ = PolygonComplex(gens, complex_.polygons, complex_.edges, tuple(vertices))
        except ComplexError as exc:
            raise ScenarioError(f"{source}: {exc}") from None

    loops = _parse_loops(sections.get("loops", []), source)
    matrices, vectors = _parse_golden(golden_lines, gens, polygons, source)

    edge_maps: dict[str, dict[str, tuple[str, int]]] = {}
    for ln in sections.get("edge-maps", []):
        m = re.fullmatch(r"(\S+)\s+(\S+)\s*->\s*(.+)", ln.text)
        if not m:
            raise ScenarioError(f"{source}:{ln.number}: expected 'LOOP EDGE -> CHAIN'")
        loop, edge, chain = m.groups()
        if loop not in loops:
            raise ScenarioError(f"{source}:{ln.number}: unknown loop {loop!r}")
        table = edge_maps.setdefault(loop, {})
        if edge in table:
            raise ScenarioError(f"{source}:{ln.number}: edge {edge} mapped twice for {loop}")
        table[edge] = (chain, ln.number)

    identities = []
    seen = set()
    for ln in sections.get("identities", []):
        ident, sep, expr = ln.text.partition(":")
        ident = ident.strip()
        if not sep or not re.fullmatch(r"[A-Za-z0-9_\-]+", ident):
            raise ScenarioError(f"{source}:{ln.number}: expected 'NAME: EXPRESSION'")
        if ident in seen:
            raise ScenarioError(f"{source}:{ln.number}: identity {ident} listed twice")
        seen.add(ident)
        identities.append((ident, expr.strip(), ln.number))

    folds = _parse_fold(sections.get("folds", []), source, gens, polygons)

    scenario = Scenario(
        name=name,
        description=description or "",
        gens=gens,
        complex=complex_,
        primed_complex=primed_complex,
        loops=loops,
        golden_matrices=matrices,
        golden_vectors=vectors,
        identities=identities,
        edge_map_text=edge_maps,
        folds=folds,
        source=source,
        checksum=checksum[0] if checksum else None,
        has_edges="edges" in sections,
    )
    for loop in loops.values():
        refs = []
        if loop.kind in ("golden", "symmetric"):
            refs = [loop.ref]
        elif loop.kind == "word":
            refs = [n for n, _ in loop.word.letters]
        for ref in refs:
            if ref not in loops and ref not in matrices:
                raise ScenarioError(f"{source}:{loop.line}: loop {loop.name} refers to unknown {ref!r}")
    for fold in folds.values():
        if fold.folded_loop not in loops and fold.folded_loop not in matrices:
            raise ScenarioError(f"{source}: fold {fold.name} refers to unknown loop {fold.folded_loop!r}")
    return scenario


def load_scenario(path: str | Path) -> Scenario:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read {path}: {exc.strerror}") from None
    return parse_scenario(text, str(path))


# ---------------------------------------------------------------------------
# Built-ins and lookup
# ---------------------------------------------------------------------------


_BUILTIN_CACHE: dict[str, Scenario] = {}


def list_builtins() -> list[str]:
    return list(BUILTIN_NAMES)


def builtin_text(name: str) -> str:
    if name not in BUILTIN_NAMES:
        raise ScenarioError(f"unknown scenario {name!r}; built-ins are {', '.join(BUILTIN_NAMES)}")
    return resources.files(__package__).joinpath("scenarios").joinpath(f"{name}.scn").read_text(encoding="utf-8")


def builtin(name: str) -> Scenario:
    """Built-in scenario by name.  Parsed once; loop matrices are cached on the scenario."""
    if name not in _BUILTIN_CACHE:
        scenario = parse_scenario(builtin_text(name), f"{name}.scn", require_checksum=True)
        if scenario.name != name:
            raise ScenarioError(f"{name}.scn declares scenario {scenario.name!r}")
        _BUILTIN_CACHE[name] = scenario
    return _BUILTIN_CACHE[name]


class ScenarioRegistry:
    """Built-ins plus user files (``*.scn``) from an optional directory.  User files shadow built-ins."""

    def __init__(self, scenario_path: str | Path | None = None):
        self.user: dict[str, Path] = {}
        if scenario_path is not None:
            root = Path(scenario_path)
            if not root.is_dir():
                raise ScenarioError(f"scenario path {root} is not a directory")
            for path in sorted(root.glob("*.scn")):
                self.user[path.stem] = path
        self._loaded: dict[str, Scenario] = {}

    def names(self) -> Iterator[tuple[str, str]]:
        for name in BUILTIN_NAMES:
            if name not in self.user:
                yield name, "builtin"
        for name, path in self.user.items():
            yield name, str(path)

    def get(self, name: str) -> Scenario:
        if name in self.user:
            if name not in self._loaded:
                scenario = load_scenario(self.user[name])
                if scenario.name != name:
                    raise ScenarioError(f"{self.user[name]} declares scenario {scenario.name!r}, expected {name!r}")
                self._loaded[name] = scenario
            return self._loaded[name]
        return builtin(name)
