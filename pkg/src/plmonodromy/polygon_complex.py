"""Polygon complexes and the boundary map from polygon chains to edge chains.

A polygon copy Q_g (polygon Q on the sheet reached by g) has boundary
sum(sign * edge[reduce(g * offset)]) over the edges of Q.  ``reduce`` drops the
exponent of the generator that circles the edge's own singular line, because loops
around that line do not move the edge.  Offsets default to e; they exist for
complexes whose polygon base paths disagree across an edge.

Edge chain text: ``a^1[e] + b^1[g2*g3] - 2*c^1[g1]``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .group_ring import GeneratorSet, GroupElem, ParseError, _term_key, parse_group
from .omega_linalg import OmegaVector

__all__ = [
    "Incidence",
    "Edge",
    "PolygonComplex",
    "Chain1",
    "EdgeTransformTable",
    "ComplexError",
    "coset_reduce",
    "boundary",
    "is_cycle",
    "edge_transform",
    "parse_chain1",
]

_EDGE_LABEL_RE = re.compile(r"[A-Za-z][A-Za-z0-9_^~']*\Z")

Exps = tuple[int, ...]


class ComplexError(ValueError):
    """Invalid complex data, unknown edges or polygons."""


@dataclass(frozen=True)
class Incidence:
    polygon: str
    sign: int
    offset: Exps = ()

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ComplexError(f"incidence sign must be +1 or -1, got {self.sign}")


@dataclass(frozen=True)
class Edge:
    label: str
    component: int
    incidences: tuple[Incidence, ...]


@dataclass(frozen=True)
class PolygonComplex:
    """Polygons, edges on singular lines, and crossing vertices (metadata only)."""

    gens: GeneratorSet
    polygons: tuple[str, ...]
    edges: tuple[Edge, ...]
    vertices: tuple[tuple[int, int], ...] = ()
    _edge_index: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if len(set(self.polygons)) != len(self.polygons):
            raise ComplexError("duplicate polygon labels")
        index = {}
        for edge in self.edges:
            if not _EDGE_LABEL_RE.match(edge.label):
                raise ComplexError(f"invalid edge label {edge.label!r}")
            if edge.label in index:
                raise ComplexError(f"duplicate edge {edge.label!r}")
            if not 0 <= edge.component < len(self.gens):
                raise ComplexError(f"edge {edge.label}: component index out of range")
            if not 1 <= len(edge.incidences) <= 2:
                raise ComplexError(f"edge {edge.label} must border one or two polygons")
            for inc in edge.incidences:
                if inc.polygon not in self.polygons:
                    raise ComplexError(f"edge {edge.label}: unknown polygon {inc.polygon!r}")
                if inc.offset and len(inc.offset) != len(self.gens):
                    raise ComplexError(f"edge {edge.label}: offset has the wrong length")
            if len(edge.incidences) == 2:
                a, b = edge.incidences
                if a.polygon == b.polygon:
                    raise ComplexError(f"edge {edge.label} borders {a.polygon} twice")
                if a.sign == b.sign:
                    raise ComplexError(
                        f"edge {edge.label}: the two bordering polygons must induce opposite orientations"
                    )
            index[edge.label] = edge
        for i, j in self.vertices:
            if not (0 <= i < len(self.gens) and 0 <= j < len(self.gens)) or i == j:
                raise ComplexError(f"invalid vertex ({i}, {j})")
        self._edge_index.update(index)

    def edge(self, label: str) -> Edge:
        try:
            return self._edge_index[label]
        except KeyError:
            raise ComplexError(f"unknown edge {label!r}") from None

    def edges_of(self, polygon: str) -> list[tuple[Edge, Incidence]]:
        if polygon not in self.polygons:
            raise ComplexError(f"unknown polygon {polygon!r}")
        return [(e, inc) for e in self.edges for inc in e.incidences if inc.polygon == polygon]


def coset_reduce(complex_: PolygonComplex, edge: str | Edge, g: GroupElem) -> GroupElem:
    """Zero the exponent of the edge's own generator."""
    e = complex_.edge(edge) if isinstance(edge, str) else edge
    exps = list(g.exponents)
    exps[e.component] = 0
    return GroupElem(g.gens, exps)


class Chain1:
    """Finite integer combination of edge copies edge[g] with g coset-reduced."""

    __slots__ = ("gens", "_terms")

    def __init__(self, gens: GeneratorSet, terms: Mapping[tuple[str, Exps], int] | None = None):
        acc: dict[tuple[str, Exps], int] = {}
        for (label, exps), c in (terms or {}).items():
            key = (label, gens.reduce(exps))
            acc[key] = acc.get(key, 0) + c
        self.gens = gens
        self._terms = tuple(sorted(((k, c) for k, c in acc.items() if c), key=_chain_key))

    @property
    def terms(self) -> tuple[tuple[tuple[str, Exps], int], ...]:
        return self._terms

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Chain1):
            return NotImplemented
        return self.gens == other.gens and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.gens, self._terms))

    def __add__(self, other: Chain1) -> Chain1:
        acc = dict(self._terms)
        for k, c in other._terms:
            acc[k] = acc.get(k, 0) + c
        return Chain1(self.gens, acc)

    def __neg__(self) -> Chain1:
        return Chain1(self.gens, {k: -c for k, c in self._terms})

    def __sub__(self, other: Chain1) -> Chain1:
        return self + (-other)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for i, ((label, exps), c) in enumerate(self._terms):
            idx = str(GroupElem(self.gens, exps))
            body = f"{label}[{idx}]" if abs(c) == 1 else f"{abs(c)}*{label}[{idx}]"
            if i == 0:
                out.append(body if c > 0 else f"-{body}")
            else:
                out.append(("+ " if c > 0 else "- ") + body)
        return " ".join(out)

    def __repr__(self) -> str:
        return f"Chain1({str(self)!r})"


def _chain_key(item):
    (label, exps), _ = item
    return (label, _term_key(exps))


_CHAIN_TERM_RE = re.compile(
    r"\s*(?P<sign>[-+])?\s*(?:(?P<coef>\d+)\s*\*\s*)?(?P<label>[A-Za-z][A-Za-z0-9_^~']*)\[(?P<index>[^\]]*)\]\s*"
)


def parse_chain1(gens: GeneratorSet, text: str, complex_: PolygonComplex | None = None) -> Chain1:
    """Parse ``a^1[e] + b^1[g2*g3]``.  With a complex given, indices are coset-reduced."""
    text = text.strip()
    if text == "0":
        return Chain1(gens)
    pos = 0
    terms: dict[tuple[str, Exps], int] = {}
    first = True
    while pos < len(text):
        m = _CHAIN_TERM_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse edge chain at column {pos + 1}: {text[pos:]!r}")
        if not first and not m.group("sign"):
            raise ParseError(f"missing '+' or '-' before term at column {pos + 1}")
        first = False
        coeff = int(m.group("coef") or 1) * (-1 if m.group("sign") == "-" else 1)
        g = parse_group(gens, m.group("index"))
        label = m.group("label")
        if complex_ is not None:
            g = coset_reduce(complex_, label, g)
        key = (label, g.exponents)
        terms[key] = terms.get(key, 0) + coeff
        pos = m.end()
    return Chain1(gens, terms)


def boundary(complex_: PolygonComplex, w: OmegaVector) -> Chain1:
    """Boundary of a polygon chain: linear extension of the per-polygon edge lists."""
    if w.gens != complex_.gens:
        raise ComplexError("generator sets differ")
    unknown = set(w.labels) - set(complex_.polygons)
    if unknown:
        raise ComplexError(f"labels {sorted(unknown)} are not polygons of this complex")
    acc: dict[tuple[str, Exps], int] = {}
    for label, coeff in zip(w.labels, w.entries):
        if not coeff:
            continue
        for edge, inc in complex_.edges_of(label):
            c = edge.component
            for exps, k in coeff.terms:
                idx = list(exps)
                if inc.offset:
                    idx = [x + y for x, y in zip(idx, inc.offset)]
                idx[c] = 0
                key = (edge.label, tuple(idx))
                acc[key] = acc.get(key, 0) + inc.sign * k
    return Chain1(complex_.gens, acc)


def is_cycle(complex_: PolygonComplex, w: OmegaVector) -> bool:
    return boundary(complex_, w).is_zero()


@dataclass(frozen=True)
class EdgeTransformTable:
    """Images of the basis copies edge[e] under a loop.

    Images of edge[g] follow by multiplying every index by g and reducing in the
    target complex, which may differ from the source (jumps map edges to new edges).
    """

    source: PolygonComplex
    target: PolygonComplex
    images: Mapping[str, Chain1]

    def image(self, label: str, g: Exps) -> Chain1:
        try:
            img = self.images[label]
        except KeyError:
            raise ComplexError(f"edge {label!r} is missing from the transform table") from None
        acc: dict[tuple[str, Exps], int] = {}
        for (tl, exps), c in img.terms:
            edge = self.target.edge(tl)
            idx = [x + y for x, y in zip(exps, g)]
            idx[edge.component] = 0
            key = (tl, tuple(idx))
            acc[key] = acc.get(key, 0) + c
        return Chain1(self.target.gens, acc)


def edge_transform(rules: EdgeTransformTable, b: Chain1) -> Chain1:
    """Linear extension of an edge table to an edge chain."""
    out = Chain1(rules.target.gens)
    for (label, exps), c in b.terms:
        img = rules.image(label, exps)
        if c != 1:
            img = Chain1(img.gens, {k: c * v for k, v in img.terms})
        out = out + img
    return out


def build_complex(
    gens: GeneratorSet,
    polygons: Sequence[str],
    edges: Iterable[tuple[str, str, Sequence[tuple[str, int]]]],
    vertices: Iterable[tuple[str, str]] = (),
) -> PolygonComplex:
    """Convenience constructor from (label, generator name, [(polygon, sign), ...]) triples."""
    built = []
    for label, comp, incs in edges:
        built.append(Edge(label, gens.index(comp), tuple(Incidence(p, s) for p, s in incs)))
    verts = tuple((gens.index(a), gens.index(b)) for a, b in vertices)
    return PolygonComplex(gens, tuple(polygons), tuple(built), verts)
