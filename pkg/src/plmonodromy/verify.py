"""Variations, intersection-index recovery, and checks of matrix identities.

Identity expressions compare two matrix expressions built from loop names::

    l2 * l3 * inv(l1) * inv(l3) == I
    I + t1pt * t2pt == t1pt + t2pt
    l3 * l1 != l1 * l3

Operators: ``+``, binary and unary ``-``, ``*`` or juxtaposition for products,
``inv(...)``, parentheses, integer scalars, and ``I``.  ``I`` and integers are
scalar multiples of the identity and take the labels of whatever they meet.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence, Union

from .elementary_transforms import (
    ELEMENTARY_KINDS,
    TEMPLATE_GENS,
    VANISHING_SLOT,
    _parse_elem,
    fold_reproduce,
    template_generator_count,
)
from .group_ring import GroupElem, ParseError, RingElem, RingError
from .omega_linalg import (
    LinalgError,
    OmegaMatrix,
    OmegaVector,
    first_difference,
    mat_add,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_sub,
    vec_mat_mul,
    vec_sub,
)
from .polygon_complex import boundary, edge_transform
from .scenario_library import Scenario, ScenarioError

__all__ = [
    "VerifyError",
    "CheckReport",
    "variation",
    "divide_by_one_minus",
    "pham_omega",
    "pham_cycle",
    "vanishing_polygon",
    "recover_intersection_indices",
    "expand_indices",
    "parse_identity",
    "evaluate",
    "check_identity",
    "check_edge_commutation",
    "check_fold",
    "run_suite",
]


class VerifyError(ValueError):
    """A check could not be carried out (as opposed to a check that fails)."""


# ---------------------------------------------------------------------------
# Variation and intersection indices
# ---------------------------------------------------------------------------


def variation(w: OmegaVector, T: OmegaMatrix) -> OmegaVector:
    """w·T − w."""
    if T.row_labels != T.col_labels:
        raise LinalgError("a variation needs a loop that maps the basis to itself")
    return vec_sub(vec_mat_mul(w, T), w)


def divide_by_one_minus(x: RingElem, g: GroupElem) -> RingElem:
    """Exact quotient q with (e − g)·q = x.

    x_h = q_h − q_{h·g^-1}, so along each chain h·g^k the coefficients of q are the
    partial sums of those of x.  The terms are peeled off in increasing order along
    a free coordinate of g.  A nonzero remainder raises ``RingError``.
    """
    gens = x.gens
    free = [i for i, (k, o) in enumerate(zip(g.exponents, gens.orders)) if k and o is None]
    if not free:
        raise RingError(f"cannot divide by e - {g}: {g} has finite order")
    i = free[0]
    sign = 1 if g.exponents[i] > 0 else -1

    def pos(exps):
        return sign * exps[i]

    remaining = dict(x.terms)
    if not remaining:
        return RingElem.zero(gens)
    limit = max(pos(h) for h in remaining)
    quotient: dict[tuple[int, ...], int] = {}
    while remaining:
        h = min(remaining, key=lambda k: (pos(k), k))
        if pos(h) > limit:
            raise RingError(f"not divisible by e - {g}")
        c = remaining.pop(h)
        quotient[h] = quotient.get(h, 0) + c
        hg = gens.reduce(tuple(a + b for a, b in zip(h, g.exponents)))
        remaining[hg] = remaining.get(hg, 0) + c
        if remaining[hg] == 0:
            del remaining[hg]
    return RingElem(gens, quotient)


def _role_generators(scenario: Scenario, loop: str) -> list[GroupElem]:
    spec = scenario.loop_spec(loop)
    if spec.kind not in ELEMENTARY_KINDS:
        raise VerifyError(f"loop {loop} is a {spec.kind}; indices need a circle, biangle or triangle")
    count = template_generator_count(spec.kind)
    return [_parse_elem(scenario.gens, spec.gen_roles.get(n, n)) for n in TEMPLATE_GENS.names[:count]]


def pham_omega(scenario: Scenario, loop: str) -> RingElem:
    """Product of (e − γ_j) over the singular components bounding the vanishing polygon."""
    out = RingElem.one(scenario.gens)
    for g in _role_generators(scenario, loop):
        out = out * (RingElem.one(scenario.gens) - g.to_ring())
    return out


def vanishing_polygon(scenario: Scenario, loop: str) -> str:
    spec = scenario.loop_spec(loop)
    label = spec.roles[VANISHING_SLOT]
    return label + "'" if spec.on_primed else label


def pham_cycle(scenario: Scenario, loop: str, polygon: str, g: GroupElem | str = "e") -> OmegaVector:
    """The chain polygon_g·ω, with ω the Pham factor of ``loop``."""
    T = scenario.matrix(loop)
    g = _parse_elem(scenario.gens, g)
    coeff = pham_omega(scenario, loop).shift(g)
    return OmegaVector.basis(scenario.gens, T.row_labels, polygon, coeff)


def recover_intersection_indices(w: OmegaVector, scenario: Scenario, loop: str) -> dict[GroupElem, int]:
    """Indices c_γ with var(w) = Σ c_γ·γ·ω on the vanishing polygon.

    Raises ``VerifyError`` when the variation touches other polygons or is not a
    multiple of ω; both would contradict the Picard–Lefschetz formula for w.
    """
    omega = pham_omega(scenario, loop)
    T = scenario.matrix(loop)
    v = variation(w, T)
    q_label = vanishing_polygon(scenario, loop)
    stray = [l for l, x in zip(v.labels, v.entries) if l != q_label and x]
    if stray:
        raise VerifyError(
            f"variation under {loop} is not supported on {q_label}: nonzero at {', '.join(stray)}"
        )
    x = v[q_label]
    q = x
    try:
        for g in _role_generators(scenario, loop):
            q = divide_by_one_minus(q, g)
    except RingError:
        raise VerifyError(
            f"variation coordinate {x} is outside the span of the shifts of omega = {omega}"
        ) from None
    if q * omega != x:
        raise VerifyError("index re-expansion does not reproduce the variation")
    return {GroupElem(scenario.gens, exps): c for exps, c in q.terms}


def expand_indices(indices: Mapping[GroupElem, int], omega: RingElem) -> RingElem:
    """Σ c_γ·γ·ω, the inverse of index recovery."""
    out = RingElem.zero(omega.gens)
    for g, c in indices.items():
        out = out + omega.shift(g) * c
    return out


# ---------------------------------------------------------------------------
# Identity expressions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Scalar:
    """k times the identity, with labels fixed only when it meets a matrix."""

    k: int


Value = Union[_Scalar, OmegaMatrix]

_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>==|!=|[-+*()]))")


@dataclass(frozen=True)
class Node:
    op: str  # "name", "int", "I", "inv", "+", "-", "*", "neg"
    args: tuple = ()
    value: str | int | None = None

    def __str__(self) -> str:
        if self.op in ("name", "int"):
            return str(self.value)
        if self.op == "I":
            return "I"
        if self.op == "inv":
            return f"inv({self.args[0]})"
        if self.op == "neg":
            return f"-{_wrap(self.args[0], 'neg')}"
        sep = " * " if self.op == "*" else f" {self.op} "
        return sep.join(_wrap(a, self.op, i) for i, a in enumerate(self.args))

    def names(self) -> list[str]:
        if self.op == "name":
            return [self.value]
        return [n for a in self.args for n in a.names()]


_PREC = {"+": 1, "-": 1, "neg": 2, "*": 3}


def _wrap(node: Node, parent: str, index: int = 0) -> str:
    inner = _PREC.get(node.op, 4)
    outer = _PREC[parent]
    if inner < outer or (parent == "-" and index > 0 and inner == outer):
        return f"({node})"
    return str(node)


@dataclass(frozen=True)
class IdentityExpr:
    left: Node
    relation: str  # "==" or "!="
    right: Node

    def __str__(self) -> str:
        return f"{self.left} {self.relation} {self.right}"

    def names(self) -> list[str]:
        return sorted(set(self.left.names() + self.right.names()))


class _ExprParser:
    def __init__(self, text: str):
        self.text = text
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN_RE.match(text, pos)
            if not m:
                raise ParseError(f"unexpected character at column {pos + 1}: {text[pos:].strip()[:10]!r}")
            kind = m.lastgroup
            self.tokens.append((kind, m.group(kind), m.start(kind) + 1))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression")
        self.i += 1
        return tok

    def expect(self, op: str):
        tok = self.take()
        if tok[1] != op:
            raise ParseError(f"expected {op!r} at column {tok[2]}, got {tok[1]!r}")

    def identity(self) -> IdentityExpr:
        left = self.sum()
        tok = self.take()
        if tok[1] not in ("==", "!="):
            raise ParseError(f"expected '==' or '!=' at column {tok[2]}")
        right = self.sum()
        if self.peek() is not None:
            raise ParseError(f"unexpected {self.peek()[1]!r} at column {self.peek()[2]}")
        return IdentityExpr(left, tok[1], right)

    def sum(self) -> Node:
        tok = self.peek()
        if tok and tok[1] == "-":
            self.take()
            node = Node("neg", (self.product(),))
        else:
            node = self.product()
        while (tok := self.peek()) and tok[1] in ("+", "-"):
            self.take()
            node = Node(tok[1], (node, self.product()))
        return node

    def product(self) -> Node:
        factors = [self.factor()]
        while (tok := self.peek()) is not None:
            if tok[1] == "*":
                self.take()
                factors.append(self.factor())
            elif tok[0] in ("name", "num") or tok[1] == "(":
                factors.append(self.factor())
            else:
                break
        return factors[0] if len(factors) == 1 else Node("*", tuple(factors))

    def factor(self) -> Node:
        kind, text, col = self.take()
        if kind == "num":
            return Node("int", value=int(text))
        if kind == "name":
            if text == "I":
                return Node("I")
            if text == "inv":
                self.expect("(")
                inner = self.sum()
                self.expect(")")
                return Node("inv", (inner,))
            return Node("name", value=text)
        if text == "(":
            inner = self.sum()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {text!r} at column {col}")


def parse_identity(text: str) -> IdentityExpr:
    return _ExprParser(text).identity()


def parse_expression(text: str) -> Node:
    parser = _ExprParser(text)
    node = parser.sum()
    if parser.peek() is not None:
        tok = parser.peek()
        raise ParseError(f"unexpected {tok[1]!r} at column {tok[2]}")
    return node


def _materialize(v: Value, like: OmegaMatrix) -> OmegaMatrix:
    if isinstance(v, OmegaMatrix):
        return v
    if like.row_labels != like.col_labels:
        raise LinalgError(
            "I only makes sense next to a matrix from a basis to itself, not "
            f"{' '.join(like.row_labels)} -> {' '.join(like.col_labels)}"
        )
    I = mat_identity(like.gens, like.row_labels)
    return I.map_entries(lambda x: x * v.k)


def _scale(v: Value, k: int) -> Value:
    if isinstance(v, _Scalar):
        return _Scalar(v.k * k)
    return v.map_entries(lambda x: x * k)


def evaluate(node: Node, resolve: Callable[[str], OmegaMatrix]) -> Value:
    op = node.op
    if op == "name":
        return resolve(node.value)
    if op == "int":
        return _Scalar(node.value)
    if op == "I":
        return _Scalar(1)
    if op == "neg":
        return _scale(evaluate(node.args[0], resolve), -1)
    if op == "inv":
        v = evaluate(node.args[0], resolve)
        if isinstance(v, _Scalar):
            if v.k not in (1, -1):
                raise LinalgError(f"{v.k}*I is not invertible over the integers")
            return v
        return mat_inverse(v)
    if op == "*":
        acc = evaluate(node.args[0], resolve)
        for arg in node.args[1:]:
            v = evaluate(arg, resolve)
            if isinstance(acc, _Scalar):
                acc = _scale(v, acc.k)
            elif isinstance(v, _Scalar):
                acc = _scale(acc, v.k)
            else:
                acc = mat_mul(acc, v)
        return acc
    if op in ("+", "-"):
        a = evaluate(node.args[0], resolve)
        b = evaluate(node.args[1], resolve)
        if isinstance(a, _Scalar) and isinstance(b, _Scalar):
            return _Scalar(a.k + b.k if op == "+" else a.k - b.k)
        like = a if isinstance(a, OmegaMatrix) else b
        a, b = _materialize(a, like), _materialize(b, like)
        return mat_add(a, b) if op == "+" else mat_sub(a, b)
    raise VerifyError(f"unknown expression node {op}")


def evaluate_matrix(scenario: Scenario, text: str) -> OmegaMatrix:
    """Value of an expression; a bare scalar becomes a multiple of the scenario identity."""
    v = evaluate(parse_expression(text), scenario.matrix)
    if isinstance(v, _Scalar):
        return _materialize(v, scenario.identity())
    return v


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CheckReport:
    """Outcome of one check.  ``detail`` explains a failure; ``data`` is machine-readable."""

    name: str
    statement: str
    passed: bool
    detail: str = ""
    data: Mapping[str, object] = field(default_factory=dict)

    def pretty(self) -> str:
        head = f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.statement}"
        return head if not self.detail else f"{head}\n  {self.detail}"

    def to_structured(self) -> dict:
        out = {"name": self.name, "statement": self.statement, "passed": self.passed}
        if self.detail:
            out["detail"] = self.detail
        out.update(self.data)
        return out


def check_identity(expr: str | IdentityExpr, scenario: Scenario, name: str = "identity") -> CheckReport:
    """Evaluate both sides exactly and compare; report the first differing entry."""
    ident = parse_identity(expr) if isinstance(expr, str) else expr
    left = evaluate(ident.left, scenario.matrix)
    right = evaluate(ident.right, scenario.matrix)
    if isinstance(left, _Scalar) and isinstance(right, _Scalar):
        left = _materialize(left, scenario.identity())
        right = _materialize(right, scenario.identity())
    else:
        like = left if isinstance(left, OmegaMatrix) else right
        left, right = _materialize(left, like), _materialize(right, like)
    if (left.row_labels, left.col_labels) != (right.row_labels, right.col_labels):
        raise LinalgError(
            "the two sides map between different bases: "
            f"{' '.join(left.row_labels)} -> {' '.join(left.col_labels)} versus "
            f"{' '.join(right.row_labels)} -> {' '.join(right.col_labels)}"
        )
    diff = first_difference(left, right)
    equal = diff is None
    passed = equal if ident.relation == "==" else not equal
    data: dict[str, object] = {"relation": ident.relation, "equal": equal}
    detail = ""
    if diff is not None:
        row, col, a, b = diff
        data["first_difference"] = {"row": row, "column": col, "left": str(a), "right": str(b)}
        if not passed:
            detail = f"first difference at ({row}, {col}): left = {a}, right = {b}"
    elif not passed:
        detail = "both sides are equal"
    return CheckReport(name, str(ident), passed, detail, data)


def _basis_vectors(scenario: Scenario, labels: Sequence[str]) -> list[OmegaVector]:
    return [OmegaVector.basis(scenario.gens, labels, l) for l in labels]


def check_edge_commutation(
    scenario: Scenario, loop: str, vectors: Iterable[OmegaVector] | None = None
) -> CheckReport:
    """∂(w·T) equals the edge table applied to ∂w, for every basis vector (and extra ``vectors``)."""
    T = scenario.matrix(loop)
    table = scenario.edge_table(loop)
    src, dst = table.source, table.target
    tested = _basis_vectors(scenario, T.row_labels) + list(vectors or [])
    for w in tested:
        lhs = boundary(dst, vec_mat_mul(w, T))
        rhs = edge_transform(table, boundary(src, w))
        if lhs != rhs:
            return CheckReport(
                f"edge_commutation:{loop}",
                f"boundary commutes with {loop}",
                False,
                f"w = {w.labelled_text()}: boundary of image = {lhs}, image of boundary = {rhs}",
                {"vector": str(w)},
            )
    return CheckReport(
        f"edge_commutation:{loop}", f"boundary commutes with {loop}", True, "", {"vectors": len(tested)}
    )


def check_fold(scenario: Scenario, fold: str) -> CheckReport:
    fmap = scenario.folds[fold]
    name = f"fold:{fold}"
    statement = f"{fmap.folded_loop} is reproduced from the unfolded {fmap.unfolded_loop.kind}"
    try:
        got = fold_reproduce(fmap)
    except LinalgError as exc:
        return CheckReport(name, statement, False, str(exc))
    diff = first_difference(got, scenario.matrix(fmap.folded_loop))
    if diff is None:
        return CheckReport(name, statement, True)
    row, col, a, b = diff
    return CheckReport(name, statement, False, f"first difference at ({row}, {col}): folded = {a}, expected = {b}")


def run_suite(scenario: Scenario) -> list[CheckReport]:
    """Every identity of the scenario, then edge-table commutation and fold checks."""
    reports = []
    for name, expr, _ in scenario.identities:
        try:
            reports.append(check_identity(expr, scenario, name))
        except (LinalgError, ParseError, ScenarioError, RingError) as exc:
            reports.append(CheckReport(name, expr, False, f"error: {exc}"))
    for loop in scenario.edge_map_text:
        try:
            reports.append(check_edge_commutation(scenario, loop))
        except (LinalgError, ScenarioError) as exc:
            reports.append(CheckReport(f"edge_commutation:{loop}", loop, False, f"error: {exc}"))
    for fold in scenario.folds:
        reports.append(check_fold(scenario, fold))
    return reports
