"""Exact arithmetic in a finitely generated abelian group and its integral group ring.

The group is Z^m modulo optional torsion relations g^n = e.  A group element is a
dense exponent vector; a ring element is a finite integer combination of group
elements.  Coefficients are Python ints, so nothing ever overflows.

Text form of a ring element::

    e - g1 - g2 + g1*g2
    2*g1^-1*g3 - e

Terms print in a fixed order: by total degree (sum of absolute exponents), then
lexicographically with g1 before g2 and positive powers before negative ones.
"""

from __future__ import annotations

import cmath
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "GeneratorSet",
    "GroupElem",
    "RingElem",
    "RingHom",
    "NumericHom",
    "RingError",
    "ParseError",
    "ge_identity",
    "ge_mul",
    "ge_inv",
    "ring_add",
    "ring_mul",
    "ring_specialize",
    "parse_ring",
    "parse_group",
    "NUMERIC_TOLERANCE",
]

NUMERIC_TOLERANCE = 1e-9

Exps = tuple[int, ...]

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class RingError(ValueError):
    """Raised on mismatched generator sets or invalid ring data."""


class ParseError(ValueError):
    """Raised when text does not match the ring-element grammar."""


@dataclass(frozen=True)
class GeneratorSet:
    """Named generators of an abelian group, each free (order None) or of finite order."""

    names: tuple[str, ...]
    orders: tuple[int | None, ...]

    def __init__(self, names: Iterable[str], orders: Iterable[int | None] | None = None):
        names = tuple(names)
        orders = tuple(orders) if orders is not None else (None,) * len(names)
        if len(orders) != len(names):
            raise RingError("one order per generator is required")
        if len(set(names)) != len(names):
            raise RingError(f"duplicate generator names in {names}")
        for name in names:
            if not _NAME_RE.match(name) or name == "e":
                raise RingError(f"invalid generator name {name!r}")
        for order in orders:
            if order is not None and (not isinstance(order, int) or order < 2):
                raise RingError(f"torsion order must be an integer >= 2, got {order!r}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "orders", orders)

    @classmethod
    def free(cls, *names: str) -> GeneratorSet:
        return cls(names)

    def __len__(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise RingError(f"unknown generator {name!r}") from None

    def reduce(self, exps: Sequence[int]) -> Exps:
        """Canonical residues: exponents of order-n generators land in [0, n)."""
        return tuple(x if n is None else x % n for x, n in zip(exps, self.orders))

    def identity(self) -> GroupElem:
        return GroupElem(self, (0,) * len(self.names))

    def gen(self, name: str) -> GroupElem:
        exps = [0] * len(self.names)
        exps[self.index(name)] = 1
        return GroupElem(self, exps)

    def describe(self) -> str:
        return " ".join(n if o is None else f"{n}:{o}" for n, o in zip(self.names, self.orders))


@dataclass(frozen=True)
class GroupElem:
    """One group element, stored as a canonical exponent vector."""

    gens: GeneratorSet
    exponents: Exps

    def __init__(self, gens: GeneratorSet, exponents: Iterable[int]):
        exps = tuple(int(x) for x in exponents)
        if len(exps) != len(gens):
            raise RingError(f"expected {len(gens)} exponents, got {len(exps)}")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "exponents", gens.reduce(exps))

    def __mul__(self, other: GroupElem) -> GroupElem:
        return ge_mul(self, other)

    def inverse(self) -> GroupElem:
        return ge_inv(self)

    def __pow__(self, n: int) -> GroupElem:
        return GroupElem(self.gens, (x * n for x in self.exponents))

    def is_identity(self) -> bool:
        return not any(self.exponents)

    def to_ring(self, coeff: int = 1) -> RingElem:
        return RingElem(self.gens, {self.exponents: coeff})

    def __str__(self) -> str:
        return _format_monomial(self.gens, self.exponents)


def ge_identity(gens: GeneratorSet) -> GroupElem:
    return gens.identity()


def ge_mul(a: GroupElem, b: GroupElem) -> GroupElem:
    _same_gens(a.gens, b.gens)
    return GroupElem(a.gens, (x + y for x, y in zip(a.exponents, b.exponents)))


def ge_inv(a: GroupElem) -> GroupElem:
    return GroupElem(a.gens, (-x for x in a.exponents))


def _same_gens(a: GeneratorSet, b: GeneratorSet) -> None:
    if a is not b and a != b:
        raise RingError(f"generator sets differ: [{a.describe()}] vs [{b.describe()}]")


def _term_key(exps: Exps) -> tuple:
    return (sum(abs(x) for x in exps), tuple((-abs(x), x < 0) for x in exps))


class RingElem:
    """An element of the group ring: a finite integer combination of group elements.

    Terms are stored canonically (no zero coefficients, fixed order), so equality and
    hashing are structural.
    """

    __slots__ = ("gens", "_terms", "_hash")

    def __init__(self, gens: GeneratorSet, terms: Mapping[Sequence[int], int] | None = None):
        acc: dict[Exps, int] = {}
        for exps, coeff in (terms or {}).items():
            if not isinstance(coeff, int):
                raise RingError(f"coefficients must be integers, got {coeff!r}")
            if len(exps) != len(gens):
                raise RingError(f"expected {len(gens)} exponents, got {len(exps)}")
            key = gens.reduce(exps)
            acc[key] = acc.get(key, 0) + coeff
        self.gens = gens
        self._terms: tuple[tuple[Exps, int], ...] = tuple(
            sorted(((k, c) for k, c in acc.items() if c), key=lambda kc: _term_key(kc[0]))
        )
        self._hash: int | None = None

    @classmethod
    def _raw(cls, gens: GeneratorSet, acc: dict[Exps, int]) -> RingElem:
        # acc keys are already canonical residues
        obj = cls.__new__(cls)
        obj.gens = gens
        obj._terms = tuple(
            sorted(((k, c) for k, c in acc.items() if c), key=lambda kc: _term_key(kc[0]))
        )
        obj._hash = None
        return obj

    @classmethod
    def zero(cls, gens: GeneratorSet) -> RingElem:
        return cls._raw(gens, {})

    @classmethod
    def one(cls, gens: GeneratorSet) -> RingElem:
        return cls._raw(gens, {(0,) * len(gens): 1})

    @classmethod
    def parse(cls, gens: GeneratorSet, text: str) -> RingElem:
        return parse_ring(gens, text)

    @property
    def terms(self) -> tuple[tuple[Exps, int], ...]:
        return self._terms

    def items(self) -> Iterator[tuple[GroupElem, int]]:
        for exps, coeff in self._terms:
            yield GroupElem(self.gens, exps), coeff

    def coefficient(self, g: GroupElem | Sequence[int]) -> int:
        exps = g.exponents if isinstance(g, GroupElem) else self.gens.reduce(g)
        for k, c in self._terms:
            if k == exps:
                return c
        return 0

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_unit(self) -> bool:
        """Units recognised here are the trivial ones, +-g for a group element g."""
        return len(self._terms) == 1 and self._terms[0][1] in (1, -1)

    def unit_inverse(self) -> RingElem:
        if not self.is_unit():
            raise RingError(f"{self} is not a unit of the form +-g")
        exps, coeff = self._terms[0]
        return RingElem._raw(self.gens, {self.gens.reduce(tuple(-x for x in exps)): coeff})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int) and not isinstance(other, bool):
            return self == RingElem(self.gens, {(0,) * len(self.gens): other})
        if not isinstance(other, RingElem):
            return NotImplemented
        return self.gens == other.gens and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.gens, self._terms))
        return self._hash

    def _coerce(self, other: object) -> RingElem:
        if isinstance(other, RingElem):
            _same_gens(self.gens, other.gens)
            return other
        if isinstance(other, GroupElem):
            _same_gens(self.gens, other.gens)
            return other.to_ring()
        if isinstance(other, int) and not isinstance(other, bool):
            return RingElem(self.gens, {(0,) * len(self.gens): other})
        raise TypeError(f"cannot combine RingElem with {type(other).__name__}")

    def __add__(self, other: object) -> RingElem:
        return ring_add(self, self._coerce(other))

    __radd__ = __add__

    def __neg__(self) -> RingElem:
        return RingElem._raw(self.gens, {k: -c for k, c in self._terms})

    def __sub__(self, other: object) -> RingElem:
        return ring_add(self, -self._coerce(other))

    def __rsub__(self, other: object) -> RingElem:
        return ring_add(self._coerce(other), -self)

    def __mul__(self, other: object) -> RingElem:
        return ring_mul(self, self._coerce(other))

    def __rmul__(self, other: object) -> RingElem:
        return ring_mul(self._coerce(other), self)

    def __pow__(self, n: int) -> RingElem:
        if n < 0:
            return self.unit_inverse() ** (-n)
        result = RingElem.one(self.gens)
        for _ in range(n):
            result = result * self
        return result

    def map_exponents(self, fn) -> RingElem:
        """Apply fn to every exponent vector (a group endomorphism) and re-canonicalize."""
        acc: dict[Exps, int] = {}
        for exps, coeff in self._terms:
            key = self.gens.reduce(fn(exps))
            acc[key] = acc.get(key, 0) + coeff
        return RingElem._raw(self.gens, acc)

    def shift(self, g: GroupElem) -> RingElem:
        """Multiply by a single group element."""
        _same_gens(self.gens, g.gens)
        return self.map_exponents(lambda exps: tuple(x + y for x, y in zip(exps, g.exponents)))

    def augmentation(self) -> int:
        """Sum of coefficients (image under every generator -> e)."""
        return sum(c for _, c in self._terms)

    def __str__(self) -> str:
        return format_ring(self)

    def __repr__(self) -> str:
        return f"RingElem({format_ring(self)!r})"


def ring_add(a: RingElem, b: RingElem) -> RingElem:
    _same_gens(a.gens, b.gens)
    acc = dict(a.terms)
    for k, c in b.terms:
        acc[k] = acc.get(k, 0) + c
    return RingElem._raw(a.gens, acc)


def ring_mul(a: RingElem, b: RingElem) -> RingElem:
    """Bilinear extension of the group law.

    Every product is formed as (left term)·(right term) in that order, so the
    routine itself never relies on the group being abelian.
    """
    _same_gens(a.gens, b.gens)
    gens = a.gens
    orders = gens.orders
    has_torsion = any(o is not None for o in orders)
    acc: dict[Exps, int] = {}
    for ka, ca in a.terms:
        for kb, cb in b.terms:
            if has_torsion:
                key = tuple(
                    x + y if n is None else (x + y) % n for x, y, n in zip(ka, kb, orders)
                )
            else:
                key = tuple(x + y for x, y in zip(ka, kb))
            acc[key] = acc.get(key, 0) + ca * cb
    return RingElem._raw(gens, acc)


# ---------------------------------------------------------------------------
# Homomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RingHom:
    """Ring map induced by a group homomorphism source -> target.

    images[i] is the target group element that source generator i goes to.
    """

    source: GeneratorSet
    target: GeneratorSet
    images: tuple[GroupElem, ...]

    def __init__(self, source: GeneratorSet, target: GeneratorSet, images: Sequence[GroupElem]):
        images = tuple(images)
        if len(images) != len(source):
            raise RingError("one image per source generator is required")
        for name, order, img in zip(source.names, source.orders, images):
            _same_gens(img.gens, target)
            if order is not None and not (img ** order).is_identity():
                raise RingError(
                    f"image of {name} (order {order}) is {img}, whose {order}-th power is not e"
                )
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "images", images)

    @classmethod
    def by_name(
        cls, source: GeneratorSet, target: GeneratorSet, mapping: Mapping[str, str | GroupElem] | None = None
    ) -> RingHom:
        """Build from a name map; generators not mentioned go to the same-named target generator."""
        mapping = dict(mapping or {})
        images = []
        for name in source.names:
            img = mapping.get(name, name)
            if isinstance(img, str):
                img = parse_group(target, img)
            images.append(img)
        return cls(source, target, images)

    def apply_exponents(self, exps: Exps) -> Exps:
        out = [0] * len(self.target)
        for x, img in zip(exps, self.images):
            if x:
                for j, y in enumerate(img.exponents):
                    out[j] += x * y
        return self.target.reduce(out)

    def __call__(self, w: RingElem) -> RingElem:
        return ring_specialize(self, w)


@dataclass(frozen=True)
class NumericHom:
    """Ring map to the complex numbers: generator i goes to the nonzero number values[i]."""

    source: GeneratorSet
    values: tuple[complex, ...]

    def __init__(self, source: GeneratorSet, values: Sequence[complex]):
        values = tuple(complex(v) for v in values)
        if len(values) != len(source):
            raise RingError("one value per source generator is required")
        for name, order, v in zip(source.names, source.orders, values):
            if abs(v) < NUMERIC_TOLERANCE:
                raise RingError(f"image of {name} must be nonzero")
            if order is not None and abs(v**order - 1) > NUMERIC_TOLERANCE:
                raise RingError(f"image of {name} does not satisfy its torsion relation")
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_angles(cls, source: GeneratorSet, alphas: Sequence[float]) -> NumericHom:
        """Generator j goes to exp(-2 pi i alpha_j)."""
        return cls(source, [cmath.exp(-2j * cmath.pi * a) for a in alphas])

    def __call__(self, w: RingElem) -> complex:
        return ring_specialize(self, w)


def ring_specialize(h: Union[RingHom, NumericHom], w: RingElem) -> Union[RingElem, complex]:
    _same_gens(h.source, w.gens)
    if isinstance(h, NumericHom):
        total = 0j
        for exps, coeff in w.terms:
            value = complex(coeff)
            for x, v in zip(exps, h.values):
                if x:
                    value *= v**x
            total += value
        return total
    acc: dict[Exps, int] = {}
    for exps, coeff in w.terms:
        key = h.apply_exponents(exps)
        acc[key] = acc.get(key, 0) + coeff
    return RingElem._raw(h.target, acc)


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------


def _format_monomial(gens: GeneratorSet, exps: Exps) -> str:
    parts = []
    for name, x in zip(gens.names, exps):
        if x == 1:
            parts.append(name)
        elif x:
            parts.append(f"{name}^{x}")
    return "*".join(parts) if parts else "e"


def format_ring(w: RingElem) -> str:
    if not w.terms:
        return "0"
    out = []
    for i, (exps, coeff) in enumerate(w.terms):
        mono = _format_monomial(w.gens, exps)
        body = mono if abs(coeff) == 1 else f"{abs(coeff)}*{mono}"
        if i == 0:
            out.append(body if coeff > 0 else f"-{body}")
        else:
            out.append(f"{'+' if coeff > 0 else '-'} {body}")
    return " ".join(out)


_TOKEN_RE = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    text = text.rstrip()
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos:].lstrip()[:1]!r} at column {pos + 1}")
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive-descent parser for the ring grammar.

    sum    := ["-"|"+"] term (("+"|"-") term)*
    term   := [int "*"] monomial | int
    monomial := "e" | factor ("*" factor)*
    factor := name ["^" ["-"] int]

    Parenthesised products "(e - g1)*(e - g2)" are accepted as a convenience; the
    printer never emits them.
    """

    def __init__(self, gens: GeneratorSet, text: str):
        self.gens = gens
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> tuple[str, str, int] | None:
        j = self.i + offset
        return self.tokens[j] if j < len(self.tokens) else None

    def take(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise ParseError(f"unexpected end of input in {self.text!r}")
        self.i += 1
        return tok

    def expect_op(self, op: str) -> None:
        tok = self.take()
        if tok[0] != "op" or tok[1] != op:
            raise ParseError(f"expected {op!r} at column {tok[2] + 1}, found {tok[1]!r}")

    def parse(self) -> RingElem:
        if not self.tokens:
            raise ParseError("empty ring element")
        value = self.sum()
        if self.peek() is not None:
            tok = self.peek()
            raise ParseError(f"unexpected {tok[1]!r} at column {tok[2] + 1}")
        return value

    def sum(self) -> RingElem:
        sign = 1
        tok = self.peek()
        if tok and tok[0] == "op" and tok[1] in "+-":
            self.take()
            sign = -1 if tok[1] == "-" else 1
        total = self.product() * sign
        while True:
            tok = self.peek()
            if not tok or tok[0] != "op" or tok[1] not in "+-":
                return total
            self.take()
            term = self.product()
            total = total + term if tok[1] == "+" else total - term

    def product(self) -> RingElem:
        value = self.atom()
        while True:
            tok = self.peek()
            if tok and tok[0] == "op" and tok[1] == "*":
                self.take()
                value = value * self.atom()
            else:
                return value

    def atom(self) -> RingElem:
        tok = self.take()
        kind, text, col = tok
        if kind == "num":
            return RingElem(self.gens, {(0,) * len(self.gens): int(text)})
        if kind == "op" and text == "(":
            inner = self.sum()
            self.expect_op(")")
            return inner
        if kind == "name":
            if text == "e":
                return RingElem.one(self.gens)
            try:
                idx = self.gens.index(text)
            except RingError:
                raise ParseError(f"unknown generator {text!r} at column {col + 1}") from None
            power = 1
            nxt = self.peek()
            if nxt and nxt[0] == "op" and nxt[1] == "^":
                self.take()
                neg = False
                t = self.take()
                if t[0] == "op" and t[1] == "-":
                    neg = True
                    t = self.take()
                if t[0] != "num":
                    raise ParseError(f"expected an integer exponent at column {t[2] + 1}")
                power = -int(t[1]) if neg else int(t[1])
            exps = [0] * len(self.gens)
            exps[idx] = power
            return RingElem(self.gens, {tuple(exps): 1})
        raise ParseError(f"unexpected {text!r} at column {col + 1}")


def parse_ring(gens: GeneratorSet, text: str) -> RingElem:
    """Parse the text form of a ring element (the inverse of ``str``)."""
    return _Parser(gens, text).parse()


def parse_group(gens: GeneratorSet, text: str) -> GroupElem:
    """Parse a single monomial such as ``e`` or ``g1*g3^-1``."""
    w = parse_ring(gens, text)
    if len(w.terms) != 1 or w.terms[0][1] != 1:
        raise ParseError(f"{text!r} is not a single group element")
    return GroupElem(gens, w.terms[0][0])
