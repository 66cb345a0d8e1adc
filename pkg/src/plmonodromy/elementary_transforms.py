"""Elementary monodromy matrices, their placement in a larger basis, and loop words.

The five templates (circle, biangle, triangle, and the two halves of the triangle
loop split at the triple point) are stored below as literal text.  ``embed`` places
a template into a scenario basis:

1. template slot s goes to ambient polygon roles[s] (slots left out are dropped,
   which is only allowed when no kept row has an entry in their column);
2. template generators are renamed through gen_roles;
3. each ambient polygon n carries a twist d_n, the discrepancy between its old and
   new base paths, and the block is re-expressed as D^-1·T·D.  That is, entry
   (n, l) becomes d_n^-1 · T_nl · d_l.

Polygons that no slot maps to keep identity rows and columns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from .group_ring import GeneratorSet, GroupElem, ParseError, RingElem, RingHom, parse_group
from .omega_linalg import (
    LinalgError,
    OmegaMatrix,
    OmegaVector,
    diag_conjugate,
    mat_inverse,
    mat_mul,
    mat_specialize,
    parse_matrix,
    solve_left,
    vec_mat_mul,
)

__all__ = [
    "TEMPLATE_GENS",
    "KINDS",
    "LoopSpec",
    "LoopWord",
    "FoldMap",
    "EmbedError",
    "template",
    "template_circle",
    "template_biangle",
    "template_triangle",
    "template_jump_plus",
    "template_jump_minus",
    "primed",
    "embed",
    "compose",
    "parse_word",
    "fold_lift",
    "fold_descend",
    "fold_reproduce",
]

TEMPLATE_GENS = GeneratorSet.free("g1", "g2", "g3")


def primed(labels: Sequence[str]) -> tuple[str, ...]:
    """Labels of the basis Q' reached by a jump."""
    return tuple(l + "'" for l in labels)


_TRIANGLE = """
A: g1*g2*g3; 0; 0; 0; 0; 0; 0
B: g2 - g1*g2*g3; e; 0; 0; 0; 0; 0
C: g1 - g1*g2*g3; 0; e; 0; 0; 0; 0
D: g3 - g1*g2*g3; 0; 0; e; 0; 0; 0
E: -g2*g3 + g1*g2*g3; 0; 0; 0; e; 0; 0
F: -g1*g2 + g1*g2*g3; 0; 0; 0; 0; e; 0
G: -g1*g3 + g1*g2*g3; 0; 0; 0; 0; 0; e
"""

_BIANGLE = """
A: -g1*g2; 0; 0; 0; 0
B: g1 + g1*g2; e; 0; 0; 0
C: g2 + g1*g2; 0; e; 0; 0
D: -g1*g2; 0; 0; e; 0
E: -g1*g2; 0; 0; 0; e
"""

_CIRCLE = """
A: g1; 0
B: 0; e
"""

_JUMP_PLUS = """
columns: A' B' C' D' E' F' G'
A: e; 0; 0; 0; 0; 0; 0
B: -e; e; 0; 0; 0; 0; 0
C: -e; 0; e; 0; 0; 0; 0
D: -e; 0; 0; e; 0; 0; 0
E: e; 0; 0; 0; e; 0; 0
F: e; 0; 0; 0; 0; e; 0
G: e; 0; 0; 0; 0; 0; e
"""

_JUMP_MINUS = """
columns: A B C D E F G
A': g1*g2*g3; 0; 0; 0; 0; 0; 0
B': g2; e; 0; 0; 0; 0; 0
C': g1; 0; e; 0; 0; 0; 0
D': g3; 0; 0; e; 0; 0; 0
E': -g2*g3; 0; 0; 0; e; 0; 0
F': -g1*g2; 0; 0; 0; 0; e; 0
G': -g1*g3; 0; 0; 0; 0; 0; e
"""

# kind -> (matrix text, number of template generators, the vanishing polygon's slot)
_TEMPLATES: dict[str, tuple[str, int]] = {
    "circle": (_CIRCLE, 1),
    "biangle": (_BIANGLE, 2),
    "triangle": (_TRIANGLE, 3),
    "jump_plus": (_JUMP_PLUS, 3),
    "jump_minus": (_JUMP_MINUS, 3),
}

KINDS = tuple(_TEMPLATES)
ELEMENTARY_KINDS = ("circle", "biangle", "triangle")
VANISHING_SLOT = "A"


class EmbedError(ValueError):
    """Invalid loop specification (role collisions, unknown labels, dropped slots in use)."""


def template(kind: str) -> OmegaMatrix:
    try:
        text, _ = _TEMPLATES[kind]
    except KeyError:
        raise EmbedError(f"unknown template kind {kind!r}; expected one of {', '.join(KINDS)}") from None
    return parse_matrix(TEMPLATE_GENS, text)


def template_generator_count(kind: str) -> int:
    return _TEMPLATES[kind][1]


def template_circle() -> OmegaMatrix:
    return template("circle")


def template_biangle() -> OmegaMatrix:
    return template("biangle")


def template_triangle() -> OmegaMatrix:
    return template("triangle")


def template_jump_plus() -> OmegaMatrix:
    return template("jump_plus")


def template_jump_minus() -> OmegaMatrix:
    return template("jump_minus")


@dataclass(frozen=True)
class LoopSpec:
    """Placement of a template in an ambient basis.

    roles:     template slot (A, B, ...) -> ambient polygon label (unprimed).
    gen_roles: template generator (g1, g2, g3) -> ambient group element text.
    twists:    ambient polygon label -> base-path discrepancy (group element text).
    on_primed: place a circle/biangle/triangle on the primed basis Q' instead of Q.
    """

    kind: str
    roles: Mapping[str, str]
    gen_roles: Mapping[str, str] = field(default_factory=dict)
    twists: Mapping[str, str] = field(default_factory=dict)
    on_primed: bool = False

    def __post_init__(self):
        if self.kind not in _TEMPLATES:
            raise EmbedError(f"unknown template kind {self.kind!r}")
        if self.on_primed and self.kind.startswith("jump"):
            raise EmbedError("jump loops always map between Q and Q'; 'primed' does not apply")
        targets = list(self.roles.values())
        dupes = sorted({t for t in targets if targets.count(t) > 1})
        if dupes:
            raise EmbedError(f"role collision: several slots map to {', '.join(dupes)}")

    @property
    def vanishing_polygon(self) -> str:
        return self.roles[VANISHING_SLOT]


def _base_slots(kind: str) -> tuple[str, ...]:
    T = template(kind)
    return tuple(l.rstrip("'") for l in T.row_labels)


def embed(spec: LoopSpec, gens: GeneratorSet, labels: Sequence[str]) -> OmegaMatrix:
    """Ambient matrix of a loop: template placed by roles, renamed, twisted, padded by identity."""
    labels = tuple(labels)
    T = template(spec.kind)
    slots = _base_slots(spec.kind)
    for slot, target in spec.roles.items():
        if slot not in slots:
            raise EmbedError(f"{spec.kind} has no slot {slot!r}")
        if target not in labels:
            raise EmbedError(f"unknown ambient polygon {target!r}")
    if VANISHING_SLOT not in spec.roles:
        raise EmbedError("the vanishing polygon slot A must be placed")
    for label in spec.twists:
        if label not in labels:
            raise EmbedError(f"twist given for unknown polygon {label!r}")

    images = {}
    for i, name in enumerate(TEMPLATE_GENS.names):
        if i >= template_generator_count(spec.kind):
            images[name] = gens.identity()
            continue
        img = spec.gen_roles.get(name, name)
        try:
            images[name] = _parse_elem(gens, img)
        except (ParseError, ValueError) as exc:
            raise EmbedError(f"generator role {name} -> {img!r}: {exc}") from None
    h = RingHom(TEMPLATE_GENS, gens, [images[n] for n in TEMPLATE_GENS.names])
    block = mat_specialize(h, T)

    dropped = [i for i, s in enumerate(slots) if s not in spec.roles]
    kept = [i for i, s in enumerate(slots) if s in spec.roles]
    for i in dropped:
        for j in kept:
            if block.rows[j][i]:
                raise EmbedError(
                    f"slot {slots[i]} is left out but the image of slot {slots[j]} involves it"
                )

    src_labels, dst_labels = _sides(spec, labels)
    twist = {l: _parse_elem(gens, t) for l, t in spec.twists.items()}
    d = [twist.get(l, gens.identity()) for l in labels]

    # pad to the ambient basis: start from identity and overwrite the placed block
    pos = {l: k for k, l in enumerate(labels)}
    n = len(labels)
    zero, one = RingElem.zero(gens), RingElem.one(gens)
    rows = [[one if i == j else zero for j in range(n)] for i in range(n)]
    for i in kept:
        for j in kept:
            rows[pos[spec.roles[slots[i]]]][pos[spec.roles[slots[j]]]] = block.rows[i][j]
    M = OmegaMatrix(gens, src_labels, rows, dst_labels)
    inv_d = [x.inverse() for x in d]
    return diag_conjugate(M, inv_d)


def _sides(spec: LoopSpec, labels: tuple[str, ...]) -> tuple[tuple[str, ...], tuple[str, ...]]:
    if spec.kind == "jump_plus":
        return labels, primed(labels)
    if spec.kind == "jump_minus":
        return primed(labels), labels
    if spec.on_primed:
        return primed(labels), primed(labels)
    return labels, labels


def _parse_elem(gens: GeneratorSet, text: str | GroupElem) -> GroupElem:
    if isinstance(text, GroupElem):
        return text
    return parse_group(gens, text)


# ---------------------------------------------------------------------------
# Loop words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LoopWord:
    """Product of named loops read left to right; inverted letters use the matrix inverse."""

    letters: tuple[tuple[str, bool], ...]

    def __str__(self) -> str:
        return " ".join(f"inv({n})" if inv else n for n, inv in self.letters)


_WORD_RE = re.compile(r"\s*(?:inv\(\s*(?P<inv>[A-Za-z_][A-Za-z0-9_']*)\s*\)|(?P<name>[A-Za-z_][A-Za-z0-9_']*))\s*\*?")


def parse_word(text: str) -> LoopWord:
    """``'lplus l0 lminus'``, ``'t1p*inv(tA)'``; the empty string is the empty word."""
    letters = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _WORD_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse loop word at column {pos + 1}: {text[pos:]!r}")
        if m.group("inv"):
            letters.append((m.group("inv"), True))
        else:
            letters.append((m.group("name"), False))
        pos = m.end()
    return LoopWord(tuple(letters))


def compose(
    word: LoopWord,
    resolve: Callable[[str], OmegaMatrix] | Mapping[str, OmegaMatrix],
    identity: OmegaMatrix | None = None,
) -> OmegaMatrix:
    """Left-to-right product of the loop matrices; the empty word gives ``identity``."""
    lookup = resolve.__getitem__ if isinstance(resolve, Mapping) else resolve
    result: OmegaMatrix | None = None
    for name, inverted in word.letters:
        try:
            M = lookup(name)
        except KeyError:
            raise LinalgError(f"unknown loop {name!r}") from None
        if inverted:
            M = mat_inverse(M)
        result = M if result is None else mat_mul(result, M)
    if result is None:
        if identity is None:
            raise LinalgError("empty word needs an identity matrix")
        return identity
    return result


# ---------------------------------------------------------------------------
# Folding
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FoldMap:
    """Correspondence between a folded basis and an unfolded one with order-2 generators.

    folded_gens must be exactly the free generators of unfolded_gens (same names);
    the remaining unfolded generators have finite order.  images[Q] is the unfolded
    vector corresponding to Q_e; Q_g corresponds to g times it.
    """

    name: str
    folded_gens: GeneratorSet
    folded_labels: tuple[str, ...]
    unfolded_gens: GeneratorSet
    unfolded_labels: tuple[str, ...]
    images: Mapping[str, OmegaVector]
    unfolded_loop: LoopSpec
    folded_loop: str

    def __post_init__(self):
        free = tuple(n for n, o in zip(self.unfolded_gens.names, self.unfolded_gens.orders) if o is None)
        if free != self.folded_gens.names:
            raise EmbedError(
                f"fold {self.name}: folded generators {self.folded_gens.names} must equal the free unfolded ones {free}"
            )
        missing = [l for l in self.folded_labels if l not in self.images]
        if missing:
            raise EmbedError(f"fold {self.name}: no image for {', '.join(missing)}")

    @property
    def lift_hom(self) -> RingHom:
        return RingHom.by_name(self.folded_gens, self.unfolded_gens)

    def lift_matrix(self) -> OmegaMatrix:
        """Rows: folded basis; columns: unfolded basis."""
        return OmegaMatrix(
            self.unfolded_gens,
            self.folded_labels,
            (self.images[l].entries for l in self.folded_labels),
            self.unfolded_labels,
        )

    def unfolded_matrix(self) -> OmegaMatrix:
        """The unfolded loop, built over free generators and then reduced by the torsion relations."""
        free_gens = GeneratorSet(self.unfolded_gens.names)
        T = embed(self.unfolded_loop, free_gens, self.unfolded_labels)
        to_torsion = RingHom.by_name(free_gens, self.unfolded_gens)
        return mat_specialize(to_torsion, T)


def fold_lift(fmap: FoldMap, w: OmegaVector) -> OmegaVector:
    """Image of a folded chain in the unfolded basis."""
    if w.labels != fmap.folded_labels:
        raise LinalgError(f"vector labels {w.labels} do not match the folded basis {fmap.folded_labels}")
    h = fmap.lift_hom
    return vec_mat_mul(OmegaVector(fmap.unfolded_gens, w.labels, (h(x) for x in w.entries)), fmap.lift_matrix())


def _torsion_elements(gens: GeneratorSet) -> list[tuple[int, ...]]:
    elems = [()]
    for order in gens.orders:
        elems = [e + (k,) for e in elems for k in range(order or 1)]
    return elems


def _split_free(fmap: FoldMap, x: RingElem) -> dict[tuple[int, ...], RingElem]:
    """Write x = sum_t x_t * t over torsion elements t with x_t free of torsion generators."""
    ug = fmap.unfolded_gens
    free_idx = [i for i, o in enumerate(ug.orders) if o is None]
    tors_idx = [i for i, o in enumerate(ug.orders) if o is not None]
    parts: dict[tuple[int, ...], dict] = {}
    for exps, c in x.terms:
        t = tuple(exps[i] for i in tors_idx)
        f = tuple(exps[i] for i in free_idx)
        parts.setdefault(t, {})[f] = c
    return {t: RingElem(fmap.folded_gens, d) for t, d in parts.items()}


def fold_descend(fmap: FoldMap, v: OmegaVector) -> OmegaVector:
    """Inverse of fold_lift on its image.

    The unfolded ring is a free module over the folded ring with the finite torsion
    group as basis; the lift becomes a matrix over the folded ring and the preimage
    is found by unit-pivot elimination.  Raises if v is not in the image.
    """
    if v.labels != fmap.unfolded_labels:
        raise LinalgError("vector labels do not match the unfolded basis")
    ug = fmap.unfolded_gens
    tors_idx = [i for i, o in enumerate(ug.orders) if o is not None]
    tors_gens = GeneratorSet([ug.names[i] for i in tors_idx], [ug.orders[i] for i in tors_idx])
    tors = sorted({tuple(t) for t in _torsion_elements(tors_gens)})
    cols = [(l, t) for l in fmap.unfolded_labels for t in tors]
    col_labels = [f"{l}@{'.'.join(map(str, t))}" for l, t in cols]
    zero = RingElem.zero(fmap.folded_gens)
    F = fmap.lift_matrix()
    rows = []
    for l in fmap.folded_labels:
        split = {u: _split_free(fmap, x) for u, x in zip(fmap.unfolded_labels, F.row(l).entries)}
        rows.append([split[u].get(t, zero) for u, t in cols])
    FR = OmegaMatrix(fmap.folded_gens, fmap.folded_labels, rows, col_labels)
    split_v = {u: _split_free(fmap, x) for u, x in zip(fmap.unfolded_labels, v.entries)}
    vr = OmegaVector(fmap.folded_gens, col_labels, (split_v[u].get(t, zero) for u, t in cols))
    return solve_left(FR, vr)


def fold_reproduce(fmap: FoldMap) -> OmegaMatrix:
    """Folded loop matrix recovered from the unfolded one: row Q is descend(lift(Q_e)·T')."""
    Tu = fmap.unfolded_matrix()
    rows = []
    for l in fmap.folded_labels:
        basis = OmegaVector.basis(fmap.folded_gens, fmap.folded_labels, l)
        rows.append(fold_descend(fmap, vec_mat_mul(fold_lift(fmap, basis), Tu)).entries)
    return OmegaMatrix(fmap.folded_gens, fmap.folded_labels, rows)
