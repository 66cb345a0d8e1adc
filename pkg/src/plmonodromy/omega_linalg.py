"""Row vectors and matrices over the group ring.

Homology classes are row vectors and a transformation acts on the right: w -> w·T.
Row n of T is the image of the n-th basis polygon.  Composition therefore reads
left to right: following loop 1 and then loop 2 gives T1·T2.

Matrices carry a row label set and a column label set.  They coincide for ordinary
loops.  A jump matrix maps the basis Q to a different basis Q', so its columns are
labelled A', B', ...  Products check that A's column labels equal B's row labels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

from .group_ring import (
    GeneratorSet,
    GroupElem,
    NumericHom,
    ParseError,
    RingElem,
    RingHom,
    parse_ring,
    ring_specialize,
    NUMERIC_TOLERANCE,
)

__all__ = [
    "OmegaVector",
    "OmegaMatrix",
    "ComplexMatrix",
    "LinalgError",
    "NotInvertibleError",
    "mat_identity",
    "mat_zero",
    "mat_mul",
    "mat_add",
    "mat_sub",
    "mat_neg",
    "vec_mat_mul",
    "vec_sub",
    "mat_inverse",
    "diag_conjugate",
    "mat_specialize",
    "relabel",
    "first_difference",
    "parse_matrix",
    "parse_vector",
    "solve_left",
    "format_matrix",
    "matrix_to_json",
    "matrix_from_structured",
    "vector_from_structured",
]

Labels = tuple[str, ...]


class LinalgError(ValueError):
    """Dimension or label mismatch between vectors and matrices."""


class NotInvertibleError(LinalgError):
    """Elimination found no unit pivot; the matrix is outside the supported invertible class."""


def _check_labels(labels: Sequence[str]) -> Labels:
    labels = tuple(labels)
    if not labels:
        raise LinalgError("at least one basis label is required")
    if len(set(labels)) != len(labels):
        raise LinalgError(f"duplicate basis labels in {labels}")
    return labels


@dataclass(frozen=True)
class OmegaVector:
    gens: GeneratorSet
    labels: Labels
    entries: tuple[RingElem, ...]

    def __init__(self, gens: GeneratorSet, labels: Sequence[str], entries: Iterable[RingElem]):
        labels = _check_labels(labels)
        entries = tuple(entries)
        if len(entries) != len(labels):
            raise LinalgError(f"{len(entries)} entries for {len(labels)} labels")
        for x in entries:
            if x.gens != gens:
                raise LinalgError("vector entry over a different generator set")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def zero(cls, gens: GeneratorSet, labels: Sequence[str]) -> OmegaVector:
        return cls(gens, labels, [RingElem.zero(gens)] * len(labels))

    @classmethod
    def basis(cls, gens: GeneratorSet, labels: Sequence[str], label: str, coeff: RingElem | None = None) -> OmegaVector:
        labels = tuple(labels)
        if label not in labels:
            raise LinalgError(f"unknown basis label {label!r}")
        one = coeff if coeff is not None else RingElem.one(gens)
        return cls(gens, labels, [one if l == label else RingElem.zero(gens) for l in labels])

    def __getitem__(self, label: str) -> RingElem:
        try:
            return self.entries[self.labels.index(label)]
        except ValueError:
            raise LinalgError(f"unknown basis label {label!r}") from None

    def __len__(self) -> int:
        return len(self.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def __add__(self, other: OmegaVector) -> OmegaVector:
        _match_vectors(self, other)
        return OmegaVector(self.gens, self.labels, (a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: OmegaVector) -> OmegaVector:
        return vec_sub(self, other)

    def scale(self, x: RingElem) -> OmegaVector:
        """Left multiplication of every coordinate by x."""
        return OmegaVector(self.gens, self.labels, (x * a for a in self.entries))

    def __matmul__(self, T: OmegaMatrix) -> OmegaVector:
        return vec_mat_mul(self, T)

    def __str__(self) -> str:
        return "(" + ", ".join(str(x) for x in self.entries) + ")"

    def labelled_text(self) -> str:
        return "; ".join(f"{l}: {x}" for l, x in zip(self.labels, self.entries))

    def to_structured(self) -> dict:
        return {"labels": list(self.labels), "entries": [str(x) for x in self.entries]}


def _match_vectors(a: OmegaVector, b: OmegaVector) -> None:
    if a.labels != b.labels:
        raise LinalgError(f"label mismatch: {a.labels} vs {b.labels}")
    if a.gens != b.gens:
        raise LinalgError("generator sets differ")


@dataclass(frozen=True)
class OmegaMatrix:
    """A matrix over the group ring with row labels and column labels."""

    gens: GeneratorSet
    row_labels: Labels
    col_labels: Labels
    rows: tuple[tuple[RingElem, ...], ...]

    def __init__(
        self,
        gens: GeneratorSet,
        row_labels: Sequence[str],
        rows: Iterable[Iterable[RingElem]],
        col_labels: Sequence[str] | None = None,
    ):
        row_labels = _check_labels(row_labels)
        col_labels = _check_labels(col_labels) if col_labels is not None else row_labels
        rows = tuple(tuple(r) for r in rows)
        if len(rows) != len(row_labels):
            raise LinalgError(f"{len(rows)} rows for {len(row_labels)} row labels")
        for r in rows:
            if len(r) != len(col_labels):
                raise LinalgError(f"row of length {len(r)} for {len(col_labels)} columns")
            for x in r:
                if not isinstance(x, RingElem) or x.gens != gens:
                    raise LinalgError("matrix entry over a different generator set")
        object.__setattr__(self, "gens", gens)
        object.__setattr__(self, "row_labels", row_labels)
        object.__setattr__(self, "col_labels", col_labels)
        object.__setattr__(self, "rows", rows)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.row_labels), len(self.col_labels)

    @property
    def is_square(self) -> bool:
        return len(self.row_labels) == len(self.col_labels)

    def entry(self, row: str, col: str) -> RingElem:
        try:
            return self.rows[self.row_labels.index(row)][self.col_labels.index(col)]
        except ValueError:
            raise LinalgError(f"unknown entry ({row}, {col})") from None

    def row(self, label: str) -> OmegaVector:
        try:
            return OmegaVector(self.gens, self.col_labels, self.rows[self.row_labels.index(label)])
        except ValueError:
            raise LinalgError(f"unknown row label {label!r}") from None

    def column(self, label: str) -> tuple[RingElem, ...]:
        try:
            j = self.col_labels.index(label)
        except ValueError:
            raise LinalgError(f"unknown column label {label!r}") from None
        return tuple(r[j] for r in self.rows)

    def transpose_labels(self) -> tuple[Labels, Labels]:
        return self.col_labels, self.row_labels

    def map_entries(self, fn: Callable[[RingElem], RingElem], gens: GeneratorSet | None = None) -> OmegaMatrix:
        return OmegaMatrix(
            gens or self.gens, self.row_labels, ([fn(x) for x in r] for r in self.rows), self.col_labels
        )

    def __mul__(self, other: OmegaMatrix) -> OmegaMatrix:
        return mat_mul(self, other)

    def __add__(self, other: OmegaMatrix) -> OmegaMatrix:
        return mat_add(self, other)

    def __sub__(self, other: OmegaMatrix) -> OmegaMatrix:
        return mat_sub(self, other)

    def __neg__(self) -> OmegaMatrix:
        return mat_neg(self)

    def is_identity(self) -> bool:
        return self.row_labels == self.col_labels and self == mat_identity(self.gens, self.row_labels)

    def __str__(self) -> str:
        return format_matrix(self)

    def to_structured(self) -> dict:
        return {
            "rows": list(self.row_labels),
            "columns": list(self.col_labels),
            "entries": [[str(x) for x in r] for r in self.rows],
        }


# ---------------------------------------------------------------------------
# Constructors and arithmetic
# ---------------------------------------------------------------------------


def mat_identity(gens: GeneratorSet, labels: Sequence[str]) -> OmegaMatrix:
    labels = _check_labels(labels)
    zero, one = RingElem.zero(gens), RingElem.one(gens)
    return OmegaMatrix(gens, labels, ([one if i == j else zero for j in range(len(labels))] for i in range(len(labels))))


def mat_zero(gens: GeneratorSet, row_labels: Sequence[str], col_labels: Sequence[str] | None = None) -> OmegaMatrix:
    col_labels = tuple(col_labels) if col_labels is not None else tuple(row_labels)
    zero = RingElem.zero(gens)
    return OmegaMatrix(gens, row_labels, ([zero] * len(col_labels) for _ in row_labels), col_labels)


def _same_shape(a: OmegaMatrix, b: OmegaMatrix) -> None:
    if a.gens != b.gens:
        raise LinalgError("generator sets differ")
    if a.row_labels != b.row_labels or a.col_labels != b.col_labels:
        raise LinalgError(
            f"label mismatch: rows {a.row_labels}/{b.row_labels}, columns {a.col_labels}/{b.col_labels}"
        )


def mat_add(a: OmegaMatrix, b: OmegaMatrix) -> OmegaMatrix:
    _same_shape(a, b)
    return OmegaMatrix(a.gens, a.row_labels, ([x + y for x, y in zip(ra, rb)] for ra, rb in zip(a.rows, b.rows)), a.col_labels)


def mat_neg(a: OmegaMatrix) -> OmegaMatrix:
    return a.map_entries(lambda x: -x)


def mat_sub(a: OmegaMatrix, b: OmegaMatrix) -> OmegaMatrix:
    return mat_add(a, mat_neg(b))


def mat_mul(a: OmegaMatrix, b: OmegaMatrix) -> OmegaMatrix:
    if a.gens != b.gens:
        raise LinalgError("generator sets differ")
    if a.col_labels != b.row_labels:
        raise LinalgError(
            f"cannot multiply: left columns {' '.join(a.col_labels)} do not match right rows {' '.join(b.row_labels)}"
        )
    zero = RingElem.zero(a.gens)
    cols = list(zip(*b.rows))
    out = []
    for ra in a.rows:
        row = []
        for cb in cols:
            acc = zero
            for x, y in zip(ra, cb):
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return OmegaMatrix(a.gens, a.row_labels, out, b.col_labels)


def vec_mat_mul(w: OmegaVector, T: OmegaMatrix) -> OmegaVector:
    if w.gens != T.gens:
        raise LinalgError("generator sets differ")
    if w.labels != T.row_labels:
        raise LinalgError(f"vector labels {w.labels} do not match matrix rows {T.row_labels}")
    zero = RingElem.zero(w.gens)
    out = []
    for j in range(len(T.col_labels)):
        acc = zero
        for x, r in zip(w.entries, T.rows):
            if x and r[j]:
                acc = acc + x * r[j]
        out.append(acc)
    return OmegaVector(w.gens, T.col_labels, out)


def vec_sub(a: OmegaVector, b: OmegaVector) -> OmegaVector:
    _match_vectors(a, b)
    return OmegaVector(a.gens, a.labels, (x - y for x, y in zip(a.entries, b.entries)))


def relabel(
    T: OmegaMatrix, row_labels: Sequence[str] | None = None, col_labels: Sequence[str] | None = None
) -> OmegaMatrix:
    """Copy of T with new labels (same entries, same positions)."""
    return OmegaMatrix(
        T.gens,
        tuple(row_labels) if row_labels is not None else T.row_labels,
        T.rows,
        tuple(col_labels) if col_labels is not None else T.col_labels,
    )


# ---------------------------------------------------------------------------
# Inversion by unit-pivot elimination
# ---------------------------------------------------------------------------


def _find_unit_pivot(rows: list[list[RingElem]], col: int, start: int) -> int | None:
    # Prefer +-e pivots, then any +-g; ties broken by row order for determinism.
    best = None
    for r in range(start, len(rows)):
        x = rows[r][col]
        if x.is_unit():
            if not any(x.terms[0][0]):
                return r
            if best is None:
                best = r
    return best


def _find_unit_pivot_2d(rows: list[list[RingElem]], start: int, n: int) -> tuple[int, int] | None:
    # Search the current column first so that the common case keeps the column order.
    for col in range(start, n):
        r = _find_unit_pivot(rows, col, start)
        if r is not None:
            return r, col
    return None


def _square_mul(a: list[list[RingElem]], b: list[list[RingElem]], zero: RingElem) -> list[list[RingElem]]:
    cols = list(zip(*b))
    out = []
    for ra in a:
        row = []
        for cb in cols:
            acc = zero
            for x, y in zip(ra, cb):
                if x and y:
                    acc = acc + x * y
            row.append(acc)
        out.append(row)
    return out


def _inverse_by_characteristic_polynomial(
    a: list[list[RingElem]], gens: GeneratorSet
) -> list[list[RingElem]] | None:
    """Inverse from the characteristic polynomial (Faddeev-LeVerrier), or None if singular.

    The group ring is commutative, so A is invertible exactly when det A is a unit.
    The recursion divides by the integers 1..n; those divisions are exact because the
    characteristic polynomial has coefficients in the group ring itself.
    """
    n = len(a)
    zero, one = RingElem.zero(gens), RingElem.one(gens)
    m = [[zero] * n for _ in range(n)]
    c = one
    for k in range(1, n + 1):
        for i in range(n):
            m[i][i] = m[i][i] + c
        am = _square_mul(a, m, zero)
        trace = zero
        for i in range(n):
            trace = trace + am[i][i]
        terms = {}
        for exps, coeff in trace.terms:
            q, rem = divmod(-coeff, k)
            if rem:
                raise LinalgError("characteristic polynomial has a non-integral coefficient")
            terms[exps] = q
        c = RingElem(gens, terms)
        if k < n:
            m = am
    # Now c = (-1)^n det A, and m satisfies A·m + c·I = 0, so A^-1 = -m / c.
    if not c.is_unit():
        return None
    factor = -c.unit_inverse()
    return [[factor * x if x else x for x in row] for row in m]


def mat_inverse(a: OmegaMatrix) -> OmegaMatrix:
    """Exact inverse via Gauss-Jordan elimination with unit pivots (+-g).

    The pivot is searched in the current column first and then in later columns.
    When the remaining block holds no unit at all, the inverse comes from the
    characteristic polynomial instead, which succeeds exactly when the determinant
    is a unit.  Otherwise NotInvertibleError ("no unit pivot") is raised.  For a
    matrix with labels Q -> Q' the inverse has labels Q' -> Q.
    """
    if not a.is_square:
        raise LinalgError("only square matrices can be inverted")
    n = len(a.row_labels)
    gens = a.gens
    zero, one = RingElem.zero(gens), RingElem.one(gens)
    work = [list(r) + [one if i == j else zero for j in range(n)] for i, r in enumerate(a.rows)]
    colperm = list(range(n))
    for k in range(n):
        found = _find_unit_pivot_2d(work, k, n)
        if found is None:
            rows = _inverse_by_characteristic_polynomial([list(r) for r in a.rows], gens)
            if rows is None:
                raise NotInvertibleError(f"no unit pivot in column {a.col_labels[colperm[k]]}")
            return OmegaMatrix(gens, a.col_labels, rows, a.row_labels)
        p, c = found
        work[k], work[p] = work[p], work[k]
        if c != k:
            for r in work:
                r[k], r[c] = r[c], r[k]
            colperm[k], colperm[c] = colperm[c], colperm[k]
        inv = work[k][k].unit_inverse()
        work[k] = [inv * x if x else x for x in work[k]]
        for r in range(n):
            if r != k and work[r][k]:
                f = work[r][k]
                pivot_row = work[k]
                work[r] = [x - f * y if y else x for x, y in zip(work[r], pivot_row)]
    # work now holds R with R·A·P = I, so the inverse is P·R.
    inverse_rows: list[list[RingElem]] = [[]] * n
    for k in range(n):
        inverse_rows[colperm[k]] = work[k][n:]
    return OmegaMatrix(gens, a.col_labels, inverse_rows, a.row_labels)


def solve_left(F: OmegaMatrix, v: OmegaVector) -> OmegaVector:
    """Find x with x·F = v by unit-pivot elimination on the transposed system.

    F may be rectangular (more columns than rows).  Raises NotInvertibleError if no
    unit pivot is available and LinalgError if the system is inconsistent.
    """
    if v.labels != F.col_labels:
        raise LinalgError("vector labels do not match matrix columns")
    gens = F.gens
    n_unknown = len(F.row_labels)
    # equations: for each column j, sum_i x_i F[i][j] = v_j   (entries commute here)
    eqs = [[F.rows[i][j] for i in range(n_unknown)] + [v.entries[j]] for j in range(len(F.col_labels))]
    pivots: list[int] = []
    row = 0
    for col in range(n_unknown):
        p = _find_unit_pivot(eqs, col, row)
        if p is None:
            raise NotInvertibleError(f"no unit pivot for unknown {F.row_labels[col]}")
        eqs[row], eqs[p] = eqs[p], eqs[row]
        inv = eqs[row][col].unit_inverse()
        eqs[row] = [inv * x if x else x for x in eqs[row]]
        for r in range(len(eqs)):
            if r != row and eqs[r][col]:
                f = eqs[r][col]
                eqs[r] = [x - f * y if y else x for x, y in zip(eqs[r], eqs[row])]
        pivots.append(row)
        row += 1
    for r in range(row, len(eqs)):
        if eqs[r][-1]:
            raise LinalgError("inconsistent system: vector is not in the image")
    return OmegaVector(gens, F.row_labels, (eqs[pivots[i]][-1] for i in range(n_unknown)))


# ---------------------------------------------------------------------------
# Base-path change and homomorphisms
# ---------------------------------------------------------------------------


def diag_conjugate(T: OmegaMatrix, d: Sequence[GroupElem], d_cols: Sequence[GroupElem] | None = None) -> OmegaMatrix:
    """Return D·T·D^-1 with D = diag(d): entry (n, l) becomes d_n · T_nl · d_l^-1.

    For a matrix whose column basis differs from its row basis, d_cols gives the
    diagonal on the column side (defaults to d).
    """
    d = tuple(d)
    d_cols = tuple(d_cols) if d_cols is not None else d
    if len(d) != len(T.row_labels) or len(d_cols) != len(T.col_labels):
        raise LinalgError("one twist per basis element is required")
    rows = []
    for dn, r in zip(d, T.rows):
        rows.append([x.shift(dn * dl.inverse()) if x else x for x, dl in zip(r, d_cols)])
    return OmegaMatrix(T.gens, T.row_labels, rows, T.col_labels)


@dataclass(frozen=True)
class ComplexMatrix:
    """Numeric image of an OmegaMatrix under a NumericHom."""

    row_labels: Labels
    col_labels: Labels
    rows: tuple[tuple[complex, ...], ...]

    def __mul__(self, other: ComplexMatrix) -> ComplexMatrix:
        if self.col_labels != other.row_labels:
            raise LinalgError("label mismatch")
        cols = list(zip(*other.rows))
        return ComplexMatrix(
            self.row_labels, other.col_labels, tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in cols) for r in self.rows)
        )

    def close_to(self, other: ComplexMatrix, tol: float = NUMERIC_TOLERANCE) -> bool:
        return (
            self.row_labels == other.row_labels
            and self.col_labels == other.col_labels
            and all(abs(x - y) <= tol for ra, rb in zip(self.rows, other.rows) for x, y in zip(ra, rb))
        )

    def entry(self, row: str, col: str) -> complex:
        return self.rows[self.row_labels.index(row)][self.col_labels.index(col)]


def mat_specialize(h: Union[RingHom, NumericHom], T: OmegaMatrix) -> Union[OmegaMatrix, ComplexMatrix]:
    if h.source != T.gens:
        raise LinalgError("homomorphism source differs from the matrix generator set")
    if isinstance(h, NumericHom):
        return ComplexMatrix(T.row_labels, T.col_labels, tuple(tuple(ring_specialize(h, x) for x in r) for r in T.rows))
    return OmegaMatrix(h.target, T.row_labels, ([ring_specialize(h, x) for x in r] for r in T.rows), T.col_labels)


def first_difference(a: OmegaMatrix, b: OmegaMatrix) -> tuple[str, str, RingElem, RingElem] | None:
    """First differing entry in row-major order, or None when a == b."""
    _same_shape(a, b)
    for rl, ra, rb in zip(a.row_labels, a.rows, b.rows):
        for cl, x, y in zip(a.col_labels, ra, rb):
            if x != y:
                return rl, cl, x, y
    return None


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------


def format_matrix(T: OmegaMatrix) -> str:
    """Labelled rows of semicolon-separated entries.

    A leading ``columns:`` line appears only when column labels differ from row labels.
    """
    lines = []
    if T.col_labels != T.row_labels:
        lines.append("columns: " + " ".join(T.col_labels))
    width = max(len(l) for l in T.row_labels)
    for label, r in zip(T.row_labels, T.rows):
        lines.append(f"{label.ljust(width)}: " + "; ".join(str(x) for x in r))
    return "\n".join(lines)


def parse_matrix(gens: GeneratorSet, text: str | Sequence[str], line_offset: int = 0) -> OmegaMatrix:
    """Inverse of ``format_matrix``.  Errors name the offending line (1-based, plus line_offset)."""
    lines = text.splitlines() if isinstance(text, str) else list(text)
    row_labels: list[str] = []
    rows: list[list[RingElem]] = []
    col_labels: list[str] | None = None
    for i, raw in enumerate(lines):
        lineno = i + 1 + line_offset
        line = raw.strip()
        if not line:
            continue
        if line.startswith("columns:"):
            if rows or col_labels is not None:
                raise ParseError(f"line {lineno}: 'columns:' must come first")
            col_labels = line[len("columns:"):].split()
            continue
        label, sep, body = line.partition(":")
        if not sep:
            raise ParseError(f"line {lineno}: expected 'LABEL: entry; entry; ...'")
        label = label.strip()
        try:
            entries = [parse_ring(gens, cell) for cell in body.split(";")]
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
        row_labels.append(label)
        rows.append(entries)
    if not rows:
        raise ParseError(f"line {line_offset + 1}: empty matrix")
    try:
        return OmegaMatrix(gens, row_labels, rows, col_labels)
    except LinalgError as exc:
        raise ParseError(f"line {line_offset + 1}: {exc}") from None


def parse_vector(gens: GeneratorSet, labels: Sequence[str], text: str) -> OmegaVector:
    """Parse ``(x1, x2, ...)`` positionally, or ``A: x1; B: x2`` by label (missing labels are 0)."""
    text = text.strip()
    labels = tuple(labels)
    if text.startswith("(") and text.endswith(")"):
        body = text[1:-1]
        cells = [c for c in body.split(",")] if body.strip() else []
        if len(cells) != len(labels):
            raise ParseError(f"expected {len(labels)} coordinates ({', '.join(labels)}), got {len(cells)}")
        return OmegaVector(gens, labels, (parse_ring(gens, c) for c in cells))
    values = {l: RingElem.zero(gens) for l in labels}
    for part in text.split(";"):
        if not part.strip():
            continue
        label, sep, body = part.partition(":")
        label = label.strip()
        if not sep or label not in values:
            raise ParseError(f"unknown or missing label in {part.strip()!r}; labels are {', '.join(labels)}")
        values[label] = parse_ring(gens, body)
    return OmegaVector(gens, labels, (values[l] for l in labels))


def matrix_to_json(T: OmegaMatrix) -> str:
    return json.dumps(T.to_structured(), sort_keys=True)


def matrix_from_structured(gens: GeneratorSet, data: Mapping) -> OmegaMatrix:
    """Inverse of ``OmegaMatrix.to_structured``."""
    try:
        rows = [[parse_ring(gens, x) for x in r] for r in data["entries"]]
        return OmegaMatrix(gens, data["rows"], rows, data["columns"])
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed structured matrix: {exc}") from None


def vector_from_structured(gens: GeneratorSet, data: Mapping) -> OmegaVector:
    """Inverse of ``OmegaVector.to_structured``."""
    try:
        return OmegaVector(gens, data["labels"], (parse_ring(gens, x) for x in data["entries"]))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed structured vector: {exc}") from None
