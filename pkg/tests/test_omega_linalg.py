from __future__ import annotations

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from conftest import FREE3, group_elems, matrices, vectors
from plmonodromy.elementary_transforms import template
from plmonodromy.group_ring import GeneratorSet, GroupElem, ParseError, RingElem, RingHom, NumericHom, parse_group, parse_ring
from plmonodromy.omega_linalg import (
    LinalgError,
    NotInvertibleError,
    OmegaMatrix,
    OmegaVector,
    diag_conjugate,
    first_difference,
    format_matrix,
    mat_identity,
    mat_inverse,
    mat_mul,
    mat_specialize,
    mat_sub,
    matrix_from_structured,
    parse_matrix,
    parse_vector,
    relabel,
    solve_left,
    vec_mat_mul,
    vector_from_structured,
)

LABELS7 = tuple("ABCDEFG")
LABELS3 = ("A", "B", "C")


def M(text, gens=FREE3):
    return parse_matrix(gens, text)


def V(text, labels=LABELS7, gens=FREE3):
    return parse_vector(gens, labels, text)


class TestBasics:
    def test_identity_2(self):
        I = mat_identity(FREE3, ["A", "B"])
        assert str(I) == "A: e; 0\nB: 0; e"

    def test_identity_is_neutral(self):
        T3 = template("triangle")
        I = mat_identity(FREE3, LABELS7)
        assert mat_mul(T3, I) == T3 == mat_mul(I, T3)
        w = V("(e, g1, 0, 0, g2 - e, 0, 3*g3)")
        assert vec_mat_mul(w, I) == w

    def test_label_mismatch_rejected(self):
        a = mat_identity(FREE3, ["A", "B"])
        b = mat_identity(FREE3, ["A", "C"])
        with pytest.raises(LinalgError):
            mat_mul(a, b)

    def test_shape_checked(self):
        with pytest.raises(LinalgError):
            OmegaMatrix(FREE3, ["A", "B"], [[RingElem.one(FREE3)]])

    def test_relabel_for_jumps(self):
        plus = template("jump_plus")
        renamed = relabel(plus, col_labels=LABELS7)
        assert renamed.col_labels == LABELS7 and renamed.rows == plus.rows


class TestVariationExamples:
    def test_all_e_variation(self):
        T = mat_sub(template("triangle"), mat_identity(FREE3, LABELS7))
        got = vec_mat_mul(V("(e, e, e, e, e, e, e)"), T)
        omega = parse_ring(FREE3, "-e + g1 + g2 + g3 - g1*g2 - g2*g3 - g1*g3 + g1*g2*g3")
        assert got.entries[0] == omega
        assert all(not x for x in got.entries[1:])

    def test_flat_plane_does_not_ramify(self):
        T = mat_sub(template("triangle"), mat_identity(FREE3, LABELS7))
        got = vec_mat_mul(V("(e, g2^-1, e, e, g2^-1, g2^-1, e)"), T)
        assert got.is_zero()


class TestInverse:
    def test_diagonal_units(self):
        T1 = M("A: g1; 0\nB: 0; e")
        assert mat_inverse(T1) == M("A: g1^-1; 0\nB: 0; e")

    @pytest.mark.parametrize("kind", ["circle", "biangle", "triangle", "jump_plus", "jump_minus"])
    def test_templates(self, kind):
        T = template(kind)
        inv = mat_inverse(T)
        assert mat_mul(T, inv).is_identity()
        assert mat_mul(inv, T).is_identity()

    def test_jump_inverse_swaps_labels(self):
        plus = template("jump_plus")
        inv = mat_inverse(plus)
        assert inv.row_labels == plus.col_labels and inv.col_labels == plus.row_labels

    def test_no_unit_pivot(self):
        with pytest.raises(NotInvertibleError, match="no unit pivot"):
            mat_inverse(M("A: e - g1; 0\nB: 0; e"))

    def test_row_swap_needed(self):
        T = M("A: 0; g2\nB: -g1; 3*e")
        assert mat_mul(T, mat_inverse(T)).is_identity()


class TestSolveLeft:
    def test_rectangular(self):
        F = OmegaMatrix(FREE3, ["x", "y"], [[RingElem.one(FREE3), parse_ring(FREE3, "g1"), RingElem.zero(FREE3)],
                                             [RingElem.zero(FREE3), RingElem.one(FREE3), parse_ring(FREE3, "g2")]],
                        ["p", "q", "r"])
        x = OmegaVector(FREE3, ["x", "y"], [parse_ring(FREE3, "g3"), parse_ring(FREE3, "e - g1")])
        v = vec_mat_mul(x, F)
        assert solve_left(F, v) == x

    def test_inconsistent(self):
        F = OmegaMatrix(FREE3, ["x"], [[RingElem.one(FREE3), RingElem.one(FREE3)]], ["p", "q"])
        v = OmegaVector(FREE3, ["p", "q"], [RingElem.one(FREE3), RingElem.zero(FREE3)])
        with pytest.raises(LinalgError, match="inconsistent"):
            solve_left(F, v)


class TestDiagConjugate:
    def test_identity_twists(self):
        T3 = template("triangle")
        assert diag_conjugate(T3, [GroupElem(FREE3, (0, 0, 0))] * 7) == T3

    def test_entry_rule(self):
        T = M("A: e; g1\nB: g2; g3")
        d = [parse_group(FREE3, "g1"), parse_group(FREE3, "g3^-1")]
        got = diag_conjugate(T, d)
        # entry (n, l) becomes d_n * T_nl * d_l^-1
        assert got == M("A: e; g1^2*g3\nB: g1^-1*g2*g3^-1; g3")

    def test_reference_twist_reproduces_sample(self):
        """Twisting the triangle at its B slot by g3 multiplies row B and divides column B."""
        T3 = template("triangle")
        d = [GroupElem(FREE3, (0, 0, 0))] * 7
        d[1] = parse_group(FREE3, "g3^-1")
        got = diag_conjugate(T3, d)
        assert got.entry("B", "A") == parse_ring(FREE3, "g2*g3^-1 - g1*g2")
        assert got.entry("B", "B") == RingElem.one(FREE3)

    def test_length_checked(self):
        with pytest.raises(LinalgError):
            diag_conjugate(template("circle"), [GroupElem(FREE3, (0, 0, 0))])

    @settings(max_examples=40)
    @given(matrices(FREE3, LABELS3), st.lists(group_elems(), min_size=3, max_size=3))
    def test_involution(self, T, d):
        back = diag_conjugate(diag_conjugate(T, d), [g.inverse() for g in d])
        assert back == T


class TestSpecialize:
    def test_identity_map(self):
        T3 = template("triangle")
        assert mat_specialize(RingHom.by_name(FREE3, FREE3), T3) == T3

    def test_torsion_reduction(self):
        target = GeneratorSet(["g1", "g2", "g3"], [None, None, 2])
        T = M("A: g3^3; e - g3^2\nB: 0; g3^-1")
        got = mat_specialize(RingHom.by_name(FREE3, target), T)
        assert got == parse_matrix(target, "A: g3; 0\nB: 0; g3")

    def test_numeric_half_turn(self):
        gens = GeneratorSet(["g1"], [2])
        T1 = parse_matrix(gens, "A: g1; 0\nB: 0; e")
        got = mat_specialize(NumericHom.from_angles(gens, [0.5]), T1)
        assert abs(got.entry("A", "A") + 1) < 1e-12 and abs(got.entry("B", "B") - 1) < 1e-12

    @settings(max_examples=20)
    @given(matrices(FREE3, LABELS3), matrices(FREE3, LABELS3), group_elems(), group_elems())
    def test_commutes_with_product(self, A, B, x, y):
        target = GeneratorSet(["g1", "g2", "g3"], [None, 2, None])
        h = RingHom(FREE3, target, [GroupElem(target, x.exponents), GroupElem(target, y.exponents), GroupElem(target, (0, 0, 1))])
        assert mat_specialize(h, mat_mul(A, B)) == mat_mul(mat_specialize(h, A), mat_specialize(h, B))


class TestTextForm:
    def test_round_trip_with_columns(self):
        T = template("jump_minus")
        assert parse_matrix(FREE3, format_matrix(T)) == T
        assert format_matrix(T).startswith("columns: A B C D E F G")

    def test_errors_name_the_line(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_matrix(FREE3, "A: e; 0\nB: 0; g7")

    def test_vector_forms(self):
        assert V("A: g1; C: 2*e") == V("(g1, 0, 2*e, 0, 0, 0, 0)")
        with pytest.raises(ParseError):
            V("(e, e)")
        with pytest.raises(ParseError):
            V("Z: e")

    def test_structured_round_trip(self):
        T = template("jump_plus")
        assert matrix_from_structured(FREE3, T.to_structured()) == T
        w = V("(e, g1, 0, 0, g2 - e, 0, 3*g3)")
        assert vector_from_structured(FREE3, w.to_structured()) == w

    def test_first_difference(self):
        a = M("A: e; 0\nB: 0; e")
        b = M("A: e; 0\nB: g1; e")
        assert first_difference(a, a) is None
        row, col, x, y = first_difference(a, b)
        assert (row, col, str(x), str(y)) == ("B", "A", "0", "g1")


@settings(max_examples=15)
@given(matrices(FREE3, LABELS3), matrices(FREE3, LABELS3), matrices(FREE3, LABELS3), vectors(FREE3, LABELS3))
def test_associativity_small(A, B, C, w):
    assert mat_mul(mat_mul(A, B), C) == mat_mul(A, mat_mul(B, C))
    assert vec_mat_mul(vec_mat_mul(w, A), B) == vec_mat_mul(w, mat_mul(A, B))


@settings(max_examples=4)
@given(matrices(FREE3, LABELS7, 3), matrices(FREE3, LABELS7, 3), matrices(FREE3, LABELS7, 3))
def test_associativity_triangle_size(A, B, C):
    assert mat_mul(mat_mul(A, B), C) == mat_mul(A, mat_mul(B, C))
