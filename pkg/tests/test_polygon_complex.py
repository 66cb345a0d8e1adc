from __future__ import annotations

import pytest
from hypothesis import given, settings

from conftest import FREE3, group_elems, vectors
from plmonodromy.group_ring import GeneratorSet, GroupElem, ParseError, parse_group
from plmonodromy.omega_linalg import OmegaVector, vec_mat_mul
from plmonodromy.polygon_complex import (
    Chain1,
    ComplexError,
    Edge,
    EdgeTransformTable,
    Incidence,
    PolygonComplex,
    boundary,
    build_complex,
    coset_reduce,
    edge_transform,
    is_cycle,
    parse_chain1,
)
from plmonodromy.scenario_library import builtin

TRI = builtin("triangle7")
CROSS = builtin("cross4")


def chain(text, scenario=TRI, cx=None):
    return parse_chain1(scenario.gens, text, cx or scenario.complex)


def vec(text, scenario=TRI):
    return scenario.parse_vector(text)


class TestCosetReduce:
    def test_drops_own_generator(self):
        g = parse_group(FREE3, "g1*g2")
        assert coset_reduce(TRI.complex, "a^1", g) == parse_group(FREE3, "g2")

    def test_identity(self):
        e = GroupElem(FREE3, (0, 0, 0))
        assert coset_reduce(TRI.complex, "b^2", e) == e

    def test_full_local_subgroup(self):
        assert coset_reduce(TRI.complex, "c^3", parse_group(FREE3, "g3^5")).is_identity()

    def test_unknown_edge(self):
        with pytest.raises(ComplexError):
            coset_reduce(TRI.complex, "z", parse_group(FREE3, "e"))

    @given(group_elems())
    def test_idempotent(self, g):
        once = coset_reduce(TRI.complex, "c^2", g)
        assert coset_reduce(TRI.complex, "c^2", once) == once


class TestBoundary:
    # Triangle A has sides b^1, b^2, b^3 on lines 1, 2, 3.
    def test_vanishing_triangle(self):
        assert boundary(TRI.complex, vec("A: e")) == chain("b^1[e] + b^2[e] + b^3[e]")

    def test_shifted_triangle(self):
        assert boundary(TRI.complex, vec("A: g1*g2")) == chain("b^1[g2] + b^2[g1] + b^3[g1*g2]")

    def test_octahedron_is_cycle(self):
        assert is_cycle(TRI.complex, TRI.golden_vectors["octahedron"])
        assert not is_cycle(TRI.complex, vec("A: e"))

    def test_cross_cycles(self):
        assert is_cycle(CROSS.complex, CROSS.golden_vectors["quadrants"])
        assert is_cycle(CROSS.complex, CROSS.golden_vectors["corner_torus"])
        assert not is_cycle(CROSS.complex, CROSS.parse_vector("A: e; B: e"))

    def test_zero_vector(self):
        assert boundary(TRI.complex, OmegaVector.zero(FREE3, TRI.labels)).is_zero()

    def test_offsets_shift_indices(self):
        gens = GeneratorSet.free("g1", "g2")
        cx = PolygonComplex(
            gens,
            ("P", "Q"),
            (Edge("s", 0, (Incidence("P", 1), Incidence("Q", -1, (0, 1)))),),
        )
        got = boundary(cx, parse_vector_2(gens, "(0, e)"))
        assert got == parse_chain1(gens, "-s[g2]", cx)


def parse_vector_2(gens, text):
    from plmonodromy.omega_linalg import parse_vector

    return parse_vector(gens, ("P", "Q"), text)


class TestComplexValidation:
    def test_same_sign_rejected(self):
        with pytest.raises(ComplexError, match="opposite"):
            build_complex(FREE3, ["A", "B"], [("a", "g1", [("A", 1), ("B", 1)])])

    def test_three_polygons_rejected(self):
        with pytest.raises(ComplexError):
            build_complex(FREE3, ["A", "B", "C"], [("a", "g1", [("A", 1), ("B", -1), ("C", 1)])])

    def test_unknown_polygon(self):
        with pytest.raises(ComplexError):
            build_complex(FREE3, ["A"], [("a", "g1", [("Z", 1)])])

    def test_single_incidence_allowed(self):
        cx = build_complex(FREE3, ["A"], [("a", "g1", [("A", 1)])])
        assert cx.edge("a").incidences[0].polygon == "A"


class TestChainText:
    @pytest.mark.parametrize("text", ["0", "a^1[e]", "b^1[g2*g3] - 2*c^1[e]", "-a^2[g1^-1*g3] + b^3[g1]"])
    def test_round_trip(self, text):
        c = chain(text)
        assert chain(str(c)) == c

    def test_reduction_on_parse(self):
        assert chain("a^1[g1*g2]") == chain("a^1[g2]")

    @pytest.mark.parametrize("bad", ["a^1", "a^1[e] b^1[e]", "a^1[g9]"])
    def test_malformed(self, bad):
        with pytest.raises(ParseError):
            chain(bad)


class TestEdgeTransform:
    def test_b1_image(self):
        table = TRI.edge_table("lam")
        assert edge_transform(table, chain("b^1[e]")) == chain("b^1[g2*g3]")

    def test_jump_image(self):
        table = TRI.edge_table("lplus")
        got = edge_transform(table, chain("b^2[e]"))
        assert got == parse_chain1(TRI.gens, "-b~^2[e]", TRI.primed_complex)

    def test_empty(self):
        table = TRI.edge_table("lam")
        assert edge_transform(table, Chain1(FREE3)).is_zero()

    def test_shifted_copy(self):
        table = TRI.edge_table("lam")
        assert edge_transform(table, chain("a^1[g2]")) == chain("a^1[g2] + b^1[g2*g3] - b^1[g2^2*g3]")

    def test_missing_edge(self):
        table = EdgeTransformTable(TRI.complex, TRI.complex, {})
        with pytest.raises(ComplexError, match="missing"):
            edge_transform(table, chain("a^1[e]"))


def _commutes(scenario, loop, w):
    T = scenario.matrix(loop)
    table = scenario.edge_table(loop)
    return boundary(table.target, vec_mat_mul(w, T)) == edge_transform(table, boundary(table.source, w))


class TestCommutation:
    @pytest.mark.parametrize("label", list("ABCDEFG"))
    def test_triangle_basis(self, label):
        assert _commutes(TRI, "lam", OmegaVector.basis(FREE3, TRI.labels, label))

    @pytest.mark.parametrize("label", list("ABCDEFG"))
    def test_jump_basis(self, label):
        assert _commutes(TRI, "lplus", OmegaVector.basis(FREE3, TRI.labels, label))

    def test_printed_typo_breaks_commutation(self):
        """The variant c^2 -> c^2 + b^2[g3] - b^2[g2*g3] breaks commutation on row D."""
        table = TRI.edge_table("lam")
        images = dict(table.images)
        images["c^2"] = chain("c^2[e] + b^2[g3] - b^2[g2*g3]")
        bad = EdgeTransformTable(table.source, table.target, images)
        w = OmegaVector.basis(FREE3, TRI.labels, "D")
        T = TRI.matrix("lam")
        assert boundary(TRI.complex, vec_mat_mul(w, T)) != edge_transform(bad, boundary(TRI.complex, w))

    @settings(max_examples=60)
    @given(vectors(FREE3, tuple("ABCDEFG"), max_terms=2))
    def test_random_vectors(self, w):
        assert _commutes(TRI, "lam", w)


@settings(max_examples=30)
@given(group_elems())
def test_pham_combinations_are_cycles(g):
    for name in ("circle2", "biangle5", "triangle7"):
        s = builtin(name)
        from plmonodromy.verify import pham_cycle

        for label in s.labels:
            assert is_cycle(s.complex, pham_cycle(s, "lam", label, GroupElem(s.gens, g.exponents[: len(s.gens)])))
