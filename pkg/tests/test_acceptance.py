"""One check per acceptance criterion; each prints a single PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines, or directly with
``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from plmonodromy.cli import main
from plmonodromy.elementary_transforms import fold_reproduce, template
from plmonodromy.group_ring import GeneratorSet, GroupElem, RingElem, RingHom
from plmonodromy.omega_linalg import (
    OmegaVector,
    mat_identity,
    mat_inverse,
    mat_mul,
    matrix_from_structured,
    parse_matrix,
    vec_mat_mul,
    vector_from_structured,
)
from plmonodromy.polygon_complex import boundary, edge_transform, is_cycle, parse_chain1
from plmonodromy.scenario_library import BUILTIN_NAMES, builtin
from plmonodromy.verify import (
    check_identity,
    expand_indices,
    pham_cycle,
    pham_omega,
    recover_intersection_indices,
    variation,
)

FREE3 = GeneratorSet.free("g1", "g2", "g3")


def _identities_hold(scenario, names):
    exprs = {n: e for n, e, _ in scenario.identities}
    return all(check_identity(exprs[n], scenario, n).passed for n in names)


def criterion_1():
    tri = builtin("triangle7")
    return mat_mul(template("jump_plus"), template("jump_minus")) == tri.matrix("T3")


def criterion_2():
    tri = builtin("triangle7")
    T = tri.matrix("T3")
    all_e = tri.golden_vectors["all_e"]
    expected = tri.parse_vector("A: -(e - g1)*(e - g2)*(e - g3)")
    flat = tri.parse_vector("(e, g2^-1, e, e, g2^-1, g2^-1, e)")
    return variation(all_e, T) == expected and variation(flat, T).is_zero()


def criterion_3():
    par = builtin("parabola8")
    return _identities_hold(par, ["l3_is_golden", "quadratic_touch_1", "quadratic_touch_2", "non_commuting"])


def criterion_4():
    ctl = builtin("circle_two_lines8")
    return _identities_hold(ctl, ["touch_2p_A", "touch_2p_B", "simple_loops_commute", "additive_crossing"])


def criterion_5():
    biangle, circle = builtin("biangle5"), builtin("circle2")
    fb, fc = biangle.folds["from_triangle"], circle.folds["from_triangle"]
    orders_ok = fb.unfolded_gens.orders == (None, None, 2) and fc.unfolded_gens.orders == (None, 2, 2)
    return (
        orders_ok
        and fold_reproduce(fb) == biangle.matrix("T2")
        and fold_reproduce(fc) == circle.matrix("T1")
    )


def criterion_6():
    tri, cross = builtin("triangle7"), builtin("cross4")
    chain = lambda text: parse_chain1(tri.gens, text, tri.complex)
    return (
        boundary(tri.complex, tri.parse_vector("A: e")) == chain("b^1[e] + b^2[e] + b^3[e]")
        and boundary(tri.complex, tri.parse_vector("A: g1*g2")) == chain("b^1[g2] + b^2[g1] + b^3[g1*g2]")
        and is_cycle(tri.complex, tri.golden_vectors["octahedron"])
        and is_cycle(cross.complex, cross.golden_vectors["quadrants"])
        and is_cycle(cross.complex, cross.golden_vectors["corner_torus"])
    )


def _random_vector(rng, labels):
    entries = []
    for _ in labels:
        terms = {tuple(rng.randint(-2, 2) for _ in range(3)): rng.randint(-3, 3) for _ in range(rng.randint(0, 2))}
        entries.append(RingElem(FREE3, terms))
    return OmegaVector(FREE3, labels, entries)


def criterion_7():
    tri = builtin("triangle7")
    rng = random.Random(7)
    vectors = [OmegaVector.basis(FREE3, tri.labels, l) for l in tri.labels]
    vectors += [_random_vector(rng, tri.labels) for _ in range(100)]
    for loop in ("lam", "lplus", "lminus"):
        T = tri.matrix(loop)
        table = tri.edge_table(loop)
        for w in vectors:
            w = OmegaVector(FREE3, T.row_labels, w.entries)
            if boundary(table.target, vec_mat_mul(w, T)) != edge_transform(table, boundary(table.source, w)):
                return False
    return True


def criterion_8():
    tri, circle = builtin("triangle7"), builtin("circle2")
    e = GroupElem(FREE3, (0, 0, 0))
    if recover_intersection_indices(tri.golden_vectors["all_e"], tri, "lam") != {e: -1}:
        return False
    if recover_intersection_indices(tri.golden_vectors["flat_plane"], tri, "lam") != {}:
        return False
    for scenario in (tri, circle, builtin("biangle5")):
        omega = pham_omega(scenario, "lam")
        T = scenario.matrix("lam")
        for label in scenario.labels:
            w = pham_cycle(scenario, "lam", label)
            idx = recover_intersection_indices(w, scenario, "lam")
            if expand_indices(idx, omega) != variation(w, T)[scenario.labels[0]]:
                return False
    for label in circle.labels:
        w = OmegaVector.basis(circle.gens, circle.labels, label)
        idx = recover_intersection_indices(w, circle, "lam")
        if expand_indices(idx, pham_omega(circle, "lam")) != variation(w, circle.matrix("lam"))["A"]:
            return False
    return True


def _ring_axioms(rng):
    def elem():
        return RingElem(
            FREE3,
            {tuple(rng.randint(-3, 3) for _ in range(3)): rng.randint(-5, 5) for _ in range(rng.randint(0, 4))},
        )

    for _ in range(1000):
        a, b, c = elem(), elem(), elem()
        if (a * b) * c != a * (b * c) or a * (b + c) != a * b + a * c or a * b != b * a:
            return False
    target = GeneratorSet(["g1", "g2", "g3"], [None, 2, None])
    for _ in range(100):
        h = RingHom(FREE3, target, [GroupElem(target, [rng.randint(-2, 2) for _ in range(3)]) for _ in range(3)])
        a, b = elem(), elem()
        if h(a * b) != h(a) * h(b) or h(a + b) != h(a) + h(b):
            return False
    return True


def _inverse_contract(rng):
    def ok(M):
        Minv = mat_inverse(M)
        return mat_mul(M, Minv) == mat_identity(M.gens, M.row_labels) and mat_mul(Minv, M) == mat_identity(
            M.gens, M.col_labels
        )

    for name in BUILTIN_NAMES:
        s = builtin(name)
        for m in list(s.loops) + list(s.golden_matrices):
            if not ok(s.matrix(m)):
                return False
    for name, loops in (("parabola8", ["l1", "l2", "l3"]), ("circle_two_lines8", ["tA", "tB", "t1pt", "t2pt"])):
        s = builtin(name)
        for _ in range(12):
            M = s.identity()
            for x in rng.choices(loops, k=rng.randint(2, 4)):
                M = mat_mul(M, s.matrix(x))
            if not ok(M):
                return False
    return True


def _cli_round_trips():
    from contextlib import redirect_stdout
    from io import StringIO

    def run(*argv):
        buf = StringIO()
        with redirect_stdout(buf):
            code = main(list(argv))
        return code, buf.getvalue()

    tri = builtin("triangle7")
    code, out = run("matrix", "triangle7", "lam")
    if code or parse_matrix(tri.gens, out) != tri.matrix("T3"):
        return False
    code, out = run("--format", "structured", "matrix", "triangle7", "lplus")
    if code or matrix_from_structured(tri.gens, json.loads(out)) != tri.matrix("Tplus"):
        return False
    code, out = run("--format", "structured", "apply", "triangle7", "octahedron", "lam")
    data = json.loads(out)
    return not code and vector_from_structured(tri.gens, data["vector"]) == tri.golden_vectors["octahedron"]


def criterion_9():
    rng = random.Random(20240917)
    return _ring_axioms(rng) and _inverse_contract(rng) and _cli_round_trips()


CRITERIA = {
    1: ("jump factorization equals the triangle matrix", criterion_1),
    2: ("triangle variations", criterion_2),
    3: ("parabola composition and relations", criterion_3),
    4: ("circle and two lines relations", criterion_4),
    5: ("biangle and circle reproduced by folding", criterion_5),
    6: ("boundary operator examples and cycles", criterion_6),
    7: ("boundary commutes with the triangle loops", criterion_7),
    8: ("intersection index recovery", criterion_8),
    9: ("ring axioms, specialization, inverses, CLI round trips", criterion_9),
}


def _line(number: int) -> tuple[bool, str]:
    title, check = CRITERIA[number]
    try:
        ok = bool(check())
        note = ""
    except Exception as exc:  # a crash is reported as a failure with its message
        ok, note = False, f" ({type(exc).__name__}: {exc})"
    return ok, f"criterion {number}: {title} ... {'PASS' if ok else 'FAIL'}{note}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = _line(number)
    with capsys.disabled():
        print(f"\n{line}", end="")
    assert ok, line


if __name__ == "__main__":
    results = [_line(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
