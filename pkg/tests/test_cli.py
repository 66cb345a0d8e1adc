from __future__ import annotations

import json

import pytest

from plmonodromy.cli import main
from plmonodromy.omega_linalg import matrix_from_structured, parse_matrix, vector_from_structured
from plmonodromy.scenario_library import builtin, builtin_text


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestScenarioCommands:
    def test_list(self, capsys):
        code, out, _ = run(capsys, "scenario", "list")
        assert code == 0
        names = [line.split()[0] for line in out.splitlines()]
        assert "triangle7" in names and "circle_two_lines8" in names

    def test_list_structured(self, capsys):
        code, out, _ = run(capsys, "--format", "structured", "scenario", "list")
        assert {"name": "circle2", "source": "builtin"} in json.loads(out)

    def test_show(self, capsys):
        code, out, _ = run(capsys, "scenario", "show", "circle2")
        assert code == 0
        assert "polygons (2): A B" in out
        assert "  a g1 A:+ B:-" in out
        assert "folds: from_triangle" in out

    def test_show_without_edges(self, capsys):
        _, out, _ = run(capsys, "scenario", "show", "parabola8")
        assert "edges: none recorded" in out

    def test_unknown_scenario(self, capsys):
        code, _, err = run(capsys, "scenario", "show", "nonagon")
        assert code == 2 and "nonagon" in err


class TestMatrix:
    def test_pretty_round_trip(self, capsys):
        code, out, _ = run(capsys, "matrix", "triangle7", "lplus lminus")
        assert code == 0
        s = builtin("triangle7")
        assert parse_matrix(s.gens, out) == s.matrix("T3")

    def test_structured_round_trip(self, capsys):
        _, out, _ = run(capsys, "--format", "structured", "matrix", "parabola8", "l3")
        s = builtin("parabola8")
        assert matrix_from_structured(s.gens, json.loads(out)) == s.matrix("T_l3")

    def test_empty_word_is_identity(self, capsys):
        _, out, _ = run(capsys, "matrix", "circle2", "")
        assert out.splitlines() == ["A: e; 0", "B: 0; e"]

    def test_bad_word(self, capsys):
        code, _, err = run(capsys, "matrix", "circle2", "lam +")
        assert code == 2 and err.startswith("plmono:")


class TestApply:
    def test_circle(self, capsys):
        code, out, _ = run(capsys, "apply", "circle2", "(e, 0)", "lam")
        assert code == 0
        assert out.splitlines() == ["image:     (g1, 0)", "variation: (-e + g1, 0)"]

    def test_jump_has_no_variation(self, capsys):
        _, out, _ = run(capsys, "apply", "triangle7", "all_e", "lplus")
        assert "variation: undefined" in out

    def test_structured_vector_round_trip(self, capsys):
        _, out, _ = run(capsys, "--format", "structured", "apply", "triangle7", "octahedron", "lam")
        data = json.loads(out)
        s = builtin("triangle7")
        assert vector_from_structured(s.gens, data["vector"]) == s.golden_vectors["octahedron"]

    def test_wrong_length(self, capsys):
        code, _, _ = run(capsys, "apply", "circle2", "(e)", "lam")
        assert code == 2


class TestBoundary:
    def test_not_a_cycle(self, capsys):
        code, out, _ = run(capsys, "boundary", "triangle7", "(e, 0, 0, 0, 0, 0, 0)")
        assert code == 0
        assert out.strip() == "b^1[e] + b^2[e] + b^3[e] (not a cycle)"

    def test_cycle(self, capsys):
        _, out, _ = run(capsys, "boundary", "cross4", "quadrants")
        assert out.strip() == "0 (cycle)"

    def test_primed(self, capsys):
        _, out, _ = run(capsys, "--format", "structured", "boundary", "triangle7", "(e, 0, 0, 0, 0, 0, 0)", "--primed")
        data = json.loads(out)
        assert not data["cycle"] and {t["edge"] for t in data["terms"]} == {"b~^1", "b~^2", "b~^3"}

    def test_no_edges(self, capsys):
        code, _, err = run(capsys, "boundary", "parabola8", "(e, 0, 0, 0, 0, 0, 0, 0)")
        assert code == 2 and "no edge data" in err


class TestIndices:
    def test_all_e(self, capsys):
        code, out, _ = run(capsys, "indices", "triangle7", "all_e", "lam")
        assert code == 0
        assert "  e: -1" in out.splitlines()

    def test_structured(self, capsys):
        _, out, _ = run(capsys, "--format", "structured", "indices", "triangle7", "flat_plane", "lam")
        assert json.loads(out)["indices"] == {}

    def test_failure_exit_code(self, capsys):
        code, _, err = run(capsys, "indices", "triangle7", "(e, 0, 0, 0, 0, 0, 0)", "lam")
        assert code == 1 and "outside the span" in err


class TestVerify:
    def test_pass(self, capsys):
        code, out, _ = run(capsys, "verify", "triangle7", "lplus * lminus == lam")
        assert code == 0
        assert out.splitlines() == ["PASS identity: lplus * lminus == lam", "1 checks, 0 failed"]

    def test_fail(self, capsys):
        code, out, _ = run(capsys, "verify", "triangle7", "lam == I")
        assert code == 1
        assert "first difference at (A, A)" in out

    def test_suite_structured(self, capsys):
        code, out, _ = run(capsys, "--format", "structured", "verify", "biangle5", "--suite")
        data = json.loads(out)
        assert code == 0 and data["failed"] == 0
        names = {c["name"] for c in data["checks"]}
        assert "fold:from_triangle" in names and "edge_commutation:lam" in names

    def test_nothing_to_check(self, capsys):
        code, _, _ = run(capsys, "verify", "triangle7")
        assert code == 2


class TestUserScenarios:
    def test_shadowing_and_checksum_write(self, capsys, tmp_path):
        text = builtin_text("circle2").replace("B: 0; e", "B: 0; g1")
        path = tmp_path / "circle2.scn"
        path.write_text(text)
        code, _, err = run(capsys, "--scenario-path", str(tmp_path), "matrix", "circle2", "lam")
        assert code == 2 and "checksum" in err
        code, out, _ = run(capsys, "checksum", str(path), "--write")
        assert code == 0
        code, out, _ = run(capsys, "--scenario-path", str(tmp_path), "matrix", "circle2", "T1")
        assert code == 0 and "B: 0; g1" in out
        _, out, _ = run(capsys, "--scenario-path", str(tmp_path), "scenario", "list")
        assert str(path) in out

    def test_checksum_report(self, capsys, tmp_path):
        path = tmp_path / "c.scn"
        path.write_text(builtin_text("circle2"))
        code, out, _ = run(capsys, "checksum", str(path))
        assert code == 0 and builtin("circle2").checksum in out


def test_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
